"""Pure-Python/numpy implementations of the hot kernels.

Every function here has a twin with the same signature in ``_ckernels.pyx``.
Graphs are passed in CSR form (``indptr``, ``indices``); mass assignments as
a measure table (``m_indptr``/``m_support`` for supports, ``m_wptr``/``m_weights``
for integer weights, ``m_denom`` for denominators) plus ``measure_of``, the
measure id of every vertex.  A measure with an empty weight range has weight 1
on each support point.
"""

from collections import deque

import numpy as np

BACKEND = "python"


def bounded_bfs(indptr, indices, source, radius):
    """BFS from ``source`` up to ``radius`` hops (``radius < 0``: unbounded).

    Returns ``(vertices, distances)`` in visiting order.
    """
    dist = {source: 0}
    order = [source]
    queue = deque([source])
    while queue:
        u = queue.popleft()
        du = dist[u]
        if 0 <= radius <= du:
            continue
        for k in range(indptr[u], indptr[u + 1]):
            v = int(indices[k])
            if v not in dist:
                dist[v] = du + 1
                order.append(v)
                queue.append(v)
    verts = np.array(order, dtype=np.int64)
    return verts, np.array([dist[v] for v in order], dtype=np.int64)


def ball_class_counts(indptr, indices, block_of, radius, sources):
    out = np.zeros(len(sources), dtype=np.int64)
    for i, x in enumerate(sources):
        verts, _ = bounded_bfs(indptr, indices, int(x), radius)
        out[i] = len(np.unique(np.asarray(block_of)[verts]))
    return out


def block_diameters(indptr, indices, block_of, block_size, cutoff):
    """Exact diameter of every block, or ``cutoff + 1`` when it exceeds ``cutoff``.

    Blocks split across components are reported as ``cutoff + 1`` too.
    """
    block_of = np.asarray(block_of)
    nblocks = len(block_size)
    diam = np.zeros(nblocks, dtype=np.int64)
    for x in range(len(indptr) - 1):
        b = block_of[x]
        if diam[b] > cutoff:
            continue
        need = block_size[b] - 1
        if need == 0:
            continue
        dist = {x: 0}
        queue = deque([x])
        found = 0
        far = 0
        while queue and found < need:
            u = queue.popleft()
            du = dist[u]
            if du >= cutoff:
                break
            for k in range(indptr[u], indptr[u + 1]):
                v = int(indices[k])
                if v not in dist:
                    dist[v] = du + 1
                    queue.append(v)
                    if block_of[v] == b:
                        found += 1
                        far = du + 1
        if found < need:
            diam[b] = cutoff + 1
        elif far > diam[b]:
            diam[b] = far
    return diam


def _measure(m, m_indptr, m_support, m_wptr, m_weights):
    s = m_support[m_indptr[m]:m_indptr[m + 1]]
    lo, hi = m_wptr[m], m_wptr[m + 1]
    w = np.ones(len(s), dtype=np.int64) if lo == hi else m_weights[lo:hi]
    return s, w


def l1_numerator(mx, my, m_indptr, m_support, m_wptr, m_weights, m_denom):
    """Numerator of the l1 distance between two measures over ``Dx * Dy``."""
    sx, wx = _measure(mx, m_indptr, m_support, m_wptr, m_weights)
    sy, wy = _measure(my, m_indptr, m_support, m_wptr, m_weights)
    dx, dy = int(m_denom[mx]), int(m_denom[my])
    _, ix, iy = np.intersect1d(sx, sy, assume_unique=True, return_indices=True)
    cx = wx[ix]
    cy = wy[iy]
    common = int(np.abs(cx * dy - cy * dx).sum())
    return common + (dx - int(cx.sum())) * dy + (dy - int(cy.sum())) * dx


def max_defect(indptr, indices, radius, m_indptr, m_support, m_wptr, m_weights,
               m_denom, measure_of, sources):
    """Near-maximal l1 pairs over ``x < y`` with ``0 < d(x, y) <= radius``.

    Returns candidate arrays ``(xs, ys, nums, dens)``; the exact maximum is
    among them (float screening keeps everything within 1e-9 of the best).
    """
    best = -1.0
    cand = []
    for x in sources:
        x = int(x)
        mx = measure_of[x]
        verts, _ = bounded_bfs(indptr, indices, x, radius)
        for y in verts[1:]:
            y = int(y)
            if y < x or measure_of[y] == mx:
                continue
            my = measure_of[y]
            num = l1_numerator(mx, my, m_indptr, m_support, m_wptr, m_weights, m_denom)
            den = int(m_denom[mx]) * int(m_denom[my])
            val = num / den
            if val > best * (1 + 1e-9):
                best = val
                cand = [c for c in cand if c[4] >= best * (1 - 1e-9)]
            if val >= best * (1 - 1e-9):
                cand.append((x, y, num, den, val))
    arr = lambda i: np.array([c[i] for c in cand], dtype=np.int64)
    return arr(0), arr(1), arr(2), arr(3)


def side_mass(indptr, indices, tin, tout, parent, m_indptr, m_support, m_wptr,
              m_weights, measure_of):
    """For every CSR slot ``x -> y``: weight of ``lambda_x`` on x's side of the edge.

    ``tin``/``tout`` are Euler-tour entry/exit times of a rooted spanning
    forest, ``parent`` its parent array (``-1`` for roots).
    """
    n = len(indptr) - 1
    out = np.zeros(len(indices), dtype=np.int64)
    tin = np.asarray(tin)
    for x in range(n):
        m = measure_of[x]
        s, w = _measure(m, m_indptr, m_support, m_wptr, m_weights)
        ts = tin[s]
        total = int(w.sum())
        for k in range(indptr[x], indptr[x + 1]):
            y = int(indices[k])
            if y == parent[x]:
                inside = (ts >= tin[x]) & (ts < tout[x])
                out[k] = int(w[inside].sum())
            else:
                inside = (ts >= tin[y]) & (ts < tout[y])
                out[k] = total - int(w[inside].sum())
    return out
