# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twins of the kernels in ``_pykernels``; same signatures and results."""

import numpy as np
cimport numpy as cnp

ctypedef cnp.int64_t i64

BACKEND = "cython"


cdef Py_ssize_t _bfs(const i64[:] indptr, const i64[:] indices, i64 source,
                     i64 radius, i64[:] dist, i64[:] order) noexcept nogil:
    # dist must be all -1 on entry; caller resets the touched entries
    cdef Py_ssize_t head = 0, tail = 1, k
    cdef i64 u, v, du
    order[0] = source
    dist[source] = 0
    while head < tail:
        u = order[head]
        head += 1
        du = dist[u]
        if radius >= 0 and du >= radius:
            continue
        for k in range(indptr[u], indptr[u + 1]):
            v = indices[k]
            if dist[v] < 0:
                dist[v] = du + 1
                order[tail] = v
                tail += 1
    return tail


def bounded_bfs(const i64[:] indptr, const i64[:] indices, i64 source, i64 radius):
    cdef Py_ssize_t n = indptr.shape[0] - 1, cnt, i
    dist = np.full(n, -1, dtype=np.int64)
    order = np.empty(n, dtype=np.int64)
    cdef i64[:] d = dist
    cdef i64[:] o = order
    cnt = _bfs(indptr, indices, source, radius, d, o)
    verts = order[:cnt].copy()
    return verts, dist[verts]


def ball_class_counts(const i64[:] indptr, const i64[:] indices, const i64[:] block_of,
                      i64 radius, const i64[:] sources):
    cdef Py_ssize_t n = indptr.shape[0] - 1, s, cnt, i, c
    cdef i64 b
    dist_a = np.full(n, -1, dtype=np.int64)
    order_a = np.empty(n, dtype=np.int64)
    nb = (np.max(block_of) + 1) if n else 0
    stamp_a = np.full(nb, -1, dtype=np.int64)
    out_a = np.zeros(sources.shape[0], dtype=np.int64)
    cdef i64[:] dist = dist_a
    cdef i64[:] order = order_a
    cdef i64[:] stamp = stamp_a
    cdef i64[:] out = out_a
    with nogil:
        for s in range(sources.shape[0]):
            cnt = _bfs(indptr, indices, sources[s], radius, dist, order)
            c = 0
            for i in range(cnt):
                b = block_of[order[i]]
                if stamp[b] != s:
                    stamp[b] = s
                    c += 1
                dist[order[i]] = -1
            out[s] = c
    return out_a


def block_diameters(const i64[:] indptr, const i64[:] indices, const i64[:] block_of,
                    const i64[:] block_size, i64 cutoff):
    cdef Py_ssize_t n = indptr.shape[0] - 1, x, head, tail, k, i
    cdef i64 b, need, found, far, u, v, du
    diam_a = np.zeros(block_size.shape[0], dtype=np.int64)
    dist_a = np.full(n, -1, dtype=np.int64)
    order_a = np.empty(n, dtype=np.int64)
    cdef i64[:] diam = diam_a
    cdef i64[:] dist = dist_a
    cdef i64[:] order = order_a
    for x in range(n):
        b = block_of[x]
        if diam[b] > cutoff:
            continue
        need = block_size[b] - 1
        if need == 0:
            continue
        found = 0
        far = 0
        head = 0
        tail = 1
        order[0] = x
        dist[x] = 0
        while head < tail and found < need:
            u = order[head]
            head += 1
            du = dist[u]
            if du >= cutoff:
                break
            for k in range(indptr[u], indptr[u + 1]):
                v = indices[k]
                if dist[v] < 0:
                    dist[v] = du + 1
                    order[tail] = v
                    tail += 1
                    if block_of[v] == b:
                        found += 1
                        far = du + 1
        for i in range(tail):
            dist[order[i]] = -1
        if found < need:
            diam[b] = cutoff + 1
        elif far > diam[b]:
            diam[b] = far
    return diam_a


cdef i64 _l1num(i64 mx, i64 my, const i64[:] m_indptr, const i64[:] m_support,
                const i64[:] m_wptr, const i64[:] m_weights, const i64[:] m_denom) nogil:
    cdef i64 i = m_indptr[mx], ie = m_indptr[mx + 1]
    cdef i64 j = m_indptr[my], je = m_indptr[my + 1]
    cdef i64 wi0 = m_wptr[mx], wj0 = m_wptr[my]
    cdef bint ux = m_wptr[mx + 1] == wi0, uy = m_wptr[my + 1] == wj0
    cdef i64 dx = m_denom[mx], dy = m_denom[my]
    cdef i64 total = 0, a, c, wa, wc, diff
    cdef i64 i0 = i, j0 = j
    while i < ie and j < je:
        a = m_support[i]
        c = m_support[j]
        if a == c:
            wa = 1 if ux else m_weights[wi0 + i - i0]
            wc = 1 if uy else m_weights[wj0 + j - j0]
            diff = wa * dy - wc * dx
            total += diff if diff >= 0 else -diff
            i += 1
            j += 1
        elif a < c:
            wa = 1 if ux else m_weights[wi0 + i - i0]
            total += wa * dy
            i += 1
        else:
            wc = 1 if uy else m_weights[wj0 + j - j0]
            total += wc * dx
            j += 1
    while i < ie:
        wa = 1 if ux else m_weights[wi0 + i - i0]
        total += wa * dy
        i += 1
    while j < je:
        wc = 1 if uy else m_weights[wj0 + j - j0]
        total += wc * dx
        j += 1
    return total


def l1_numerator(i64 mx, i64 my, const i64[:] m_indptr, const i64[:] m_support,
                 const i64[:] m_wptr, const i64[:] m_weights, const i64[:] m_denom):
    return int(_l1num(mx, my, m_indptr, m_support, m_wptr, m_weights, m_denom))


def max_defect(const i64[:] indptr, const i64[:] indices, i64 radius,
               const i64[:] m_indptr, const i64[:] m_support, const i64[:] m_wptr,
               const i64[:] m_weights, const i64[:] m_denom, const i64[:] measure_of,
               const i64[:] sources):
    cdef Py_ssize_t n = indptr.shape[0] - 1, s, cnt, i
    cdef i64 x, y, mx, my, num, den
    cdef double best = -1.0, val
    dist_a = np.full(n, -1, dtype=np.int64)
    order_a = np.empty(n, dtype=np.int64)
    cdef i64[:] dist = dist_a
    cdef i64[:] order = order_a
    cand = []
    for s in range(sources.shape[0]):
        x = sources[s]
        mx = measure_of[x]
        cnt = _bfs(indptr, indices, x, radius, dist, order)
        for i in range(cnt):
            dist[order[i]] = -1
        for i in range(1, cnt):
            y = order[i]
            if y < x or measure_of[y] == mx:
                continue
            my = measure_of[y]
            num = _l1num(mx, my, m_indptr, m_support, m_wptr, m_weights, m_denom)
            den = m_denom[mx] * m_denom[my]
            val = <double>num / <double>den
            if val > best * (1 + 1e-9):
                best = val
                cand = [c for c in cand if c[4] >= best * (1 - 1e-9)]
            if val >= best * (1 - 1e-9):
                cand.append((x, y, num, den, val))
    return (np.array([c[0] for c in cand], dtype=np.int64),
            np.array([c[1] for c in cand], dtype=np.int64),
            np.array([c[2] for c in cand], dtype=np.int64),
            np.array([c[3] for c in cand], dtype=np.int64))


def side_mass(const i64[:] indptr, const i64[:] indices, const i64[:] tin,
              const i64[:] tout, const i64[:] parent, const i64[:] m_indptr,
              const i64[:] m_support, const i64[:] m_wptr, const i64[:] m_weights,
              const i64[:] measure_of):
    cdef Py_ssize_t n = indptr.shape[0] - 1, x, k, p
    cdef i64 m, y, lo, hi, t, acc, total, w, w0
    cdef bint uni, inv
    out_a = np.zeros(indices.shape[0], dtype=np.int64)
    cdef i64[:] out = out_a
    for x in range(n):
        m = measure_of[x]
        w0 = m_wptr[m]
        uni = m_wptr[m + 1] == w0
        total = 0
        for p in range(m_indptr[m], m_indptr[m + 1]):
            total += 1 if uni else m_weights[w0 + p - m_indptr[m]]
        for k in range(indptr[x], indptr[x + 1]):
            y = indices[k]
            if y == parent[x]:
                lo = tin[x]
                hi = tout[x]
                inv = False
            else:
                lo = tin[y]
                hi = tout[y]
                inv = True
            acc = 0
            for p in range(m_indptr[m], m_indptr[m + 1]):
                t = tin[m_support[p]]
                if lo <= t < hi:
                    acc += 1 if uni else m_weights[w0 + p - m_indptr[m]]
            out[k] = total - acc if inv else acc
    return out_a
