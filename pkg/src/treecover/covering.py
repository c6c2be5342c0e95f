"""Sparse edge deletion, orientation completion and bounded covers of forests."""

from __future__ import annotations

import json
import math
import random
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from ._accel import kernels, worker_count
from .errors import (
    AnchorConflict,
    ConditionFailure,
    DegreeBound,
    IncompletePartition,
    InsufficientInvariance,
    NotFunctionalGraph,
    NotNested,
)
from .graph import EquivPartition, Graph, as_rational, hop_limit
from .mass import MassAssignment, invariance_defect
from .orientation import (
    MAX_DEFECT,
    OrientedPartition,
    ThetaTable,
    check_conditions,
    partition_and_orient,
    theta_dfs,
)


def _frac(r) -> str:
    r = Fraction(r)
    return str(r.numerator) if r.denominator == 1 else f"{r.numerator}/{r.denominator}"


@dataclass(frozen=True)
class DeletionSet:
    r: Fraction
    Q: frozenset
    Q0: frozenset

    def to_json(self) -> dict:
        return {
            "r": _frac(self.r),
            "Q": [list(e) for e in sorted(self.Q)],
            "Q0": [list(e) for e in sorted(self.Q0)],
        }

    @classmethod
    def from_json(cls, data) -> "DeletionSet":
        if isinstance(data, (str, bytes)):
            data = json.loads(data)
        return cls(
            as_rational(data["r"]),
            frozenset(tuple(e) for e in data["Q"]),
            frozenset(tuple(e) for e in data["Q0"]),
        )


@dataclass
class CoverWitness:
    """Partition whose classes meet every ``r``-ball at most ``max_classes_met`` times."""

    r: Fraction
    partition: EquivPartition
    max_classes_met: int
    diameter_bound: Fraction

    def to_json(self) -> dict:
        return {
            "r": _frac(self.r),
            "vertices": self.partition.graph.n,
            "blocks": self.partition.blocks,
            "max_classes_met": int(self.max_classes_met),
            "diameter_bound": _frac(self.diameter_bound),
        }

    @classmethod
    def from_json(cls, data, graph: Graph) -> "CoverWitness":
        if isinstance(data, (str, bytes)):
            data = json.loads(data)
        if data.get("vertices", graph.n) != graph.n:
            raise IncompletePartition(
                f"witness is for {data['vertices']} vertices, graph has {graph.n}"
            )
        return cls(
            as_rational(data["r"]),
            EquivPartition.from_blocks(graph, data["blocks"]),
            int(data["max_classes_met"]),
            as_rational(data["diameter_bound"]),
        )


def classes_met(g: Graph, block_of, r, sources=None, workers=None):
    """Number of distinct blocks meeting ``B(x, r)`` for each source vertex.

    The sweep is split over ``workers`` threads (default from
    :func:`worker_count`); the compiled kernel runs without the GIL.
    """
    if sources is None:
        sources = np.arange(g.n, dtype=np.int64)
    sources = np.asarray(sources, dtype=np.int64)
    block_of = np.asarray(block_of, dtype=np.int64)
    lim = hop_limit(r)
    workers = worker_count() if workers is None else workers
    run = lambda chunk: kernels.ball_class_counts(g.indptr, g.indices, block_of, lim, chunk)
    if workers <= 1 or len(sources) < 2 * workers:
        return run(sources)
    chunks = np.array_split(sources, workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return np.concatenate(list(pool.map(run, chunks)))


def _leaf_distance(g: Graph):
    dist = np.full(g.n, -1, dtype=np.int64)
    queue = deque(sorted(g.leaves))
    for v in queue:
        dist[v] = 0
    while queue:
        u = queue.popleft()
        for v in g.neighbors(u):
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def choose_edges(g: Graph, r) -> DeletionSet:
    """Well-separated edges whose removal cuts long paths into short ones.

    Works on forests of maximum degree 2.  ``Q0`` is a greedy maximal set of
    edges of long components (more than ``4r + 6`` vertices) no two of which
    have endpoints within distance ``r``; ``Q`` keeps the edges of ``Q0``
    whose endpoints are at distance at least ``r`` from every leaf.
    """
    r = as_rational(r)
    if r <= 0:
        raise ValueError("radius must be positive")
    if g.max_degree > 2:
        raise DegreeBound(f"maximum degree {g.max_degree} exceeds 2")
    g.require_acyclic()
    bound = 4 * r + 6
    lim = hop_limit(r)
    long_comp = g.component_size > bound
    incident = {}
    for e in g.edges:
        if long_comp[g.component[e[0]]]:
            for v in e:
                incident.setdefault(v, []).append(e)
    blocked = set()
    q0 = []
    for e in g.edges:
        if not long_comp[g.component[e[0]]] or e in blocked:
            continue
        q0.append(e)
        for a in e:
            near, _ = kernels.bounded_bfs(g.indptr, g.indices, a, lim)
            for u in near.tolist():
                blocked.update(incident.get(u, ()))
    leaf_d = _leaf_distance(g)
    far = lambda v: leaf_d[v] < 0 or leaf_d[v] >= r
    q = [e for e in q0 if far(e[0]) and far(e[1])]
    return DeletionSet(r, frozenset(q), frozenset(q0))


def check_deletion(g: Graph, d: DeletionSet, separation=None) -> dict:
    """Brute-force check of the three guarantees of :func:`choose_edges`.

    ``separation`` (default ``d.r``) is the radius used for the pairwise
    spacing test, measured in ``g``.
    """
    r = d.r
    sep = r if separation is None else as_rational(separation)
    bound = 4 * r + 6
    report = {}
    rest = g.without_edges(d.Q)
    big = np.nonzero(rest.component_size > bound)[0]
    report["component_bound"] = {
        "ok": not len(big),
        "bound": _frac(bound),
        "max_component": int(rest.component_size.max()) if g.n else 0,
    }
    owner = {}
    for i, (u, v) in enumerate(sorted(d.Q)):
        owner[u] = owner.get(u, set()) | {i}
        owner[v] = owner.get(v, set()) | {i}
    close = []
    lim = hop_limit(sep)
    for a, mine in owner.items():
        near, dist = kernels.bounded_bfs(g.indptr, g.indices, a, lim)
        for b, dab in zip(near.tolist(), dist.tolist()):
            if b in owner and owner[b] - mine:
                close.append([a, b, dab])
    report["separation"] = {"ok": not close, "radius": _frac(sep), "counterexamples": close[:20]}
    leaves = g.leaves
    near_leaf = []
    strict = hop_limit(r, strict=True)
    for a in owner:
        if strict < 0:
            break
        near, dist = kernels.bounded_bfs(g.indptr, g.indices, a, strict)
        hit = [(b, dd) for b, dd in zip(near.tolist(), dist.tolist()) if b in leaves]
        if hit:
            near_leaf.append([a, hit[0][0], hit[0][1]])
    report["leaf_distance"] = {"ok": not near_leaf, "counterexamples": near_leaf[:20]}
    outside = [list(e) for e in d.Q if g.component_size[g.component[e[0]]] <= bound]
    report["inside_long_components"] = {"ok": not outside, "counterexamples": outside[:20]}
    report["ok"] = all(v["ok"] for v in report.values())
    return report


def complete_orientation(g: Graph, p: OrientedPartition, d: DeletionSet):
    """Orient ``R1 \\ Q`` towards one anchor per component and merge with the R0 arrows.

    Returns ``(arrows, f)`` where ``f[x]`` is the head of the arrow leaving
    ``x``, or ``x`` itself when no arrow leaves it.
    """
    g2 = Graph(g.n, set(p.R1) - set(d.Q))
    out = p.out_degree()
    arrows = set(p.arrows)
    for comp in g2.components():
        if len(comp) < 2:
            continue
        emitters = [v for v in comp if out[v] == 1]
        if len(emitters) > 1:
            raise AnchorConflict(comp[0], emitters)
        anchor = emitters[0] if emitters else comp[0]
        depth = g2.distances(anchor)
        for v in comp:
            if v == anchor:
                continue
            # in a tree exactly one neighbor is closer to the anchor
            up = [u for u in g2.neighbors(v) if depth[u] < depth[v]]
            arrows.add((v, up[0]))
    f = np.arange(g.n, dtype=np.int64)
    for x, y in arrows:
        if f[x] != x:
            raise AnchorConflict(x, [x])
        f[x] = y
    return frozenset(arrows), f


def _check_functional(g: Graph, f):
    f = np.asarray(f, dtype=np.int64)
    if f.shape != (g.n,) or (g.n and (f.min() < 0 or f.max() >= g.n)):
        raise NotFunctionalGraph("f must map every vertex to a vertex")
    moved = np.nonzero(f != np.arange(g.n))[0]
    rf = {(min(x, int(f[x])), max(x, int(f[x]))) for x in moved.tolist()}
    if rf != set(g.edges) or len(moved) != len(rf):
        raise NotFunctionalGraph("edges of f differ from the edges of the graph")
    return f


def annulus_bound(r) -> int:
    """A priori diameter bound of the classes built by :func:`functional_cover`."""
    k = hop_limit(r)
    return 0 if k == 0 else 6 * k - 2


def functional_cover(g: Graph, f, r) -> CoverWitness:
    """Cover of a forest given as the graph of a map ``f`` (one fixed point per tree).

    Depth is the number of ``f``-steps to the fixed point.  With ``k = floor(r)``
    the first band holds depths ``0..2k``; later bands have width ``2k`` and
    split by the ancestor sitting ``k`` levels above the band's top.  Every
    ``r``-ball meets at most two classes; diameters stay below
    :func:`annulus_bound`.
    """
    r = as_rational(r)
    g.require_acyclic()
    f = _check_functional(g, f)
    k = hop_limit(r)
    n = g.n
    depth = np.full(n, -1, dtype=np.int64)
    children = {}
    for x in range(n):
        if f[x] != x:
            children.setdefault(int(f[x]), []).append(x)
    roots = np.nonzero(f == np.arange(n))[0].tolist()
    for root in roots:
        depth[root] = 0
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for c in children.get(u, ()):
                depth[c] = depth[u] + 1
                queue.append(c)
    if n and depth.min() < 0:
        raise NotFunctionalGraph(f"no fixed point in the tree of {int(np.argmin(depth))}")
    if k == 0:
        block_of = np.arange(n, dtype=np.int64)
    else:
        first = 2 * k + 1
        block_of = np.empty(n, dtype=np.int64)
        for x in range(n):
            dx = int(depth[x])
            if dx < first:
                steps = dx
            else:
                band_top = first + ((dx - first) // (2 * k)) * (2 * k)
                steps = dx - (band_top - k)
            a = x
            for _ in range(steps):
                a = int(f[a])
            # the reference vertex alone identifies the class (depths differ per band)
            block_of[x] = a
    part = EquivPartition(g, block_of)
    met = int(classes_met(g, part.block_of, r).max()) if n else 0
    return CoverWitness(r, part, met, Fraction(annulus_bound(r)))


def verify_cover(g: Graph, w: CoverWitness, max_classes=None, sample=None, seed=None,
                 workers=None) -> dict:
    """Independent brute-force check of a cover witness.

    Recomputes every class diameter (up to the claimed bound) and the number
    of classes meeting each ball.  ``sample`` checks that many balls chosen
    with ``seed`` instead of all of them.
    """
    part = w.partition
    if part.graph.n != g.n:
        raise IncompletePartition("witness and graph disagree on the vertex count")
    cutoff = math.floor(w.diameter_bound)
    diam = part.block_diameters(cutoff=cutoff)
    too_wide = [
        {"block": i, "first_vertex": int(np.nonzero(part.block_of == i)[0][0])}
        for i in np.nonzero(diam > cutoff)[0].tolist()
    ]
    if sample is not None and sample < g.n:
        if seed is None:
            raise ValueError("sampled verification needs a seed")
        sources = np.array(sorted(random.Random(seed).sample(range(g.n), sample)), dtype=np.int64)
        mode = "sampled"
    else:
        sources = np.arange(g.n, dtype=np.int64)
        mode = "exhaustive"
    counts = classes_met(g, part.block_of, w.r, sources, workers)
    observed = int(counts.max()) if len(counts) else 0
    limit = w.max_classes_met if max_classes is None else min(w.max_classes_met, max_classes)
    crowded = [
        {"vertex": int(x), "classes": int(c)} for x, c in zip(sources, counts) if c > limit
    ]
    within = [int(d) for d in diam if d <= cutoff]
    report = {
        "ok": not too_wide and not crowded,
        "mode": mode,
        "seed": seed,
        "balls_checked": int(len(sources)),
        "r": _frac(w.r),
        "classes": len(part),
        "claimed_max_classes_met": int(w.max_classes_met),
        "observed_max_classes_met": observed,
        "diameter_bound": _frac(w.diameter_bound),
        "observed_max_diameter": max(within, default=0) if not too_wide else None,
        "ball_violations": crowded[:50],
        "diameter_violations": too_wide[:50],
    }
    return report


@dataclass
class PipelineResult:
    r: Fraction
    defect: Fraction
    defect_radius: int
    theta: ThetaTable
    partition: OrientedPartition
    conditions: dict
    deletion: DeletionSet
    deletion_report: dict
    arrows: frozenset
    f: np.ndarray
    inner_cover: CoverWitness
    separation: dict
    witness: CoverWitness
    stages: dict = field(default_factory=dict)


def required_defect_radius(r) -> int:
    """Strict radius for :func:`invariance_defect` covering all pairs the pipeline compares.

    The cover at ``r`` deletes edges at ``s = 2r`` and needs the orientation
    conditions at ``4s + 6``; the mass comparisons reach distance ``4s + 8``.
    """
    s = 2 * as_rational(r)
    return hop_limit(4 * s + 6 + 2) + 1


def geodesic_via_f(f, x0, x1):
    """``min{n + m : f^n(x0) = f^m(x1)}``, or ``None`` if the orbits never meet."""
    seen = {}
    a, steps = x0, 0
    while a not in seen:
        seen[a] = steps
        if f[a] == a:
            break
        a, steps = int(f[a]), steps + 1
    best = None
    b, steps = x1, 0
    visited = set()
    while b not in visited:
        visited.add(b)
        if b in seen:
            cand = seen[b] + steps
            best = cand if best is None else min(best, cand)
        if f[b] == b:
            break
        b, steps = int(f[b]), steps + 1
    return best


def _separation_check(g: Graph, g0: Graph, f, q, s) -> dict:
    """Endpoints of distinct deleted edges must be more than ``s`` apart in ``g``.

    Pairs inside one tree of ``g0`` are also checked against the ``f``-orbit
    formula for their distance.
    """
    lim = hop_limit(s)
    owner = {}
    for i, (u, v) in enumerate(sorted(q)):
        owner.setdefault(u, set()).add(i)
        owner.setdefault(v, set()).add(i)
    close, mismatch, pairs = [], [], 0
    for a, mine in owner.items():
        near, dist = kernels.bounded_bfs(g.indptr, g.indices, a, lim)
        for b, dab in zip(near.tolist(), dist.tolist()):
            if b in owner and owner[b] - mine:
                close.append([a, b, dab])
    ends = sorted(owner)
    for i, a in enumerate(ends):
        da = None
        for b in ends[i + 1:]:
            if g0.component[a] != g0.component[b] or not owner[b] - owner[a]:
                continue
            if da is None:
                da = g0.distances(a)
            pairs += 1
            via_f = geodesic_via_f(f, a, b)
            if via_f != da[b]:
                mismatch.append([a, b, da[b], via_f])
    return {
        "ok": not close and not mismatch,
        "radius": _frac(s),
        "close_pairs": close[:20],
        "geodesic_pairs_checked": pairs,
        "geodesic_mismatches": mismatch[:20],
    }


def run_pipeline(g: Graph, lam: MassAssignment, r, check_defect=True) -> PipelineResult:
    """All stages from mass assignment to a 4-class cover at radius ``r``."""
    r = as_rational(r)
    if r <= 0:
        raise ValueError("radius must be positive")
    g.require_acyclic()
    lam.check_supported(g)
    s = 2 * r
    scale = 4 * s + 6
    rad = required_defect_radius(r)
    eps = invariance_defect(g, lam, rad) if check_defect else None
    if eps is not None and eps >= MAX_DEFECT:
        raise InsufficientInvariance(eps, MAX_DEFECT, rad)
    theta = theta_dfs(g, lam)
    part = partition_and_orient(g, theta)
    cond = check_conditions(g, part, scale)
    if not cond["ok"]:
        raise ConditionFailure(cond)
    g1 = Graph(g.n, part.R1)
    deletion = choose_edges(g1, s) if g1.edges else DeletionSet(s, frozenset(), frozenset())
    del_report = check_deletion(g1, deletion)
    arrows, f = complete_orientation(g, part, deletion)
    g0 = g.without_edges(deletion.Q)
    inner = functional_cover(g0, f, s)
    sep = _separation_check(g, g0, f, deletion.Q, s)
    block_of = inner.partition.block_of
    final = EquivPartition(g, block_of)
    met = int(classes_met(g, final.block_of, r).max()) if g.n else 0
    witness = CoverWitness(r, final, met, inner.diameter_bound)
    return PipelineResult(
        r=r, defect=eps, defect_radius=rad, theta=theta, partition=part, conditions=cond,
        deletion=deletion, deletion_report=del_report, arrows=arrows, f=f,
        inner_cover=inner, separation=sep, witness=witness,
    )


def asdim_cover(g: Graph, lam: MassAssignment, r) -> CoverWitness:
    """Cover of an acyclic graph whose classes meet each ``r``-ball at most 4 times."""
    return run_pipeline(g, lam, r).witness


def nested_union_check(graphs, lam=None, r=None, pairs=None, seed=0) -> dict:
    """Check an increasing family of graphs on one vertex set.

    Verifies edge containment and ``d_{n+1} <= d_n`` (on all pairs, or on
    ``pairs`` random pairs per level drawn with ``seed``), optionally runs the
    cover pipeline per level, and returns the chain of component partitions.
    """
    graphs = list(graphs)
    if not graphs:
        raise ValueError("need at least one graph")
    n = graphs[0].n
    for i, (a, b) in enumerate(zip(graphs, graphs[1:])):
        if b.n != n or not set(a.edges) <= set(b.edges):
            raise NotNested(f"level {i} is not contained in level {i + 1}")
    rng = random.Random(seed)
    levels = []
    for i, (a, b) in enumerate(zip(graphs, graphs[1:])):
        bad = []
        if pairs is None:
            checked = 0
            for x in range(n):
                da, db = a.distances(x), b.distances(x)
                for y, d in da.items():
                    checked += 1
                    if db.get(y, math.inf) > d:
                        bad.append([x, y])
        else:
            checked = pairs
            sources = {}
            for _ in range(pairs):
                x, y = rng.randrange(n), rng.randrange(n)
                sources.setdefault(x, []).append(y)
            for x, ys in sources.items():
                da, db = a.distances(x), b.distances(x)
                for y in ys:
                    if db.get(y, math.inf) > da.get(y, math.inf):
                        bad.append([x, y])
        levels.append({"level": i, "pairs_checked": checked, "ok": not bad,
                       "counterexamples": bad[:20]})
    chain = [EquivPartition(g, g.component) for g in graphs]
    refining = all(p.refines(q) for p, q in zip(chain, chain[1:]))
    covers = []
    if lam is not None and r is not None:
        for i, g in enumerate(graphs):
            if not g.is_acyclic():
                covers.append({"level": i, "skipped": "cyclic"})
                continue
            w = asdim_cover(g, lam, r)
            covers.append({"level": i, **verify_cover(g, w, max_classes=4)})
    return {
        "ok": all(lv["ok"] for lv in levels) and refining
              and all(c.get("ok", True) for c in covers),
        "levels": levels,
        "chain_refining": refining,
        "chain": [len(p) for p in chain],
        "covers": covers,
    }
