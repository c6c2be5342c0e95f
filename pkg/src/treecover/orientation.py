"""Subtree masses on forests and the threshold orientation built from them."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ._accel import kernels
from .errors import DichotomyViolation, NotAcyclic, NotAnEdge
from .graph import Graph, as_rational
from .mass import MassAssignment

LOW = Fraction(5, 12)
HIGH = Fraction(7, 12)
MAX_DEFECT = Fraction(1, 12)


def _key(x, y):
    return f"{x}->{y}"


class ThetaTable:
    """``theta0(x, y) = lambda_x(side of x)``, ``theta1(x, y) = lambda_y(side of y)``.

    Stored once per directed edge as ``theta0``; ``theta1(x, y)`` is ``theta0(y, x)``.
    """

    def __init__(self, theta0: dict):
        self._t0 = dict(theta0)

    def theta0(self, x, y) -> Fraction:
        return self._t0[(x, y)]

    def theta1(self, x, y) -> Fraction:
        return self._t0[(y, x)]

    def __getitem__(self, xy):
        x, y = xy
        return self._t0[(x, y)], self._t0[(y, x)]

    def __contains__(self, xy):
        return tuple(xy) in self._t0

    def __len__(self):
        return len(self._t0)

    def __eq__(self, other):
        return isinstance(other, ThetaTable) and self._t0 == other._t0

    def directed_edges(self):
        return sorted(self._t0)

    def to_json(self) -> dict:
        return {
            _key(x, y): [str(self._t0[(x, y)]), str(self._t0[(y, x)])]
            for x, y in self.directed_edges()
        }

    @classmethod
    def from_json(cls, data) -> "ThetaTable":
        if isinstance(data, (str, bytes)):
            data = json.loads(data)
        t0 = {}
        for key, (a, _) in data.items():
            x, y = (int(v) for v in key.split("->"))
            t0[(x, y)] = as_rational(a)
        return cls(t0)


def euler_forest(g: Graph):
    """DFS forest rooted at each component's minimum vertex.

    Returns ``(tin, tout, parent)``; ``z`` is in the subtree of ``v`` iff
    ``tin[v] <= tin[z] < tout[v]``.
    """
    n = g.n
    tin = np.full(n, -1, dtype=np.int64)
    tout = np.zeros(n, dtype=np.int64)
    parent = np.full(n, -1, dtype=np.int64)
    indptr, indices = g.indptr, g.indices
    clock = 0
    for root in range(n):
        if tin[root] >= 0:
            continue
        tin[root] = clock
        clock += 1
        stack = [(root, int(indptr[root]))]
        while stack:
            v, k = stack[-1]
            if k < indptr[v + 1]:
                stack[-1] = (v, k + 1)
                w = int(indices[k])
                if w == parent[v]:
                    continue
                if tin[w] >= 0:
                    raise NotAcyclic(f"cycle through edge ({v}, {w})")
                parent[w] = v
                tin[w] = clock
                clock += 1
                stack.append((w, int(indptr[w])))
            else:
                tout[v] = clock
                stack.pop()
    return tin, tout, parent


def theta_dfs(g: Graph, lam: MassAssignment) -> ThetaTable:
    """Theta table from one rooted traversal per component."""
    g.require_acyclic()
    lam.check_supported(g)
    tin, tout, parent = euler_forest(g)
    src = np.repeat(np.arange(g.n), np.diff(g.indptr))
    if lam.fits_kernels:
        side = kernels.side_mass(
            g.indptr, g.indices, tin, tout, parent, lam.m_indptr, lam.m_support,
            lam.m_wptr, lam.m_weights, lam.measure_of,
        )
        denom = lam.m_denom[lam.measure_of]
        t0 = {
            (x, y): Fraction(int(s), int(denom[x]))
            for x, y, s in zip(src.tolist(), g.indices.tolist(), side.tolist())
        }
        return ThetaTable(t0)
    t0 = {}
    for x, y in zip(src.tolist(), g.indices.tolist()):
        vec = lam.vector(x)
        if y == parent[x]:
            lo, hi, inside = tin[x], tout[x], True
        else:
            lo, hi, inside = tin[y], tout[y], False
        sub = sum((p for z, p in vec.items() if lo <= tin[z] < hi), Fraction(0))
        t0[(x, y)] = sub if inside else 1 - sub
    return ThetaTable(t0)


def theta_iterative_oracle(g: Graph, lam: MassAssignment, enumeration=None) -> ThetaTable:
    """Theta table by the running-sum recursion over an enumeration of each class.

    ``enumeration(x)`` lists the component of ``x`` (repeats allowed); the
    sum for ``(x, y)`` adds ``lambda_x(z)`` for each newly seen ``z`` closer
    to ``x`` than to ``y``.  Default enumeration: increasing vertex id.
    """
    g.require_acyclic()
    comps = {}
    for c, v in zip(g.component.tolist(), range(g.n)):
        comps.setdefault(c, []).append(v)
    if enumeration is None:
        enumeration = lambda x: comps[g.component[x]]
    dist = {}

    def d(v):
        if v not in dist:
            dist[v] = g.distances(v)
        return dist[v]

    t0 = {}
    for x, y in ((x, y) for x in range(g.n) for y in g.neighbors(x)):
        vec = lam.vector(x)
        dx, dy = d(x), d(y)
        seen = set()
        w = Fraction(0)
        for z in enumeration(x):
            if z in seen:
                continue
            seen.add(z)
            if dx[z] < dy[z]:
                w += vec.get(z, 0)
        if len(seen) != len(dx):
            raise ValueError(f"enumeration of {x} misses part of its component")
        t0[(x, y)] = w
    return ThetaTable(t0)


@dataclass(frozen=True)
class OrientedPartition:
    """Edges split into ``R0`` (each carrying one arrow) and unoriented ``R1``."""

    n: int
    R0: frozenset
    R1: frozenset
    arrows: frozenset

    def __post_init__(self):
        norm = lambda es: frozenset((min(u, v), max(u, v)) for u, v in es)
        object.__setattr__(self, "R0", norm(self.R0))
        object.__setattr__(self, "R1", norm(self.R1))
        object.__setattr__(self, "arrows", frozenset((int(x), int(y)) for x, y in self.arrows))
        if self.R0 & self.R1:
            raise ValueError(f"R0 and R1 share edges: {sorted(self.R0 & self.R1)[:5]}")
        for x, y in self.arrows:
            if (y, x) in self.arrows:
                raise ValueError(f"arrows ({x}, {y}) and ({y}, {x}) both present")
            if (min(x, y), max(x, y)) not in self.R0:
                raise ValueError(f"arrow ({x}, {y}) is not an R0 edge")
        if len(self.arrows) != len(self.R0):
            raise ValueError("every R0 edge needs exactly one arrow")

    def out_degree(self):
        out = np.zeros(self.n, dtype=np.int64)
        for x, _ in self.arrows:
            out[x] += 1
        return out

    def to_json(self) -> dict:
        return {
            "vertices": self.n,
            "R0": [list(e) for e in sorted(self.R0)],
            "R1": [list(e) for e in sorted(self.R1)],
            "arrows": [list(a) for a in sorted(self.arrows)],
        }

    @classmethod
    def from_json(cls, data) -> "OrientedPartition":
        if isinstance(data, (str, bytes)):
            data = json.loads(data)
        return cls(
            data["vertices"],
            frozenset(map(tuple, data["R0"])),
            frozenset(map(tuple, data["R1"])),
            frozenset(map(tuple, data["arrows"])),
        )

    def to_dot(self, name="P") -> str:
        lines = [f"digraph {name} {{"]
        used = {v for e in self.R0 | self.R1 for v in e}
        lines += [f"  {v};" for v in range(self.n) if v not in used]
        lines += [f"  {x} -> {y};" for x, y in sorted(self.arrows)]
        lines += [f"  {u} -> {v} [dir=none, style=dashed];" for u, v in sorted(self.R1)]
        lines.append("}")
        return "\n".join(lines) + "\n"


def partition_and_orient(g: Graph, theta: ThetaTable) -> OrientedPartition:
    """Split edges by the ``[5/12, 7/12]`` window and orient the outer ones.

    An edge goes to R0 when both theta values avoid the closed window; its
    arrow points from the light side to the heavy side.  Boundary values stay
    in R1.
    """
    R0, R1, arrows = set(), set(), set()
    for x, y in g.edges:
        if (x, y) not in theta or (y, x) not in theta:
            raise NotAnEdge(f"theta table has no entry for edge ({x}, {y})")
        t0, t1 = theta[x, y]
        if LOW <= t0 <= HIGH or LOW <= t1 <= HIGH:
            R1.add((x, y))
            continue
        R0.add((x, y))
        if t0 < LOW and t1 > HIGH:
            arrows.add((x, y))
        elif t0 > HIGH and t1 < LOW:
            arrows.add((y, x))
        else:
            raise DichotomyViolation((x, y), t0, t1)
    return OrientedPartition(g.n, frozenset(R0), frozenset(R1), frozenset(arrows))


def check_conditions(g: Graph, p: OrientedPartition, r) -> dict:
    """Check the five structural conditions; every failure carries counterexamples.

    C1 ``R0`` and ``R1`` partition the edges; C2 arrow out-degree at most 1;
    C3 ``deg_G1 + out-degree <= 2``; C4 ``G1`` acyclic; C5 every nontrivial
    ``G1`` component whose leaves all emit an arrow has more than ``r`` vertices.
    """
    r = as_rational(r)
    edges = set(g.edges)
    out = p.out_degree()
    g1 = Graph(g.n, p.R1)
    report = {}

    missing = sorted(edges - (p.R0 | p.R1))
    extra = sorted((p.R0 | p.R1) - edges)
    report["C1"] = {"ok": not missing and not extra,
                    "counterexamples": [list(e) for e in (missing + extra)[:20]]}

    bad = np.nonzero(out > 1)[0].tolist()
    report["C2"] = {"ok": not bad, "counterexamples": bad[:20]}

    bad = np.nonzero(g1.degree + out > 2)[0].tolist()
    report["C3"] = {"ok": not bad, "counterexamples": bad[:20]}

    cyc = np.nonzero(g1.component_edges != g1.component_size - 1)[0]
    cyc_v = [int(np.nonzero(g1.component == c)[0][0]) for c in cyc[:20]]
    report["C4"] = {"ok": not len(cyc), "counterexamples": cyc_v}

    bad = []
    leaves_by_comp = {}
    for v in g1.leaves:
        leaves_by_comp.setdefault(int(g1.component[v]), []).append(v)
    checked = 0
    for c, leaves in leaves_by_comp.items():
        size = int(g1.component_size[c])
        if size > 1 and all(out[v] == 1 for v in leaves):
            checked += 1
            if not size > r:
                bad.append({"leaves": sorted(leaves), "size": size})
    report["C5"] = {"ok": not bad, "counterexamples": bad[:20], "premise_met": checked,
                    "radius": str(r)}
    report["ok"] = all(report[k]["ok"] for k in ("C1", "C2", "C3", "C4", "C5"))
    return report
