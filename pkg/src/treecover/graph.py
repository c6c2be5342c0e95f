"""Finite graph model: construction, path metric, balls, components, leaves."""

from __future__ import annotations

import json
import math
from fractions import Fraction
from functools import cached_property, lru_cache
from numbers import Rational

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from ._accel import kernels
from .errors import IncompletePartition, InvalidEdge, InvalidVertex, NotAcyclic, NotAnEdge


def as_rational(r) -> Fraction:
    """Parse a radius or mass given as int, Fraction or ``"p/q"`` string."""
    if isinstance(r, Fraction):
        return r
    if isinstance(r, (int, Rational)):
        return Fraction(r)
    if isinstance(r, str):
        return Fraction(r.strip())
    if isinstance(r, float):
        return Fraction(r).limit_denominator(10**9)
    raise TypeError(f"not a rational: {r!r}")


def hop_limit(r, strict=False) -> int:
    """Largest integer distance ``d`` with ``d <= r`` (or ``d < r`` if strict)."""
    r = as_rational(r)
    if strict:
        return math.ceil(r) - 1
    return math.floor(r)


class Graph:
    """Immutable simple graph on vertices ``0..n-1``.

    Edges are stored once as ``(u, v)`` with ``u < v``; adjacency is kept in
    CSR arrays with sorted neighbor lists.
    """

    def __init__(self, vertex_count: int, edges=()):
        if vertex_count < 0:
            raise InvalidVertex(f"negative vertex count {vertex_count}")
        n = int(vertex_count)
        norm = set()
        for e in edges:
            u, v = (int(t) for t in e)
            for w in (u, v):
                if not 0 <= w < n:
                    raise InvalidVertex(f"vertex {w} not in range 0..{n - 1}")
            if u == v:
                raise InvalidEdge(f"self-loop at {u}")
            norm.add((u, v) if u < v else (v, u))
        self.n = n
        self.edges = tuple(sorted(norm))
        m = len(self.edges)
        if m:
            ends = np.array(self.edges, dtype=np.int64)
            src = np.concatenate([ends[:, 0], ends[:, 1]])
            dst = np.concatenate([ends[:, 1], ends[:, 0]])
        else:
            src = dst = np.zeros(0, dtype=np.int64)
        order = np.lexsort((dst, src))
        self.indices = np.ascontiguousarray(dst[order], dtype=np.int64)
        counts = np.bincount(src, minlength=n)
        self.indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(counts, out=self.indptr[1:])
        self.degree = counts.astype(np.int64)
        self.max_degree = int(counts.max()) if n else 0
        if n:
            adj = csr_matrix(
                (np.ones(len(self.indices), dtype=np.int8), self.indices, self.indptr),
                shape=(n, n),
            )
            ncomp, labels = connected_components(adj, directed=False)
        else:
            ncomp, labels = 0, np.zeros(0, dtype=np.int64)
        self.n_components = int(ncomp)
        self.component = labels.astype(np.int64)
        self.component_size = np.bincount(self.component, minlength=ncomp).astype(np.int64)
        edge_comp = self.component[src[: m]] if m else np.zeros(0, dtype=np.int64)
        self.component_edges = np.bincount(edge_comp, minlength=ncomp).astype(np.int64)

    def __repr__(self):
        return f"Graph(n={self.n}, edges={len(self.edges)})"

    def __eq__(self, other):
        return isinstance(other, Graph) and self.n == other.n and self.edges == other.edges

    def __hash__(self):
        return hash((self.n, self.edges))

    def neighbors(self, x: int):
        return tuple(int(v) for v in self.indices[self.indptr[x]:self.indptr[x + 1]])

    def has_edge(self, x: int, y: int) -> bool:
        lo, hi = self.indptr[x], self.indptr[x + 1]
        k = np.searchsorted(self.indices[lo:hi], y)
        return bool(k < hi - lo and self.indices[lo + k] == y)

    def check_vertex(self, x):
        if not 0 <= x < self.n:
            raise InvalidVertex(f"vertex {x} not in range 0..{self.n - 1}")

    def component_acyclic(self, c: int) -> bool:
        return self.component_edges[c] == self.component_size[c] - 1

    def is_acyclic(self) -> bool:
        return bool(np.all(self.component_edges == self.component_size - 1))

    def require_acyclic(self):
        bad = np.nonzero(self.component_edges != self.component_size - 1)[0]
        if len(bad):
            x = int(np.nonzero(self.component == bad[0])[0][0])
            raise NotAcyclic(f"component of vertex {x} contains a cycle")

    def components(self):
        """Vertex lists of all components, ordered by their minimum vertex."""
        order = np.argsort(self.component, kind="stable")
        bounds = np.cumsum(self.component_size)[:-1]
        groups = np.split(order, bounds) if self.n else []
        return sorted((g.tolist() for g in groups), key=lambda g: g[0])

    @cached_property
    def leaves(self) -> frozenset:
        return frozenset(np.nonzero(self.degree == 1)[0].tolist())

    def without_edges(self, removed) -> "Graph":
        removed = {(min(u, v), max(u, v)) for u, v in removed}
        return Graph(self.n, [e for e in self.edges if e not in removed])

    def distances(self, x: int, radius=None) -> dict:
        """Hop distances from ``x`` to every vertex within ``radius`` (default: all)."""
        self.check_vertex(x)
        lim = -1 if radius is None else hop_limit(radius)
        if lim < -1:
            return {}
        verts, dist = kernels.bounded_bfs(self.indptr, self.indices, x, lim)
        return dict(zip(verts.tolist(), dist.tolist()))

    def to_json(self) -> dict:
        return {"vertices": self.n, "edges": [list(e) for e in self.edges]}

    @classmethod
    def from_json(cls, data) -> "Graph":
        if isinstance(data, (str, bytes)):
            data = json.loads(data)
        return cls(data["vertices"], [tuple(e) for e in data["edges"]])

    def to_dot(self, name="G") -> str:
        lines = [f"graph {name} {{"]
        lines += [f"  {v};" for v in range(self.n) if self.degree[v] == 0]
        lines += [f"  {u} -- {v};" for u, v in self.edges]
        lines.append("}")
        return "\n".join(lines) + "\n"


class Metric:
    """Path metric of a graph; ``d(x, y)`` is ``math.inf`` across components."""

    def __init__(self, graph: Graph):
        self.graph = graph
        self._from = lru_cache(maxsize=4096)(self._bfs)

    def _bfs(self, x):
        return self.graph.distances(x)

    def d(self, x: int, y: int):
        g = self.graph
        g.check_vertex(x)
        g.check_vertex(y)
        if g.component[x] != g.component[y]:
            return math.inf
        return self._from(x)[y]

    def ball(self, x: int, r) -> frozenset:
        return frozenset(self.graph.distances(x, r))


def build_graph(vertex_count: int, edge_list) -> Graph:
    return Graph(vertex_count, edge_list)


def distance_and_ball(g: Graph, x: int, r):
    """Distances from ``x`` within its component and the closed ball ``B(x, r)``."""
    r = as_rational(r)
    if r < 0:
        raise ValueError("radius must be nonnegative")
    dist = g.distances(x)
    lim = hop_limit(r)
    return dist, frozenset(y for y, d in dist.items() if d <= lim)


def split_at_edge(g: Graph, x: int, y: int):
    """The two sides of the edge ``{x, y}`` in an acyclic component.

    ``side_x`` holds the vertices strictly closer to ``x`` than to ``y``.
    """
    g.check_vertex(x)
    g.check_vertex(y)
    if not g.has_edge(x, y):
        raise NotAnEdge(f"({x}, {y}) is not an edge")
    dx = g.distances(x)
    dy = g.distances(y)
    side_x = frozenset(z for z in dx if dx[z] < dy[z])
    side_y = frozenset(z for z in dy if dy[z] < dx[z])
    if len(side_x) + len(side_y) != len(dx):
        raise NotAcyclic(f"edge ({x}, {y}) lies on a cycle")
    # an edge on an even cycle still splits by distance; edge count exposes it
    if not g.component_acyclic(g.component[x]):
        raise NotAcyclic(f"component of {x} contains a cycle")
    return side_x, side_y


def components_and_leaves(g: Graph):
    return g.component.copy(), g.leaves, g.component_size.copy()


class EquivPartition:
    """Partition of the vertex set into blocks, each inside one component."""

    def __init__(self, graph: Graph, block_of):
        block_of = np.asarray(block_of, dtype=np.int64)
        if block_of.shape != (graph.n,):
            raise IncompletePartition(f"expected {graph.n} block labels, got {block_of.shape}")
        # relabel blocks by first appearance of their minimum vertex
        _, first, inv = np.unique(block_of, return_index=True, return_inverse=True)
        rank = np.empty(len(first), dtype=np.int64)
        rank[np.argsort(first, kind="stable")] = np.arange(len(first))
        self.graph = graph
        self.block_of = rank[inv.reshape(-1)]
        self.block_size = np.bincount(self.block_of, minlength=len(first)).astype(np.int64)
        comp_lo = np.full(len(first), graph.n, dtype=np.int64)
        comp_hi = np.full(len(first), -1, dtype=np.int64)
        np.minimum.at(comp_lo, self.block_of, graph.component)
        np.maximum.at(comp_hi, self.block_of, graph.component)
        self.spans_components = bool(np.any(comp_lo != comp_hi))

    @classmethod
    def from_blocks(cls, graph: Graph, blocks) -> "EquivPartition":
        block_of = np.full(graph.n, -1, dtype=np.int64)
        for i, block in enumerate(blocks):
            for v in block:
                if not 0 <= v < graph.n:
                    raise InvalidVertex(f"vertex {v} not in range 0..{graph.n - 1}")
                if block_of[v] >= 0:
                    raise IncompletePartition(f"vertex {v} appears in two blocks")
                block_of[v] = i
        missing = np.nonzero(block_of < 0)[0]
        if len(missing):
            raise IncompletePartition(f"vertices not covered: {missing[:10].tolist()}")
        return cls(graph, block_of)

    def __len__(self):
        return len(self.block_size)

    @property
    def blocks(self):
        order = np.argsort(self.block_of, kind="stable")
        return [b.tolist() for b in np.split(order, np.cumsum(self.block_size)[:-1])]

    def block_diameters(self, cutoff=None):
        """Exact block diameters; ``math.inf`` for blocks straddling components.

        With ``cutoff`` given, diameters above it are reported as ``cutoff + 1``.
        """
        g = self.graph
        lim = g.n if cutoff is None else int(cutoff)
        diam = kernels.block_diameters(g.indptr, g.indices, self.block_of, self.block_size, lim)
        out = diam.astype(object)
        if cutoff is None:
            out[diam > lim] = math.inf
        return out

    @cached_property
    def diameter(self):
        if len(self.block_size) == 0:
            return 0
        return max(self.block_diameters())

    def refines(self, other: "EquivPartition") -> bool:
        """True when every block of ``self`` lies inside a block of ``other``."""
        pairs = np.unique(np.stack([self.block_of, other.block_of]), axis=1)
        return len(np.unique(pairs[0])) == pairs.shape[1]
