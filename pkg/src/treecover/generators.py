"""Deterministic graph generators for experiments and tests."""

from __future__ import annotations

import random

import numpy as np

from .graph import Graph


def path_graph(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def star_graph(leaves: int) -> Graph:
    """Center 0 joined to vertices ``1..leaves``."""
    return Graph(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def caterpillar_graph(spine: int, legs: int) -> Graph:
    """A path of ``spine`` vertices, each carrying ``legs`` pendant vertices."""
    edges = [(i, i + 1) for i in range(spine - 1)]
    nxt = spine
    for i in range(spine):
        for _ in range(legs):
            edges.append((i, nxt))
            nxt += 1
    return Graph(nxt, edges)


def random_tree(n: int, max_degree: int, seed: int) -> Graph:
    """Random recursive tree: each new vertex hangs off a uniform earlier vertex with spare degree."""
    if (n > 1 and max_degree < 1) or (n > 2 and max_degree < 2):
        raise ValueError(f"no tree on {n} vertices has maximum degree {max_degree}")
    rng = random.Random(seed)
    deg = [0] * n
    open_ = [0] if n else []
    edges = []
    for v in range(1, n):
        k = rng.randrange(len(open_))
        u = open_[k]
        edges.append((u, v))
        deg[u] += 1
        deg[v] = 1
        if deg[u] >= max_degree:
            open_[k] = open_[-1]
            open_.pop()
        if deg[v] < max_degree:
            open_.append(v)
    return Graph(n, edges)


def random_functional_forest(n: int, seed: int, max_degree=None, root_rate=0.01):
    """Random forest with a parent map ``f`` (roots are fixed points).

    Returns ``(graph, f)``.  Vertex ids are shuffled so that parents are not
    always smaller than children.
    """
    rng = random.Random(seed)
    perm = list(range(n))
    rng.shuffle(perm)
    parent = [-1] * n
    deg = [0] * n
    for v in range(1, n):
        if rng.random() < root_rate:
            continue
        for _ in range(32):
            u = rng.randrange(v)
            if max_degree is None or deg[u] < max_degree - 1:
                break
        else:
            continue
        parent[v] = u
        deg[u] += 1
        deg[v] += 1
    f = np.arange(n, dtype=np.int64)
    for v in range(n):
        if parent[v] >= 0:
            f[perm[v]] = perm[parent[v]]
    g = Graph(n, [(x, int(f[x])) for x in range(n) if f[x] != x])
    return g, f


def orient_toward(g: Graph, roots=None):
    """Parent map of ``g`` pointing every vertex toward the root of its component.

    ``roots`` maps component ids to chosen roots; default is the minimum vertex.
    """
    f = np.arange(g.n, dtype=np.int64)
    for comp in g.components():
        c = int(g.component[comp[0]])
        root = comp[0] if roots is None else roots.get(c, comp[0])
        depth = g.distances(root)
        for v in comp:
            if v != root:
                f[v] = next(u for u in g.neighbors(v) if depth[u] < depth[v])
    return f
