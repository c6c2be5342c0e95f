import random
from fractions import Fraction

import networkx as nx
import numpy as np
import pytest

from treecover import _pykernels
from treecover import covering, graph, mass, orientation
from treecover.graph import Graph
from treecover.mass import MassAssignment

try:
    from treecover import _ckernels
except ImportError:  # extension not built
    _ckernels = None

BACKENDS = [_pykernels] + ([_ckernels] if _ckernels is not None else [])


@pytest.fixture(params=BACKENDS, ids=lambda k: k.BACKEND)
def backend(request, monkeypatch):
    """Run the test once per kernel backend."""
    for mod in (graph, mass, orientation, covering):
        monkeypatch.setattr(mod, "kernels", request.param)
    return request.param


def random_tree(n, rng, max_degree=None):
    deg = [0] * n
    edges = []
    for v in range(1, n):
        for _ in range(100):
            u = rng.randrange(v)
            if max_degree is None or deg[u] < max_degree - 1 or (u == 0 and deg[u] < max_degree):
                break
        deg[u] += 1
        deg[v] += 1
        edges.append((u, v))
    perm = list(range(n))
    rng.shuffle(perm)
    return Graph(n, [(perm[u], perm[v]) for u, v in edges])


def random_forest(n, rng, trees=3):
    parts = sorted(rng.sample(range(1, n), min(trees - 1, n - 1))) if n > 1 else []
    bounds = [0] + parts + [n]
    edges = []
    for lo, hi in zip(bounds, bounds[1:]):
        for v in range(lo + 1, hi):
            edges.append((rng.randrange(lo, v), v))
    perm = list(range(n))
    rng.shuffle(perm)
    return Graph(n, [(perm[u], perm[v]) for u, v in edges])


def random_lambda(g, rng, max_weight=5):
    """Random rational masses supported on each vertex's component."""
    vectors = {}
    for comp in g.components():
        for x in comp:
            k = rng.randint(1, len(comp))
            pts = rng.sample(comp, k)
            w = [rng.randint(1, max_weight) for _ in pts]
            tot = sum(w)
            vectors[x] = {p: Fraction(a, tot) for p, a in zip(pts, w)}
    return MassAssignment.from_vectors(g.n, vectors)


def to_nx(g):
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges)
    return h


def all_distances(g):
    """Dense hop-distance matrix from networkx (``inf`` across components)."""
    d = np.full((g.n, g.n), np.inf)
    for x, row in nx.all_pairs_shortest_path_length(to_nx(g)):
        for y, v in row.items():
            d[x, y] = v
    return d


def l1(a: dict, b: dict) -> Fraction:
    return sum((abs(a.get(k, 0) - b.get(k, 0)) for k in set(a) | set(b)), Fraction(0))


def brute_defect(g, lam, r):
    d = all_distances(g)
    best = Fraction(0)
    vec = [lam.vector(x) for x in range(g.n)]
    for x in range(g.n):
        for y in range(x + 1, g.n):
            if 0 < d[x, y] < r:
                best = max(best, l1(vec[x], vec[y]))
    return best


@pytest.fixture
def rng():
    return random.Random(12345)
