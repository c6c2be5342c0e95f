"""Time the compiled kernels against the numpy fallback on the same inputs.

    python benchmarks/bench_kernels.py --n 5000 --repeat 3
"""

import argparse
import time

import numpy as np

from treecover import _pykernels
from treecover.covering import functional_cover
from treecover.generators import orient_toward, path_graph, random_tree
from treecover.mass import uniform_ball_lambda
from treecover.orientation import euler_forest

try:
    from treecover import _ckernels
except ImportError:
    _ckernels = None


def _cases(n):
    tree = random_tree(n, 3, seed=1)
    path = path_graph(n)
    lam = uniform_ball_lambda(path, 60)
    tin, tout, parent = euler_forest(path)
    cover = functional_cover(tree, orient_toward(tree), 4)
    block_of = cover.partition.block_of
    sizes = cover.partition.block_size
    sources = np.arange(n, dtype=np.int64)
    m = (lam.m_indptr, lam.m_support, lam.m_wptr, lam.m_weights, lam.m_denom)
    return {
        "bounded_bfs x200": lambda k: [
            k.bounded_bfs(tree.indptr, tree.indices, s, 6) for s in range(0, n, max(1, n // 200))
        ],
        "ball_class_counts": lambda k: k.ball_class_counts(
            tree.indptr, tree.indices, block_of, 4, sources),
        "block_diameters": lambda k: k.block_diameters(
            tree.indptr, tree.indices, block_of, sizes, 22),
        "max_defect": lambda k: k.max_defect(
            path.indptr, path.indices, 5, *m, lam.measure_of, sources),
        "side_mass": lambda k: k.side_mass(
            path.indptr, path.indices, tin, tout, parent, lam.m_indptr, lam.m_support,
            lam.m_wptr, lam.m_weights, lam.measure_of),
    }


def _best(fn, kernels, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(kernels)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=5000, help="vertices per test graph")
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if _ckernels is None:
        print("compiled extension not built; only the fallback can run")
    print(f"{'kernel':<22}{'python [s]':>12}{'cython [s]':>12}{'speedup':>10}")
    for name, fn in _cases(args.n).items():
        py = _best(fn, _pykernels, args.repeat)
        if _ckernels is None:
            print(f"{name:<22}{py:>12.4f}{'-':>12}{'-':>10}")
            continue
        cy = _best(fn, _ckernels, args.repeat)
        print(f"{name:<22}{py:>12.4f}{cy:>12.4f}{py / cy:>9.1f}x")


if __name__ == "__main__":
    main()
