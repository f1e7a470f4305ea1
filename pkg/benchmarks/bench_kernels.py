"""Compare the compiled kernels against the pure-Python fallback.

    python benchmarks/bench_kernels.py [--repeat 3]

Each kernel runs on identical inputs under both backends; outputs are checked
for equality before timings are reported.
"""
import argparse
import timeit

import numpy as np

from omega_forge import kernels
from omega_forge.fixedpoint import SCALE


def random_csr(rng, n, degree):
    idx = rng.integers(0, n, size=n * degree).astype(np.int64)
    idx = np.sort(idx.reshape(n, degree), axis=1).reshape(-1)
    ptr = np.arange(0, n * degree + 1, degree, dtype=np.int64)
    return ptr, idx


def cases(rng):
    n = 20_000
    ptr, idx = random_csr(rng, n, 3)
    m = 4096
    grid = (np.arange(m + 1, dtype=np.int64) * SCALE // m).reshape(-1, 1)
    queries = rng.integers(0, SCALE, size=(m + 1, 1)).astype(np.int64)
    dist = rng.integers(1, 100, size=(600, 600)).astype(np.int64)
    dist = np.minimum(dist, dist.T)
    np.fill_diagonal(dist, 0)
    good = (rng.random((257, 257)) < 0.9).astype(np.uint8)
    orbit = rng.integers(0, 257, size=100_000).astype(np.int64)
    return {
        "scc_labels (n=20000)": lambda k: k.scc_labels(ptr, idx),
        "bfs_toward (n=20000)": lambda k: k.bfs_toward(ptr, idx, 0),
        "sup_within (4097 pts)": lambda k: k.sup_within(grid, queries, SCALE // 64, 0),
        "dense_within (600x600)": lambda k: k.dense_within(dist, np.arange(600, dtype=np.int64), 20),
        "directed_hausdorff_sup": lambda k: k.directed_hausdorff_sup(grid, queries[:1000], 0),
        "pair_certificate (K=1e5)": lambda k: k.pair_certificate(orbit, good, 0),
    }


def same(a, b):
    if isinstance(a, tuple):
        return all(same(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    try:
        cy = kernels.backend("cython")
    except ImportError:
        print("compiled kernels not built; nothing to compare")
        return 1
    py = kernels.backend("python")
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<28}{'python (s)':>12}{'cython (s)':>12}{'speedup':>10}")
    for name, fn in cases(rng).items():
        if not same(fn(py), fn(cy)):
            raise SystemExit(f"{name}: backends disagree")
        t_py = min(timeit.repeat(lambda: fn(py), number=1, repeat=args.repeat))
        t_cy = min(timeit.repeat(lambda: fn(cy), number=1, repeat=args.repeat))
        print(f"{name:<28}{t_py:>12.4f}{t_cy:>12.4f}{t_py / t_cy:>9.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
