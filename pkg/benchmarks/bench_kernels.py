"""Time the numba and numpy paths of every hot kernel on the same inputs.

    python benchmarks/bench_kernels.py [--n 3000000] [--repeats 5]

Also checks that both paths agree before timing them.
"""

import argparse
import time

import numpy as np

from amlgraph import _kernels as K


def _inputs(n, seed=0):
    rng = np.random.default_rng(seed)
    n_nodes = max(n // 100, 2)
    src = rng.integers(0, n_nodes, size=n)
    ts = np.sort(rng.integers(0, 365 * 86400, size=n))
    sizes = rng.integers(1, 7, size=n // 4)
    m = int(sizes.sum())
    pool = np.unique(rng.integers(0, n_nodes, size=n_nodes))
    dst = pool[rng.integers(0, pool.size, size=n)]
    src_pool = pool[rng.integers(0, pool.size, size=n)]
    return {
        "inter_arrival": (src, ts, n_nodes),
        "segmented_cumsum": (rng.integers(1, 10_000, size=m), sizes),
        "decay_chain": (rng.integers(100_000, 10_000_000, size=sizes.size), rng.uniform(0.95, 0.99, size=m), sizes),
        "resolve_self_loops": (src_pool, dst, pool),
    }


def _best(fn, args, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=3_000_000)
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args(argv)

    if not K.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")
    inputs = _inputs(args.n)
    print(f"{'kernel':20s} {'numpy s':>10s} {'numba s':>10s} {'speedup':>8s}")
    for name, a in inputs.items():
        py = getattr(K, f"{name}_py")
        nb = getattr(K, f"{name}_nb")
        if not np.array_equal(py(*a), nb(*a)):  # also warms up the jit
            raise SystemExit(f"{name}: numba and numpy results differ")
        t_py = _best(py, a, args.repeats)
        t_nb = _best(nb, a, args.repeats)
        print(f"{name:20s} {t_py:10.4f} {t_nb:10.4f} {t_py / t_nb:7.1f}x")


if __name__ == "__main__":
    main()
