"""Time the numba kernels against their numpy fallbacks.

    python benchmarks/bench_kernels.py [--n 400] [--repeat 3]

Each kernel is called once before timing so JIT compilation is excluded.
Results are checked for agreement before they are reported.
"""

import argparse
import time

import numpy as np

from rcdmap import _kernels
from rcdmap.graph import largest_connected_component
from rcdmap.lfr import LfrConfig, generate_lfr


def best_of(repeat, fn):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=400, help="LFR graph size")
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--sir-runs", type=int, default=2000)
    args = ap.parse_args(argv)
    if not _kernels.NUMBA_AVAILABLE:
        raise SystemExit("numba is not installed; nothing to compare")

    g, _ = generate_lfr(LfrConfig(n=args.n, max_community=min(100, args.n), seed=1))
    g = largest_connected_component(g)
    seeds = np.arange(5, dtype=np.int64)
    beta = 0.1
    jobs = {
        "distance_sums": lambda b: _kernels.distance_sums(g.indptr, g.indices, g.n, backend=b),
        "brandes": lambda b: _kernels.brandes(g.indptr, g.indices, g.edge_ids, g.n, g.m, backend=b),
        "sir": lambda b: _kernels.sir(g.indptr, g.indices, g.n, seeds, beta, 0.8, args.sir_runs, 10000, 0,
                                      backend=b),
    }
    print(f"graph n={g.n} m={g.m}, best of {args.repeat}")
    print(f"{'kernel':<14} {'numba s':>10} {'numpy s':>10} {'speedup':>8}")
    for name, job in jobs.items():
        job("numba")
        t_nb, a = best_of(args.repeat, lambda: job("numba"))
        t_np, b = best_of(args.repeat, lambda: job("numpy"))
        if name == "sir":
            # different random streams; compare the means
            se = np.hypot(a[0].std(), b[0].std()) / np.sqrt(args.sir_runs)
            assert abs(a[0].mean() - b[0].mean()) <= 5 * se + 1e-9, "sir backends disagree"
        else:
            for x, y in zip(a, b):
                np.testing.assert_allclose(x, y, rtol=1e-9, atol=1e-9)
        print(f"{name:<14} {t_nb:>10.4f} {t_np:>10.4f} {t_np / t_nb:>7.1f}x")


if __name__ == "__main__":
    main()
