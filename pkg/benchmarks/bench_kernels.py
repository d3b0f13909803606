"""Time the numba kernels against their numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat 5]

The first numba call compiles (or loads from cache) and is excluded.
"""

import argparse
import timeit

import numpy as np

from wealthex import _accel, kernels


def _cases(rng):
    f3001 = np.exp(-np.linspace(0, 30, 3001))
    f64 = np.exp(-np.linspace(0, 8, 64))
    n = 100_000
    q = 2.0**-35
    w = np.floor(rng.exponential(1.0, n) / q) * q
    perm = rng.permutation(n)
    first, second = perm[0::2], perm[1::2]
    eps = rng.random(n // 2)
    return [
        ("self-convolution n=3001", kernels._self_convolve_loops, kernels._self_convolve_numpy, (f3001, 0.01)),
        ("literal 2D operator n=64", kernels._literal_operator_loops, kernels._literal_operator_numpy, (f64, 8 / 63)),
        (
            "exchange sweep N=1e5",
            kernels._exchange_pairs_loops,
            kernels._exchange_pairs_numpy,
            (w, first, second, eps, q),
        ),
    ]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if not _accel.HAVE_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    rng = np.random.default_rng(0)
    print(f"{'kernel':28s} {'numba ms':>10s} {'numpy ms':>10s} {'speedup':>8s}")
    for name, fast, slow, argv in _cases(rng):
        fast(*argv)  # compile
        t_fast = min(timeit.repeat(lambda: fast(*argv), number=1, repeat=args.repeat))
        t_slow = min(timeit.repeat(lambda: slow(*argv), number=1, repeat=args.repeat))
        print(f"{name:28s} {1e3 * t_fast:10.3f} {1e3 * t_slow:10.3f} {t_slow / t_fast:8.2f}")


if __name__ == "__main__":
    main()
