"""Compare the numba kernels against their pure-numpy twins.

    python benchmarks/bench_kernels.py --repeat 200
"""
import argparse
import timeit

import numpy as np

from cfet import _accel, kernels


def bench(label, fast, slow, args, repeat):
    fast(*args)  # compile outside the timed region
    t_fast = min(timeit.repeat(lambda: fast(*args), number=repeat, repeat=3)) / repeat
    t_slow = min(timeit.repeat(lambda: slow(*args), number=repeat, repeat=3)) / repeat
    print(f"{label:28s} {_accel.BACKEND:>6s} {t_fast * 1e6:10.1f} us   numpy {t_slow * 1e6:10.1f} us   x{t_slow / t_fast:6.2f}")


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(args.seed)
    for n in (2, 8, 32, 128):
        M = rng.normal(size=(n, n))
        reps = max(1, args.repeat // (1 + n // 8))
        bench(f"expm_dense n={n}", kernels.expm_dense, kernels.py_expm_dense, (M,), reps)
    for J in (2, 8):
        b, y = rng.uniform(size=J), rng.normal(size=J)
        bench(f"residuals_float J={J}", kernels.residuals_float, kernels.py_residuals_float, (b, y), args.repeat * 10)


if __name__ == "__main__":
    main()
