"""Time the numba and numpy flavours of each hot kernel on the same inputs.

    python benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import timeit

import numpy as np

from tomophase import kernels
from tomophase.xray import kernel_tables


def cases(rng):
    n, p = 6, 11
    slabs = rng.standard_normal((n, n, n)) + 1j * rng.standard_normal((n, n, n))
    a, b = kernel_tables(n, p, 0.37, -0.81)
    yield "line_sums n=6 p=11", (slabs, a, b), kernels.line_sums_numpy, kernels.line_sums_numba

    coef = rng.standard_normal(121) + 1j * rng.standard_normal(121)
    idx = rng.integers(-5, 6, size=(121, 2)).astype(float)
    pts = rng.uniform(-0.5, 0.5, size=(441, 2))
    yield "ndft 121 coef x 441 nodes", (coef, idx, pts, 1.0), kernels.ndft_numpy, kernels.ndft_numba

    vals = rng.uniform(-10, 10, size=(121, 6))
    vals[::2, 1] = vals[::2, 0]
    yield "distinct_counts 121 x 6", (vals, 11.0, 1e-9), kernels.distinct_counts_numpy, kernels.distinct_counts_numba

    g = rng.standard_normal((11, 11)) + 1j * rng.standard_normal((11, 11))
    yield "autocorrelation p=11", (g,), kernels.autocorrelation_numpy, kernels.autocorrelation_numba


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--number", type=int, default=50)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(0)
    print(f"{'kernel':32s} {'numpy [us]':>12s} {'numba [us]':>12s} {'speedup':>8s}")
    for name, inputs, slow, fast in cases(rng):
        fast(*inputs)  # compile
        assert np.allclose(slow(*inputs), fast(*inputs), atol=1e-9)
        t_np = min(timeit.repeat(lambda: slow(*inputs), number=args.number, repeat=args.repeat)) / args.number
        t_nb = min(timeit.repeat(lambda: fast(*inputs), number=args.number, repeat=args.repeat)) / args.number
        print(f"{name:32s} {t_np * 1e6:12.1f} {t_nb * 1e6:12.1f} {t_np / t_nb:8.2f}")


if __name__ == "__main__":
    main()
