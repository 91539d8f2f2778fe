"""Compare the compiled and pure-numpy kernel backends.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import timeit

import numpy as np

from myosub._backend import ckernels, pykernels

CASES = [(200, 3), (500, 3), (1000, 3), (500, 16), (500, 48), (500, 200)]


def bench(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=7)
    args = parser.parse_args()
    if ckernels is None:
        raise SystemExit("compiled backend not built; run pip install -e . --no-build-isolation")
    rng = np.random.default_rng(0)
    print(f"{'op':<10}{'n':>6}{'p':>5}{'cython ms':>12}{'numpy ms':>11}{'speedup':>9}{'max |diff|':>12}")
    for n, p in CASES:
        a = rng.standard_normal((n, p))
        b = a * (rng.random((n, p)) < 0.5)
        h = float(p)
        for name, call in [
            ("mmd2", lambda k: k.mmd2(a, b, h, False)),
            ("mmd2_grad", lambda k: k.mmd2_grad(a, b, h, False)),
            ("gram", lambda k: k.gaussian_gram(a, b, h)),
        ]:
            tc = bench(lambda: call(ckernels), args.repeat)
            tp = bench(lambda: call(pykernels), args.repeat)
            rc, rp = call(ckernels), call(pykernels)
            if not isinstance(rc, tuple):
                rc, rp = (rc,), (rp,)
            diff = max(float(np.max(np.abs(np.asarray(x) - np.asarray(y)))) for x, y in zip(rc, rp))
            print(f"{name:<10}{n:>6}{p:>5}{tc * 1e3:>12.3f}{tp * 1e3:>11.3f}{tp / tc:>9.2f}{diff:>12.2e}")


if __name__ == "__main__":
    main()
