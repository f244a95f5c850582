"""Compare the compiled and pure-Python kernels on the hot paths.

Usage: python3 benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import time

import numpy as np

from fint import _pykernels as P
from fint.numerics import _pack
from fint.scalar import parse_scalar

try:
    from fint import _ckernels as C
except ImportError:
    C = None


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return min(times)


def cases():
    f = parse_scalar("sin(t)*exp(-t)+t^3/(1+t^2)")
    ops, consts = f.compile()
    ts = np.linspace(-1, 1, 2000)

    def programs(impl):
        return lambda: [impl.run_program(ops, consts, float(t)) for t in ts]

    def simpson(impl):
        return lambda: impl.simpson_program(ops, consts, 0.0, 4.0, 1e-12)

    rng = np.random.default_rng(0)
    n = 5
    alphas = ["1", "sin(t)", "exp(-t)"]
    aops, astart, aconsts = _pack([parse_scalar(a) for a in alphas])
    mats = rng.normal(size=(3, n, n)) * 0.5
    fops, fstart, fconsts = _pack([parse_scalar("cos(3*t)")] + [parse_scalar("t")] * (n - 1))
    x0 = rng.normal(size=n)
    grid = np.linspace(0.0, 2.0, 201)

    def dopri(impl):
        return lambda: impl.dopri_linear(aops, astart, aconsts, mats, fops, fstart, fconsts,
                                         x0, grid, 1e-10, 1e-10)

    return [("evaluate 2000 points", programs), ("adaptive Simpson", simpson),
            ("Dormand-Prince n=5", dopri)]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"{'kernel':<24}{'python [ms]':>14}{'cython [ms]':>14}{'speedup':>10}")
    for name, make in cases():
        tp = best_of(make(P), args.repeat) * 1e3
        if C is None:
            print(f"{name:<24}{tp:>14.2f}{'n/a':>14}{'':>10}")
            continue
        tc = best_of(make(C), args.repeat) * 1e3
        print(f"{name:<24}{tp:>14.2f}{tc:>14.2f}{tp / tc:>9.1f}x")


if __name__ == "__main__":
    main()
