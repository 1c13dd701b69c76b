"""Compare the numba and numpy multiplication kernels, then time a full analysis per backend.

    python benchmarks/bench_kernels.py [--repeat 50]
"""

import argparse
import time

import numpy as np

from ramify import _kernels
from ramify.finite_field import FqField
from ramify.tower import TowerSpec
from ramify.witness import h11_spec
from ramify.ramification import analyze


def time_mul(F, length, repeat, rng):
    a = rng.integers(0, F.p, size=(length, F.n))
    b = rng.integers(0, F.p, size=(length, F.n))
    red = F.reduction_matrix
    _kernels.mul_trunc(a, b, length, F.p, red)  # warm up / compile
    t0 = time.perf_counter()
    for _ in range(repeat):
        out = _kernels.mul_trunc(a, b, length, F.p, red)
    return (time.perf_counter() - t0) / repeat * 1e3, out


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=50)
    args = ap.parse_args()
    backends = ["numpy"] + (["numba"] if _kernels.HAVE_NUMBA else [])
    rng = np.random.default_rng(0)

    print(f"{'field':<6} {'L':>5} " + " ".join(f"{b + ' ms':>10}" for b in backends) + "  agree")
    for F in (FqField(3), FqField(5), FqField(3, 2)):
        for length in (100, 300, 1000, 3000):
            times, outs = [], []
            for b in backends:
                _kernels.set_backend(b)
                ms, out = time_mul(F, length, args.repeat, np.random.default_rng(length))
                times.append(ms)
                outs.append(out)
            agree = all(np.array_equal(outs[0], o) for o in outs[1:])
            name = f"F_{F.q}"
            print(f"{name:<6} {length:>5} " + " ".join(f"{t:>10.3f}" for t in times) + f"  {agree}")

    print()
    spec = h11_spec(5, 4, 12)
    for b in backends:
        _kernels.set_backend(b)
        analyze(spec)  # warm up
        t0 = time.perf_counter()
        an = analyze(spec)
        dt = time.perf_counter() - t0
        print(f"H(1,1) p=5 b=4 a=12 analysis, {b:<6}: {dt:.2f} s  upper={[str(u) for u in an.breaks.upper_breaks]}")


if __name__ == "__main__":
    main()
