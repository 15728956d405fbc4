"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5] [--sizes 10 100 1000]

Each row reports the best-of-``repeat`` time per call for both backends and
the speedup of the compiled one.
"""
import argparse
import timeit

import numpy as np

from geomedian import _pykernels
from geomedian.core import SNAP_REL

try:
    from geomedian import _ckernels
except ImportError:
    _ckernels = None


def _cases(m, n, rng):
    a = rng.random((m, n))
    w = rng.uniform(0.5, 2.0, m)
    x = rng.random(n) + 0.5 / m
    return {
        "objective": lambda k: k.objective(a, w, x),
        "gradient": lambda k: k.gradient(a, w, x),
        "f_step": lambda k: k.f_step(a, w, x),
        "resultant": lambda k: k.resultant(a, w, 0),
        "solve loop": lambda k: k.weiszfeld(a, w, x.copy(), 100_000, 1e-10, 1e-8, SNAP_REL, False),
    }


def _best(fn, kern, repeat):
    number = 1
    while timeit.timeit(lambda: fn(kern), number=number) < 0.05 and number < 1 << 16:
        number *= 4
    return min(timeit.repeat(lambda: fn(kern), number=number, repeat=repeat)) / number


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--sizes", type=int, nargs="+", default=[10, 100, 1000])
    p.add_argument("--dim", type=int, default=2)
    args = p.parse_args(argv)
    if _ckernels is None:
        raise SystemExit("compiled kernels are not built; run `pip install -e . --no-build-isolation`")
    rng = np.random.default_rng(0)
    print(f"{'kernel':<12}{'m':>6}{'python (us)':>14}{'cython (us)':>14}{'speedup':>10}")
    for m in args.sizes:
        for name, fn in _cases(m, args.dim, rng).items():
            py = _best(fn, _pykernels, args.repeat) * 1e6
            cy = _best(fn, _ckernels, args.repeat) * 1e6
            print(f"{name:<12}{m:>6}{py:>14.1f}{cy:>14.1f}{py / cy:>9.1f}x")


if __name__ == "__main__":
    main()
