"""Compiled vs numpy kernels on representative workloads.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--nt 20000] [--grid 201]

Prints the best-of-N wall time per backend, the speed-up, and the largest
difference between the two results.
"""

import argparse
import math
import time

import numpy as np

from diracosc import ModelParams, PacketSpec, initial_state
from diracosc import _kernels_py
from diracosc.density import _terms
from diracosc.evolution import Propagator

try:
    from diracosc import _kernels
except ImportError:  # extension not built
    _kernels = None


def best_of(fn, repeat):
    best, out = math.inf, None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def series_case(nt):
    p = ModelParams(0.01)
    s0 = initial_state(PacketSpec.circular(20.0, math.pi / 2), "dirac")
    prop = Propagator(s0, p)
    ops = [prop.project(op) for op in prop.basis.operators().values()]
    t = np.linspace(0, 100, nt) * p.period
    return (t, *prop.kernel_args(), ops)


def grid_case(n):
    p = ModelParams(0.5)
    s0 = initial_state(PacketSpec.circular(20.0, math.pi / 2), "dirac")
    st = Propagator(s0, p).state(0.5 * p.period)
    th, ph = np.meshgrid(np.linspace(0, math.pi, n), np.linspace(0, 2 * math.pi, n), indexing="ij")
    rho = np.full(th.size, math.sqrt(20.0))
    return rho, th.ravel(), ph.ravel(), _terms(st)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--nt", type=int, default=20000, help="time samples for sector_series")
    ap.add_argument("--grid", type=int, default=201, help="points per axis for grid_amplitudes")
    args = ap.parse_args(argv)
    if _kernels is None:
        print("compiled extension not available; build with: pip install -e . --no-build-isolation")
        return 1

    cases = [
        ("sector_series", "sector_series", series_case(args.nt), args.nt),
        ("grid_amplitudes", "grid_amplitudes", grid_case(args.grid), args.grid**2),
    ]
    print(f"{'kernel':<16} {'size':>8} {'numpy [s]':>10} {'cython [s]':>11} {'speed-up':>9} {'max |diff|':>11}")
    for label, name, case, size in cases:
        t_py, r_py = best_of(lambda: getattr(_kernels_py, name)(*case), args.repeat)
        t_cy, r_cy = best_of(lambda: getattr(_kernels, name)(*case), args.repeat)
        if isinstance(r_py, tuple):
            diff = max(float(np.max(np.abs(np.asarray(a) - np.asarray(b)))) for a, b in zip(r_py, r_cy))
        else:
            diff = float(np.max(np.abs(np.asarray(r_py) - np.asarray(r_cy))))
        print(f"{label:<16} {size:>8} {t_py:>10.3f} {t_cy:>11.3f} {t_py / t_cy:>8.1f}x {diff:>11.1e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
