#!/usr/bin/env python3
"""Benchmark the compiled propagator kernel against the SciPy fallback.

Both backends step the same Dormand-Prince 8(5,3) pair at the same
tolerances, so the comparison is stepper-overhead only.  The fallback pays
Python-level per-step costs; the kernel is a tight C loop.

    python benchmarks/bench_propagator.py [--t-final 120] [--repeats 3]
"""

import argparse
import time

import numpy as np

from lzc3 import propagator
from lzc3.lzc_core import ModelParams
from lzc3.propagator import IntegrationSettings


def run(integrator, params, settings, y0):
    tic = time.perf_counter()
    y, steps = integrator(params.k2, params.g1, params.g2,
                          params.beta1, params.beta2,
                          settings.epsilon, settings.t_final, y0, settings)
    return y, steps, time.perf_counter() - tic


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--t-final", type=float, default=120.0)
    ap.add_argument("--rel-tol", type=float, default=1e-11)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    params = ModelParams(k2=0.1, g1=1.0, g2=0.7, beta1=0.9, beta2=1.0)
    settings = IntegrationSettings(epsilon=1e-4, t_final=args.t_final,
                                   rel_tol=args.rel_tol)
    y0 = np.array([1.0 + 0j, 0j, 0j])

    if propagator.backend() != "compiled":
        raise SystemExit("compiled kernel not importable; nothing to compare "
                         "(build with `pip install -e . --no-build-isolation`)")

    results = {}
    for name, integ in (("compiled", propagator._integrate_compiled),
                        ("python", propagator._integrate_scipy)):
        best = None
        for _ in range(args.repeats):
            y, steps, dt = run(integ, params, settings, y0)
            best = dt if best is None else min(best, dt)
        results[name] = (y, steps, best)
        print(f"{name:9s}: {best * 1e3:10.2f} ms   {steps:8d} steps   "
              f"{best / steps * 1e6:7.3f} us/step")

    yc, _, tc = results["compiled"]
    yp, _, tp = results["python"]
    dev = float(np.max(np.abs(yc - yp)))
    print(f"agreement: max |dy| = {dev:.2e}")
    print(f"speedup  : {tp / tc:.1f}x")
    if dev > 1e-8:
        raise SystemExit("backends disagree beyond tolerance")


if __name__ == "__main__":
    main()
