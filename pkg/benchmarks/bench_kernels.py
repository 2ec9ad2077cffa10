#!/usr/bin/env python3
"""Timing comparison of the compiled and pure-Python statistic kernels.

Run from the repository root after installing the package:

    python benchmarks/bench_kernels.py
    python benchmarks/bench_kernels.py --sizes 100,1000 --repeats 2000
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from rulerank import SensitivityParams, kernels
from rulerank.selection import SelectionPlan, run_selection
from rulerank.simulate import SimulationScenario, generate_replicate


def time_call(fn, repeats):
    best = min(timeit.repeat(fn, number=repeats, repeat=5))
    return best / repeats


def bench_kernels(sizes, repeats):
    rows = []
    rng = np.random.default_rng(0)
    for size in sizes:
        d = rng.normal(0.3, 1.0, size)
        for name in ("studentized_moments", "signed_moments"):
            per_backend = {}
            for backend in kernels.available_backends():
                mod = kernels._BACKENDS[backend]
                fn = getattr(mod, name)
                call = (lambda f=fn, x=d: f(x, 0.25, 0.1)) if name == "studentized_moments" else (
                    lambda f=fn, x=d: f(x)
                )
                per_backend[backend] = time_call(call, repeats)
            rows.append((name, size, per_backend))
    return rows


def bench_pipeline(repeats=20):
    """End-to-end selection timing under each backend."""
    scenario = SimulationScenario(
        cohort_means=(0.5, 0.25, 0.25, 0.15, 0.05),
        cohort_size=250,
        gamma_grid=(2.0,),
        true_sets={2.0: frozenset({1, 2, 3})},
        seed=0,
    )
    sample = generate_replicate(scenario, 0)
    params = SensitivityParams(gamma=2.0)
    plan = SelectionPlan(goal="positive", method="power", split_fraction=0.25, seed=1)
    out = {}
    active = kernels.BACKEND
    try:
        for backend in kernels.available_backends():
            kernels.use_backend(backend)
            out[backend] = time_call(lambda: run_selection(sample, params, plan), repeats)
    finally:
        kernels.use_backend(active)
    return out


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", default="50,250,2500", help="comma list of vector lengths")
    parser.add_argument("--repeats", type=int, default=5000)
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    backends = kernels.available_backends()
    print(f"available backends: {', '.join(backends)} (active: {kernels.BACKEND})")
    if "compiled" not in backends:
        print("compiled extension not built; showing pure-python timings only")

    print(f"\n{'kernel':<22}{'n':>6}  " + "".join(f"{b:>14}" for b in backends) + "   speedup")
    for name, size, per in bench_kernels(sizes, args.repeats):
        cells = "".join(f"{per[b] * 1e6:>12.2f}us" for b in backends)
        speed = per["python"] / per["compiled"] if "compiled" in per else float("nan")
        print(f"{name:<22}{size:>6}  {cells}   {speed:>6.1f}x")

    print("\nend-to-end positive-rule selection (1250 pairs, power ordering):")
    for backend, seconds in bench_pipeline().items():
        print(f"  {backend:<10}{seconds * 1e3:8.2f} ms/run")


if __name__ == "__main__":
    main()
