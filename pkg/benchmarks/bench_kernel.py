"""Wall-clock comparison of the compiled and pure-Python integration kernels.

Usage: python benchmarks/bench_kernel.py [--repeat N] [--scenario sim_3_2]
"""

from __future__ import annotations

import argparse
import statistics
import time

import numpy as np

from cablescaffold.scenarios import paper_scenarios
from cablescaffold.sim import KERNELS, run, step_count


def time_backend(scenario, backend: str, repeat: int) -> tuple[list[float], np.ndarray]:
    times, data = [], None
    for _ in range(repeat):
        t0 = time.perf_counter()
        data = run(scenario, backend=backend).data
        times.append(time.perf_counter() - t0)
    return times, data


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--scenario", default="sim_3_2", choices=sorted(paper_scenarios()))
    args = parser.parse_args(argv)

    scenario = paper_scenarios()[args.scenario]
    steps = step_count(scenario)
    print(f"scenario {scenario.name}: {steps} RK4 steps")
    results = {}
    for backend in sorted(KERNELS):
        repeat = args.repeat if backend != "python" else 1
        times, data = time_backend(scenario, backend, repeat)
        results[backend] = (statistics.median(times), data)
        print(f"{backend:>8}: {results[backend][0]:8.3f} s  ({steps / results[backend][0]:,.0f} steps/s)")
    if len(results) == 2:
        (t_py, d_py), (t_cy, d_cy) = results["python"], results["cython"]
        print(f"speedup: {t_py / t_cy:.1f}x, max telemetry difference {np.max(np.abs(d_py - d_cy)):.3g}")
    else:
        print("compiled kernel not built; only the Python kernel was timed")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
