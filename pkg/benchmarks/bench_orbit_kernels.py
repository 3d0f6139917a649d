#!/usr/bin/env python3
"""Benchmark the compiled orbit kernel against the NumPy fallback.

Runs the same stroboscopic workloads through floqkerr._orbit_cy and
floqkerr._orbit_py, checks the outputs agree, and prints a timing table.

    python benchmarks/bench_orbit_kernels.py [--quick]
"""

import argparse
import time

import numpy as np

from floqkerr import DriveProtocol
from floqkerr import _orbit_py

try:
    from floqkerr import _orbit_cy
except ImportError:
    _orbit_cy = None


WORKLOADS = [
    # name, n_traj, steps_per_half, transient, recorded, with_tangent
    ("single orbit, sampling only", 1, 100, 500, 500, False),
    ("single orbit + tangent", 1, 100, 500, 500, True),
    ("16-orbit batch + tangent", 16, 100, 500, 500, True),
    ("bifurcation-like 128-batch", 128, 100, 300, 300, True),
]


def run(kernel, protocol, alpha0, steps, transient, recorded, tangent):
    t0 = time.perf_counter()
    out = kernel.evolve_batch(
        alpha0,
        protocol.eps1,
        protocol.eps2,
        protocol.detuning,
        protocol.kerr,
        protocol.kappa,
        protocol.period,
        steps,
        transient,
        recorded,
        with_tangent=tangent,
    )
    return time.perf_counter() - t0, out


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--quick", action="store_true", help="quarter-size workloads")
    args = parser.parse_args()

    if _orbit_cy is None:
        print("compiled kernel not built; nothing to compare")
        return

    protocol = DriveProtocol.symmetric(-1.0, 0.2, 2.5, 2.0, 0.5)
    rng = np.random.default_rng(3)
    scale = 4 if args.quick else 1

    print(f"{'workload':34s} {'compiled':>10s} {'python':>10s} {'speedup':>9s}")
    for name, n, steps, transient, recorded, tangent in WORKLOADS:
        transient //= scale
        recorded //= scale
        alpha0 = rng.normal(0, 1.5, n) + 1j * rng.normal(0, 1.5, n)
        t_c, out_c = run(_orbit_cy, protocol, alpha0, steps, transient, recorded, tangent)
        t_p, out_p = run(_orbit_py, protocol, alpha0, steps, transient, recorded, tangent)
        agree = np.nanmax(np.abs(out_c[0] - out_p[0])) < 1e-9
        print(
            f"{name:34s} {t_c:9.3f}s {t_p:9.3f}s {t_p / t_c:8.0f}x"
            + ("" if agree else "  [MISMATCH]")
        )


if __name__ == "__main__":
    main()
