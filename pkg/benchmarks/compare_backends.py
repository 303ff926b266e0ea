"""Time the distributed-run kernels against each other.

Runs the standard 200-link experiment once per backend and reports
slots per second plus the speedup of the compiled extension over the
numpy reference. Traces are compared at the end so the timing also
doubles as a parity check.

Usage: python benchmarks/compare_backends.py [--slots N] [--gamma G]
"""

from __future__ import annotations

import argparse
import time

import sinrsched._kernel as kernel
from sinrsched import (
    PowerAssignment,
    SimConfig,
    build_rate_vector,
    default_theta,
    generate_instance,
    run_distributed,
)
from sinrsched import _kernel_py

try:
    from sinrsched import _kernel_c
except ImportError:
    _kernel_c = None


def _timed_run(impl, inst, pa, rv, cfg):
    kernel.run_distributed_chunk = impl.run_distributed_chunk
    t0 = time.perf_counter()
    trace = run_distributed(inst, pa, rv, cfg)
    return trace, time.perf_counter() - t0


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--slots", type=int, default=200000)
    ap.add_argument("--gamma", type=float, default=0.25)
    args = ap.parse_args()

    inst = generate_instance(200, 1.0, 20.0, 100.0, 7, alpha=2.5)
    pa = PowerAssignment.mean()
    rv = build_rate_vector(inst, pa, args.gamma)
    cfg = SimConfig(
        mode="distributed",
        total_slots=args.slots,
        theta=default_theta(inst.n),
        gamma=args.gamma,
        seed=1,
    )

    original = kernel.run_distributed_chunk
    try:
        trace_py, t_py = _timed_run(_kernel_py, inst, pa, rv, cfg)
        print(f"python backend: {t_py:8.3f}s  ({args.slots / t_py:,.0f} slots/s)")
        if _kernel_c is None:
            print("compiled backend not built; run python setup.py build_ext --inplace")
            return
        trace_c, t_c = _timed_run(_kernel_c, inst, pa, rv, cfg)
        print(f"c backend:      {t_c:8.3f}s  ({args.slots / t_c:,.0f} slots/s)")
        print(f"speedup: {t_py / t_c:.1f}x")
        print(f"traces identical: {trace_py == trace_c}")
    finally:
        kernel.run_distributed_chunk = original


if __name__ == "__main__":
    main()
