"""Experiment driver.

Reads a key=value config (overridable by flags), generates or loads an
instance, sweeps (gamma, seed) cells, writes one trace CSV pair per cell
plus a summary CSV, and prints the measured stability threshold: the
largest swept gamma judged stable on every seed.

Exit codes: 0 success, 2 config error, 3 invariant violation mid-run,
4 instance rejection (dead links).
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields, replace
from pathlib import Path

from .arrivals import build_rate_vector, zero_rate_vector
from .model import Instance, generate_instance, load_instance
from .simulator import (
    InvariantViolation,
    SimConfig,
    StabilityResult,
    Trace,
    default_theta,
    estimate_stability,
    run_centralized,
    run_distributed,
)
from .sinr import DeadLinkError, PowerAssignment, find_dead_links

__all__ = [
    "ConfigError",
    "ExperimentSpec",
    "SummaryRow",
    "parse_config",
    "serialize_config",
    "run_experiment",
    "main",
]

SUMMARY_HEADER = "gamma,seed,mode,final_max_queue,stable,slope,delivered_fraction"


class ConfigError(ValueError):
    """Bad experiment configuration; message names the offending field."""


@dataclass(frozen=True)
class ExperimentSpec:
    """One experiment: an instance source plus sweep and output settings."""

    instance: str | None = None  # instance file path; None = generate
    n: int = 200
    l_min: float = 1.0
    l_max: float = 20.0
    side: float = 100.0
    alpha: float = 2.5
    beta: float = 1.0
    noise: float = 0.0
    instance_seed: int = 7
    power: str = "mean"
    power_level: float = 1.0
    mode: str = "distributed"
    gamma: tuple[float, ...] = (0.2,)
    seeds: tuple[int, ...] = (1,)
    slots: int = 200000
    theta_c: float = 1.0
    out: str = "runs"
    stride: int = 1
    jobs: int = 1

    def __post_init__(self):
        if self.mode not in ("centralized", "distributed"):
            raise ConfigError(f"mode must be centralized or distributed, got {self.mode!r}")
        if self.power not in ("uniform", "linear", "mean"):
            raise ConfigError(f"power must be uniform, linear or mean, got {self.power!r}")
        if not self.gamma:
            raise ConfigError("gamma list must not be empty")
        for g in self.gamma:
            if not (0.0 <= g <= 1.0):
                raise ConfigError(f"gamma out of range (0,1]: {g}")
        if not self.seeds:
            raise ConfigError("need at least one seed")
        if self.slots < 1:
            raise ConfigError(f"slots must be >= 1, got {self.slots}")
        if self.stride < 1:
            raise ConfigError(f"stride must be >= 1, got {self.stride}")
        if self.jobs < 1:
            raise ConfigError(f"jobs must be >= 1, got {self.jobs}")
        if self.instance is None:
            if self.n < 1:
                raise ConfigError(f"n must be >= 1, got {self.n}")
            if not (0.0 < self.l_min <= self.l_max):
                raise ConfigError(f"need 0 < l_min <= l_max, got {self.l_min}, {self.l_max}")
            if self.side <= 0.0:
                raise ConfigError(f"side must be positive, got {self.side}")
        if not (self.theta_c > 0.0):
            raise ConfigError(f"theta_c must be positive, got {self.theta_c}")


@dataclass(frozen=True)
class SummaryRow:
    gamma: float
    seed: int
    mode: str
    final_max_queue: int
    stable: bool
    slope: float
    delivered_fraction: float


_INT_KEYS = {"n", "instance_seed", "slots", "stride", "jobs"}
_FLOAT_KEYS = {"l_min", "l_max", "side", "alpha", "beta", "noise", "power_level", "theta_c"}
_STR_KEYS = {"instance", "power", "mode", "out"}
_LIST_KEYS = {"gamma", "seeds"}
_ALL_KEYS = _INT_KEYS | _FLOAT_KEYS | _STR_KEYS | _LIST_KEYS


def _parse_value(key: str, raw: str, where: str):
    try:
        if key in _INT_KEYS:
            return int(raw)
        if key in _FLOAT_KEYS:
            return float(raw)
        if key == "gamma":
            return tuple(float(v) for v in raw.split(","))
        if key == "seeds":
            return tuple(int(v) for v in raw.split(","))
        return raw
    except ValueError:
        raise ConfigError(f"{where}: cannot parse value for {key}: {raw!r}") from None


def parse_config(text: str) -> ExperimentSpec:
    """key=value per line, # starts a comment, unknown keys rejected.
    Diagnostics carry line numbers."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        key, sep, raw = body.partition("=")
        if not sep:
            raise ConfigError(f"line {lineno}: expected key=value, got {line.strip()!r}")
        key = key.strip()
        raw = raw.strip()
        if key not in _ALL_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        values[key] = _parse_value(key, raw, f"line {lineno}")
    try:
        return ExperimentSpec(**values)
    except ConfigError as exc:
        raise ConfigError(str(exc)) from None


def serialize_config(spec: ExperimentSpec) -> str:
    """Canonical form: every field, fixed order, floats at full precision."""
    lines = []
    for f in fields(ExperimentSpec):
        v = getattr(spec, f.name)
        if f.name == "instance":
            if v is None:
                continue
            lines.append(f"instance={v}")
        elif f.name in _LIST_KEYS:
            lines.append(f"{f.name}=" + ",".join(format(x, '.17g') if isinstance(x, float) else str(x) for x in v))
        elif isinstance(v, float):
            lines.append(f"{f.name}={format(v, '.17g')}")
        else:
            lines.append(f"{f.name}={v}")
    return "\n".join(lines) + "\n"


def _materialize(spec: ExperimentSpec) -> tuple[Instance, PowerAssignment]:
    if spec.instance is not None:
        inst = load_instance(spec.instance)
    else:
        inst = generate_instance(
            spec.n,
            spec.l_min,
            spec.l_max,
            spec.side,
            spec.instance_seed,
            alpha=spec.alpha,
            beta=spec.beta,
            noise=spec.noise,
        )
    if spec.power == "uniform":
        pa = PowerAssignment.uniform(spec.power_level)
    elif spec.power == "linear":
        pa = PowerAssignment.linear()
    else:
        pa = PowerAssignment.mean()
    return inst, pa


def _gamma_tag(g: float) -> str:
    return format(g, "g")


def trace_paths(spec: ExperimentSpec, gamma: float, seed: int) -> tuple[Path, Path]:
    base = Path(spec.out)
    tag = f"g{_gamma_tag(gamma)}_s{seed}"
    return base / f"trace_{tag}.csv", base / f"periods_{tag}.csv"


def _stability_for(trace: Trace) -> StabilityResult:
    if trace.total_slots >= 10000:
        return estimate_stability(trace)
    # short smoke runs: call it stable only when nothing is left queued
    return StabilityResult(stable=int(trace.total_queue[-1]) == 0, slope=0.0)


def _run_cell(spec: ExperimentSpec, gamma: float, seed: int) -> SummaryRow:
    inst, pa = _materialize(spec)
    theta = default_theta(inst.n, spec.theta_c)
    rv = zero_rate_vector(inst) if gamma == 0.0 else build_rate_vector(inst, pa, gamma)
    cfg = SimConfig(
        mode=spec.mode,
        total_slots=spec.slots,
        theta=theta,
        gamma=gamma,
        seed=seed,
        power=spec.power,
    )
    if spec.mode == "centralized":
        trace = run_centralized(inst, pa, rv, cfg)
    else:
        trace = run_distributed(inst, pa, rv, cfg)
    if not trace.conservation_ok():
        raise InvariantViolation(f"conservation failed for gamma={gamma} seed={seed}")
    tpath, ppath = trace_paths(spec, gamma, seed)
    trace.to_csv(tpath, stride=spec.stride)
    trace.periods_to_csv(ppath)
    st = _stability_for(trace)
    return SummaryRow(
        gamma=gamma,
        seed=seed,
        mode=spec.mode,
        final_max_queue=int(trace.max_queue[-1]),
        stable=st.stable,
        slope=st.slope,
        delivered_fraction=trace.delivered_fraction(),
    )


def run_experiment(spec: ExperimentSpec) -> list[SummaryRow]:
    """Run every (gamma, seed) cell, write trace and summary files, return
    the summary rows (gamma-major, then seed order). Rejects instances with
    dead links before any cell runs."""
    inst, pa = _materialize(spec)
    dead = find_dead_links(inst, pa)
    if dead:
        raise DeadLinkError(dead)
    Path(spec.out).mkdir(parents=True, exist_ok=True)

    cells = [(g, s) for g in spec.gamma for s in spec.seeds]
    if spec.jobs > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=spec.jobs) as pool:
            rows = list(pool.map(_run_cell, *zip(*((spec, g, s) for g, s in cells))))
    else:
        rows = [_run_cell(spec, g, s) for g, s in cells]

    summary = Path(spec.out) / "summary.csv"
    with open(summary, "w", encoding="ascii") as fh:
        fh.write(SUMMARY_HEADER + "\n")
        for r in rows:
            fh.write(
                f"{format(r.gamma, '.17g')},{r.seed},{r.mode},{r.final_max_queue},"
                f"{int(r.stable)},{format(r.slope, '.17g')},{format(r.delivered_fraction, '.17g')}\n"
            )
    return rows


def measured_threshold(rows: list[SummaryRow]) -> float | None:
    """Largest swept gamma whose every seed was judged stable."""
    by_gamma: dict[float, list[bool]] = {}
    for r in rows:
        by_gamma.setdefault(r.gamma, []).append(r.stable)
    stable = [g for g, verdicts in by_gamma.items() if all(verdicts)]
    return max(stable) if stable else None


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="sinrsched",
        description="Run link-scheduling experiments and emit trace/summary CSVs.",
    )
    p.add_argument("--config", help="config file (key=value lines)")
    p.add_argument("--mode", choices=["centralized", "distributed"])
    p.add_argument("--gamma", help="comma-separated load factors, e.g. 0.1,0.2,0.4")
    p.add_argument("--seeds", help="comma-separated run seeds, e.g. 1,2,3")
    p.add_argument("--slots", type=int, help="total (physical) slots per run")
    p.add_argument("--theta-c", dest="theta_c", type=float, help="period length coefficient")
    p.add_argument("--power", choices=["uniform", "linear", "mean"])
    p.add_argument("--out", help="output directory")
    p.add_argument("--stride", type=int, help="trace CSV sampling stride")
    p.add_argument("--instance", help="instance file to load instead of generating")
    p.add_argument("--jobs", type=int, help="parallel sweep cells")
    return p


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.config:
            try:
                text = Path(args.config).read_text(encoding="ascii")
            except OSError as exc:
                raise ConfigError(f"cannot read config {args.config}: {exc}") from None
            spec = parse_config(text)
        else:
            spec = ExperimentSpec()
        overrides = {}
        for key in ("mode", "slots", "theta_c", "power", "out", "stride", "instance", "jobs"):
            v = getattr(args, key)
            if v is not None:
                overrides[key] = v
        if args.gamma is not None:
            overrides["gamma"] = _parse_value("gamma", args.gamma, "--gamma")
        if args.seeds is not None:
            overrides["seeds"] = _parse_value("seeds", args.seeds, "--seeds")
        if overrides:
            spec = replace(spec, **overrides)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    try:
        rows = run_experiment(spec)
    except DeadLinkError as exc:
        print(f"instance rejected: {exc}", file=sys.stderr)
        return 4
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 3
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    print(f"{'gamma':>7} {'seed':>5} {'mode':>12} {'max_q':>8} {'stable':>7} {'slope':>12} {'delivered':>10}")
    for r in rows:
        print(
            f"{r.gamma:>7.4g} {r.seed:>5d} {r.mode:>12} {r.final_max_queue:>8d} "
            f"{str(r.stable):>7} {r.slope:>12.4g} {r.delivered_fraction:>10.4f}"
        )
    thr = measured_threshold(rows)
    if thr is None:
        print("measured stability threshold: none of the swept gammas is stable")
    else:
        print(f"measured stability threshold: gamma = {format(thr, 'g')}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
