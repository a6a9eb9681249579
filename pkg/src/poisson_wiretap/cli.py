"""Command-line front end.

Configuration is a flat ``key = value`` file with dotted section names::

    channel.alpha_b = 2.0
    channel.lambda_b = 1.0
    channel.alpha_e = 1.0
    channel.lambda_e = 2.0
    channel.delta = 0.5
    constraints.peak = 10
    constraints.average = 2.5
    solver.kkt_tol = 1e-6

``constraints.ratio`` may replace ``constraints.average`` to tie the mean to
the peak (``E = ratio * A``), which is what a peak sweep usually wants.
Every key can be overridden with ``--set key=value``.

Exit codes: 0 success, 1 invalid input, 2 solver stall.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .asymptotics import (
    classify_regime,
    ct_secrecy_capacity,
    high_intensity_bound,
    phi,
)
from .channel import ChannelParams, DiscreteDistribution, IntensityConstraints, Side, TruncationPolicy
from .errors import BracketError, DomainError, SolverStallError
from .optimizer import SolveResult, SolverConfig, channel_capacity, kkt_verify, solve
from .region import default_mu_grid, detect_tradeoff, trace_boundary

log = logging.getLogger("poisson_wiretap")

EXIT_OK, EXIT_INVALID, EXIT_STALL = 0, 1, 2
LOG_BASES = {"nats": 1.0, "bits": 1.0 / math.log(2.0)}

_CHANNEL_KEYS = ("alpha_b", "lambda_b", "alpha_e", "lambda_e", "delta")
_SOLVER_INT_KEYS = {"grid_size", "window_points", "max_support", "max_outer_iters",
                    "max_inner_iters", "max_refine_sweeps"}


class ConfigError(DomainError):
    pass


@dataclass(frozen=True)
class RunConfig:
    params: ChannelParams
    constraints: IntensityConstraints
    solver: SolverConfig
    truncation: TruncationPolicy
    output_dir: Path
    log_base: str = "nats"
    ratio: Optional[float] = None

    def __post_init__(self) -> None:
        if self.log_base not in LOG_BASES:
            raise ConfigError(f"log_base must be 'nats' or 'bits', got {self.log_base!r}")

    @property
    def scale(self) -> float:
        return LOG_BASES[self.log_base]

    def with_constraints(self, peak: Optional[float] = None, average: Optional[float] = None,
                         params: Optional[ChannelParams] = None) -> "RunConfig":
        peak = self.constraints.peak if peak is None else peak
        if average is None:
            average = self.ratio * peak if self.ratio is not None and peak is not None \
                else self.constraints.average
        return replace(self, constraints=IntensityConstraints(peak=peak, average=average),
                       params=params or self.params)

    def metadata(self) -> dict:
        return {
            "package_version": __version__,
            "params": self.params.to_dict(),
            "constraints": self.constraints.to_dict(),
            "solver": {f.name: getattr(self.solver, f.name) for f in fields(self.solver)
                       if f.name != "truncation"},
            "truncation": {"epsilon_tail": self.truncation.epsilon_tail,
                           "y_max_cap": self.truncation.y_max_cap},
            "log_base": self.log_base,
        }


def parse_config_text(text: str) -> dict[str, str]:
    """Read ``section.key = value`` lines; ``#`` starts a comment."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key or not value:
            raise ConfigError(f"line {lineno}: empty key or value")
        out[key] = value.strip("'\"")
    return out


def _number(key: str, value: str, integer: bool = False):
    try:
        return int(float(value)) if integer else float(value)
    except ValueError:
        raise ConfigError(f"{key}: not a number: {value!r}") from None


def build_config(entries: dict[str, str]) -> RunConfig:
    entries = dict(entries)
    channel = {}
    for key in _CHANNEL_KEYS:
        full = f"channel.{key}"
        if full not in entries:
            raise ConfigError(f"missing required key {full}")
        channel[key] = _number(full, entries.pop(full))
    params = ChannelParams(**channel)

    peak = entries.pop("constraints.peak", None)
    average = entries.pop("constraints.average", None)
    ratio = entries.pop("constraints.ratio", None)
    peak = None if peak is None or peak.lower() == "none" else _number("constraints.peak", peak)
    average = None if average is None or average.lower() == "none" \
        else _number("constraints.average", average)
    ratio = None if ratio is None else _number("constraints.ratio", ratio)
    if ratio is not None:
        if average is not None:
            raise ConfigError("set either constraints.average or constraints.ratio, not both")
        if peak is None:
            raise ConfigError("constraints.ratio needs constraints.peak")
        if not 0.0 < ratio:
            raise ConfigError("constraints.ratio must be positive")
        average = ratio * peak
    if peak is None and average is None:
        raise ConfigError("missing field: constraints.peak or constraints.average")
    constraints = IntensityConstraints(peak=peak, average=average)

    trunc_kw = {}
    if "truncation.epsilon_tail" in entries:
        trunc_kw["epsilon_tail"] = _number("truncation.epsilon_tail",
                                           entries.pop("truncation.epsilon_tail"))
    if "truncation.y_max_cap" in entries:
        trunc_kw["y_max_cap"] = _number("truncation.y_max_cap",
                                        entries.pop("truncation.y_max_cap"), integer=True)
    truncation = TruncationPolicy(**trunc_kw)

    solver_kw = {}
    names = {f.name for f in fields(SolverConfig)} - {"truncation"}
    for key in [k for k in entries if k.startswith("solver.")]:
        name = key.split(".", 1)[1]
        if name not in names:
            raise ConfigError(f"unknown key {key}")
        solver_kw[name] = _number(key, entries.pop(key), integer=name in _SOLVER_INT_KEYS)
    solver = SolverConfig(truncation=truncation, **solver_kw)

    output_dir = Path(entries.pop("output.dir", "."))
    log_base = entries.pop("output.log_base", "nats")
    if entries:
        raise ConfigError(f"unknown keys: {', '.join(sorted(entries))}")
    return RunConfig(params=params, constraints=constraints, solver=solver,
                     truncation=truncation, output_dir=output_dir, log_base=log_base,
                     ratio=ratio)


def load_config(path: Optional[str], overrides: Sequence[str], out: Optional[str],
                log_base: Optional[str]) -> RunConfig:
    entries: dict[str, str] = {}
    if path is not None:
        try:
            entries.update(parse_config_text(Path(path).read_text()))
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, value = (s.strip() for s in item.split("=", 1))
        entries[key] = value
    if out is not None:
        entries["output.dir"] = out
    if log_base is not None:
        entries["output.log_base"] = log_base
    return build_config(entries)


# ---------------------------------------------------------------- output


def _fmt(value: float) -> str:
    if isinstance(value, str):
        return value
    if value is None or not math.isfinite(value):
        return "nan" if value is None or math.isnan(value) else ("inf" if value > 0 else "-inf")
    return f"{value:.12g}"


def _write_csv(path: Path, header: Sequence[str], rows) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    path.write_text(buf.getvalue())


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _prepare(cfg: RunConfig) -> Path:
    out = cfg.output_dir
    out.mkdir(parents=True, exist_ok=True)
    return out


def solution_payload(result: SolveResult, cfg: RunConfig) -> dict:
    k = cfg.scale
    return {
        "mu": result.mu,
        "distribution": result.dist.to_dict(),
        "objective": result.objective * k,
        "gamma": result.gamma * k,
        "rates": {"I_B": result.rate_b * k, "I_E": result.rate_e * k,
                  "secrecy": result.secrecy_rate * k},
        "kkt": {
            "max_violation": result.kkt.max_violation * k,
            "equality_residual": result.kkt.equality_residual * k,
            "level": result.kkt.level * k,
            "passes": bool(result.kkt.passes(cfg.solver.kkt_tol)),
        },
        "iterations": result.iterations,
        "metadata": cfg.metadata(),
    }


def run_solve(cfg: RunConfig, mu: float) -> int:
    result = solve(mu, cfg.params, cfg.constraints, cfg.solver)
    out = _prepare(cfg)
    _write_json(out / "solution.json", solution_payload(result, cfg))
    k = cfg.scale
    _write_csv(out / "kkt_slack.csv", ("x", "slack"),
               zip(result.kkt.grid, result.kkt.slack * k))
    log.info("certified: %d mass points, objective %.12g", len(result.dist), result.objective)
    return EXIT_OK


def run_region(cfg: RunConfig, mu_grid: Sequence[float], jobs: int = 1) -> int:
    points = trace_boundary(cfg.params, cfg.constraints, mu_grid, cfg.solver,
                            warm_start=jobs <= 1, jobs=jobs)
    out = _prepare(cfg)
    k = cfg.scale
    _write_csv(out / "region.csv", ("mu", "R", "Re"),
               ((p.mu, p.rate_R * k, p.equivocation_Re * k) for p in points))
    has_ends = {0.0, 1.0} <= {p.mu for p in points}
    tradeoff = detect_tradeoff(points, peak=cfg.constraints.peak,
                               merge_tol=cfg.solver.merge_tol) if has_ends else None
    meta = cfg.metadata()
    meta["tradeoff"] = tradeoff
    _write_json(out / "region_dists.json", {
        "points": [{"mu": p.mu, "R": p.rate_R * k, "Re": p.equivocation_Re * k,
                    "gamma": p.gamma * k, "distribution": p.dist.to_dict()} for p in points],
        "metadata": meta,
    })
    return EXIT_OK


def _sweep_row(task):
    cfg, value = task
    try:
        ct = ct_secrecy_capacity(cfg.params, cfg.constraints.peak, cfg.constraints.average)[0]
        hi = high_intensity_bound(cfg.params)
        c_s = solve(0.0, cfg.params, cfg.constraints, cfg.solver).objective
        c_b = channel_capacity(Side.LEGITIMATE, cfg.params, cfg.constraints, cfg.solver).objective
        c_e = channel_capacity(Side.EAVESDROPPER, cfg.params, cfg.constraints, cfg.solver).objective
    except SolverStallError as exc:
        return (value, math.nan, math.nan, math.nan, math.nan, math.nan, f"stall: {exc}")
    except (DomainError, BracketError) as exc:
        return (value, math.nan, math.nan, math.nan, math.nan, math.nan, f"error: {exc}")
    k = cfg.scale
    return (value, c_s * k, c_b * k, c_e * k, ct * k, hi * k, "ok")


def run_sweep(cfg: RunConfig, variable: str, values: Sequence[float], jobs: int = 1) -> int:
    values = [float(v) for v in values]
    if not values:
        raise ConfigError("--values is empty")
    if any(not v > 0.0 for v in values):
        raise ConfigError("sweep values must be positive")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ConfigError("sweep values must be strictly increasing")
    tasks = []
    for v in values:
        if variable == "peak":
            row_cfg = cfg.with_constraints(peak=v)
        elif variable == "average":
            if cfg.constraints.peak is None:
                raise ConfigError("an average sweep needs constraints.peak")
            row_cfg = replace(cfg, ratio=None).with_constraints(average=v)
        elif variable == "delta":
            row_cfg = cfg.with_constraints(params=cfg.params.replace(delta=v))
        else:
            raise ConfigError(f"unknown sweep variable {variable!r}")
        if row_cfg.constraints.peak is None:
            raise ConfigError("sweeps need constraints.peak")
        tasks.append((row_cfg, v))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_row, tasks))
    else:
        rows = [_sweep_row(t) for t in tasks]
    out = _prepare(cfg)
    _write_csv(out / "sweep.csv", ("value", "C_S", "C_B", "C_E", "ct_bound", "hi_bound", "status"),
               rows)
    failed = [r for r in rows if r[-1] != "ok"]
    for r in failed:
        log.error("value %s: %s", _fmt(r[0]), r[-1])
    return EXIT_OK if not failed else EXIT_STALL


def run_asymptotics(cfg: RunConfig, limit: str = "low", vary: Optional[str] = None) -> int:
    k = cfg.scale
    report = classify_regime(cfg.params, cfg.constraints, limit=limit, vary=vary)
    payload = report.to_dict()
    for key in ("value", "lower", "upper"):
        if key in payload:
            payload[key] *= k
    extras: dict = {"high_intensity_bound": high_intensity_bound(cfg.params) * k}
    peak = cfg.constraints.peak
    if peak is not None:
        extras["phi_at_peak"] = phi(peak, cfg.params) * k
        value, p_star = ct_secrecy_capacity(cfg.params, peak, cfg.constraints.average)
        extras["ct_secrecy_capacity"] = value * k
        extras["ct_duty_cycle"] = p_star
    out = _prepare(cfg)
    _write_json(out / "asymptotics.json", {"report": payload, "bounds": extras,
                                            "metadata": cfg.metadata()})
    return EXIT_OK


def run_verify(cfg: RunConfig, path: Optional[str] = None) -> int:
    """Re-run the KKT check on a stored ``solution.json``."""
    src = Path(path) if path else cfg.output_dir / "solution.json"
    try:
        stored = json.loads(src.read_text())
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read {src}: {exc}") from None
    meta = stored["metadata"]
    params = ChannelParams(**meta["params"])
    constraints = IntensityConstraints(**meta["constraints"])
    k = LOG_BASES[meta["log_base"]]
    solver_cfg = replace(cfg.solver, **{key: val for key, val in meta["solver"].items()})
    solver_cfg = replace(solver_cfg, truncation=TruncationPolicy(**meta["truncation"]))
    dist = DiscreteDistribution.from_dict(stored["distribution"])
    report = kkt_verify(dist, stored["gamma"] / k, stored["mu"], params, constraints, solver_cfg)
    drift = max(abs(report.max_violation * k - stored["kkt"]["max_violation"]),
                abs(report.equality_residual * k - stored["kkt"]["equality_residual"]))
    ok = report.passes(solver_cfg.kkt_tol)
    print(json.dumps({"max_violation": report.max_violation * k,
                      "equality_residual": report.equality_residual * k,
                      "drift": drift, "passes": ok}, sort_keys=True))
    return EXIT_OK if ok and drift <= 1e-12 else EXIT_STALL


# ---------------------------------------------------------------- parser


def _parse_values(text: str) -> list[float]:
    items = [s for s in (t.strip() for t in text.split(",")) if s]
    try:
        return [float(s) for s in items]
    except ValueError:
        raise ConfigError(f"--values must be comma-separated numbers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value configuration file")
    common.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                        help="override one configuration key (repeatable)")
    common.add_argument("--out", help="output directory")
    common.add_argument("--log-base", choices=sorted(LOG_BASES), help="units of written rates")
    common.add_argument("-v", "--verbose", action="count", default=0)

    parser = argparse.ArgumentParser(prog="poisson-wiretap",
                                     description="Secrecy capacity of the Poisson wiretap channel")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", parents=[common], help="optimal input for one mu")
    p.add_argument("--mu", type=float, default=0.0)

    p = sub.add_parser("region", parents=[common], help="rate-equivocation boundary")
    p.add_argument("--mu-grid", type=int, default=21, help="number of uniform mu values")
    p.add_argument("--jobs", type=int, default=1, help="cold-start parallel workers")

    p = sub.add_parser("sweep", parents=[common], help="capacities over one parameter")
    p.add_argument("--var", choices=("peak", "average", "delta"), required=True)
    p.add_argument("--values", required=True, help="comma-separated increasing values")
    p.add_argument("--jobs", type=int, default=1)

    p = sub.add_parser("asymptotics", parents=[common], help="closed-form limits and bounds")
    p.add_argument("--limit", choices=("low", "high"), default="low")
    p.add_argument("--vary", choices=("both", "average"),
                   help="which constraint shrinks when both are given")

    p = sub.add_parser("verify", parents=[common], help="re-check a stored solution")
    p.add_argument("solution", nargs="?", help="path to solution.json (default: <out>/solution.json)")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        if args.command == "verify" and args.config is None and not args.set:
            cfg = None
        else:
            cfg = load_config(args.config, args.set, args.out, args.log_base)
        if args.command == "solve":
            return run_solve(cfg, args.mu)
        if args.command == "region":
            return run_region(cfg, default_mu_grid(args.mu_grid), args.jobs)
        if args.command == "sweep":
            return run_sweep(cfg, args.var, _parse_values(args.values), args.jobs)
        if args.command == "asymptotics":
            return run_asymptotics(cfg, args.limit, args.vary)
        if cfg is None:
            cfg = _verify_defaults(args.out)
        return run_verify(cfg, args.solution)
    except SolverStallError as exc:
        print(f"solver stall: {exc}", file=sys.stderr)
        return EXIT_STALL
    except (DomainError, BracketError, KeyError, TypeError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID


def _verify_defaults(out: Optional[str]) -> RunConfig:
    # verify only needs solver defaults and a directory; the channel comes from the file
    dummy = ChannelParams(1.0, 1.0, 1.0, 1.0, 1.0)
    return RunConfig(params=dummy, constraints=IntensityConstraints(peak=1.0),
                     solver=SolverConfig(), truncation=TruncationPolicy(),
                     output_dir=Path(out or "."))


if __name__ == "__main__":
    sys.exit(main())
