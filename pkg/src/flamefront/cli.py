"""Command-line interface: reproducible experiment runs with manifests.

Subcommands: ``simulate``, ``sweep-epsilon``, ``sweep-delta``,
``dispersion``, ``energy-report``, ``lemma-eval``.  Outputs land under a
directory named by the configuration hash; every run writes a manifest
recording the resolved configuration, the code version, per-run outcomes,
and a content hash of every emitted file.

Exit codes: 0 success, 2 configuration error, 3 blow-up (or too few
surviving runs), 4 validation-threshold failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import platform
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import energy_report, existence_time, gronwall_threshold, GronwallParams
from .config import (
    ConfigError,
    RunConfig,
    build_initial_condition,
    config_hash,
    config_sections,
    parse_config_file,
    serialize_config,
)
from .fieldio import field_to_csv, load_field, save_field, write_diagnostics_csv
from .stepping import StepperConfig, integrate
from .validation import delta_convergence, dispersion_check, epsilon_sweep

__all__ = ["main", "entrypoint", "run"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BLOWUP = 3
EXIT_VALIDATION = 4

def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write_manifest(out_dir: Path, cfg: RunConfig, outcomes: dict[str, str]) -> None:
    files = {
        str(p.relative_to(out_dir)): _sha256(p)
        for p in sorted(out_dir.rglob("*"))
        if p.is_file() and p.name != "manifest.json"
    }
    manifest = {
        "config": config_sections(cfg),
        "config_hash": config_hash(cfg),
        "code_version": __version__,
        "platform": {
            "python": platform.python_version(),
            "numpy": np.__version__,
            "machine": platform.machine(),
        },
        "outcomes": outcomes,
        "files": files,
    }
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True))


def _prepare_out_dir(cfg: RunConfig, output_root: str | None) -> Path:
    root = Path(output_root) if output_root else Path(cfg.outputs.directory)
    out_dir = root / config_hash(cfg)[:12]
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "config.toml").write_text(serialize_config(cfg))
    return out_dir


def _emit_series(out_dir: Path, cfg: RunConfig, series) -> None:
    write_diagnostics_csv(out_dir / "diagnostics.csv", series.diagnostics)
    for index, snap in enumerate(series.snapshots):
        if "fld" in cfg.outputs.formats:
            save_field(out_dir / f"snap_{index}.fld", snap)
        if "csv" in cfg.outputs.formats:
            field_to_csv(out_dir / f"snap_{index}.csv", snap)


def _cmd_simulate(cfg: RunConfig, out_dir: Path) -> int:
    u0 = build_initial_condition(cfg)
    series = integrate(u0, cfg.model, cfg.stepper)
    _emit_series(out_dir, cfg, series)
    outcome = (
        "completed"
        if series.completed
        else f"blew_up(t={series.blowup_time:.6g})"
    )
    _write_manifest(out_dir, cfg, {"simulate": outcome})
    return EXIT_OK if series.completed else EXIT_BLOWUP


def _sweep_stepper(cfg: RunConfig) -> StepperConfig:
    tau_star = cfg.experiment.tau_star
    return StepperConfig(
        dt=cfg.stepper.dt,
        scheme=cfg.stepper.scheme,
        t_end=tau_star,
        snapshot_every=max(cfg.stepper.dt, tau_star / 200.0),
    )


def _cmd_sweep_epsilon(cfg: RunConfig, out_dir: Path) -> int:
    u0 = build_initial_condition(cfg)
    sweep_cfg = _sweep_stepper(cfg)
    try:
        result = epsilon_sweep(
            u0, cfg.experiment.eps_values, cfg.experiment.tau_star, sweep_cfg
        )
    except RuntimeError as exc:
        _write_manifest(out_dir, cfg, {"sweep-epsilon": f"failed({exc})"})
        print(f"sweep-epsilon: {exc}", file=sys.stderr)
        return EXIT_BLOWUP
    with open(out_dir / "sweep.csv", "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["epsilon", "sup_error", "y_space_error"])
        for eps, sup, yerr in zip(
            result.eps_values, result.sup_errors, result.y_space_errors
        ):
            writer.writerow([_fmt(eps), _fmt(sup), _fmt(yerr)])
    summary = {
        "slope": result.fitted_slope,
        "tau_star": result.tau_star,
        "config_hash": config_hash(cfg),
        "dropped": [list(d) for d in result.dropped],
    }
    (out_dir / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True))
    passed = result.fitted_slope >= cfg.experiment.slope_threshold
    outcome = f"completed(slope={result.fitted_slope:.4f})"
    if result.dropped:
        outcome += f", dropped {len(result.dropped)} runs"
    _write_manifest(out_dir, cfg, {"sweep-epsilon": outcome})
    print(
        f"sweep-epsilon: slope = {result.fitted_slope:.4f} "
        f"(threshold {cfg.experiment.slope_threshold})"
    )
    return EXIT_OK if passed else EXIT_VALIDATION


def _cmd_sweep_delta(cfg: RunConfig, out_dir: Path) -> int:
    y0 = build_initial_condition(cfg)
    result = delta_convergence(
        y0,
        cfg.model.alpha,
        cfg.experiment.delta_values,
        cfg.stepper.t_end,
        cfg.stepper,
    )
    with open(out_dir / "delta_sweep.csv", "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["delta", "delta_next", "h4_difference"])
        for (a, b), diff in zip(
            zip(result.delta_values, result.delta_values[1:]), result.h4_differences
        ):
            writer.writerow([_fmt(a), _fmt(b), _fmt(diff)])
    diffs = result.h4_differences
    monotone = all(b <= a * (1.0 + 1e-12) for a, b in zip(diffs, diffs[1:]))
    summary = {
        "h4_differences": list(diffs),
        "monotone_nonincreasing": monotone,
        "config_hash": config_hash(cfg),
        "dropped": [list(d) for d in result.dropped],
    }
    (out_dir / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True))
    _write_manifest(
        out_dir, cfg, {"sweep-delta": "completed" if monotone else "nonmonotone"}
    )
    if result.dropped:
        return EXIT_BLOWUP
    return EXIT_OK if monotone else EXIT_VALIDATION


def _cmd_dispersion(cfg: RunConfig, out_dir: Path) -> int:
    rows = []
    worst = 0.0
    for mode in cfg.experiment.modes:
        try:
            res = dispersion_check(
                cfg.grid.L,
                mode,
                cfg.experiment.amplitude,
                cfg.stepper,
                n_points=cfg.grid.N,
            )
        except ValueError as exc:
            rows.append([str(mode), "", "", "", f"rejected: {exc}"])
            continue
        rel = abs(res.measured_rate - res.analytic_rate) / abs(res.analytic_rate)
        worst = max(worst, rel)
        rows.append(
            [
                str(mode),
                _fmt(res.wavenumber),
                _fmt(res.measured_rate),
                _fmt(res.analytic_rate),
                _fmt(rel),
            ]
        )
    with open(out_dir / "dispersion.csv", "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["mode", "k", "measured_rate", "analytic_rate", "rel_error"])
        writer.writerows(rows)
    passed = worst <= cfg.experiment.dispersion_tolerance
    _write_manifest(
        out_dir, cfg, {"dispersion": f"completed(worst_rel_error={worst:.3e})"}
    )
    print(f"dispersion: worst relative error {worst:.3e}")
    return EXIT_OK if passed else EXIT_VALIDATION


def _cmd_energy_report(cfg: RunConfig, out_dir: Path, snapshot: str | None) -> int:
    fld = load_field(snapshot, cfg.grid) if snapshot else build_initial_condition(cfg)
    report = energy_report(fld)
    write_diagnostics_csv(out_dir / "energy.csv", [report])
    for name, value in zip(report.__dataclass_fields__, report.row()):
        print(f"{name} = {value:.12g}")
    _write_manifest(out_dir, cfg, {"energy-report": "completed"})
    return EXIT_OK


def run(cmd: str, cfg: RunConfig, output_root: str | None = None,
        snapshot: str | None = None) -> tuple[int, Path]:
    """Execute one subcommand against a parsed configuration."""
    out_dir = _prepare_out_dir(cfg, output_root)
    if cmd == "simulate":
        return _cmd_simulate(cfg, out_dir), out_dir
    if cmd == "sweep-epsilon":
        return _cmd_sweep_epsilon(cfg, out_dir), out_dir
    if cmd == "sweep-delta":
        return _cmd_sweep_delta(cfg, out_dir), out_dir
    if cmd == "dispersion":
        return _cmd_dispersion(cfg, out_dir), out_dir
    if cmd == "energy-report":
        return _cmd_energy_report(cfg, out_dir, snapshot), out_dir
    raise ValueError(f"unknown command {cmd!r}")


def _lemma_eval(args: argparse.Namespace) -> int:
    if args.lemma == "existence-time":
        value = existence_time(args.h4_norm, args.gamma, args.m)
        print(f"{value:.12g}")
        return EXIT_OK
    params = GronwallParams(
        alpha=args.alpha,
        beta=args.beta,
        eps=args.eps,
        n=args.n,
        m=args.m,
        gamma_star=args.gamma_star,
        t_star=args.t_star,
        e0=args.e0,
    )
    result = gronwall_threshold(params)
    print(f"tau0 = {result.tau0:.12g}")
    print(f"e_star = {result.e_star:.12g}")
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flamefront",
        description="Pseudospectral flame-front and Kuramoto-Sivashinsky experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name in ("simulate", "sweep-epsilon", "sweep-delta", "dispersion"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="path to a TOML run config")
        p.add_argument("--output", default=None, help="override the output root")

    p = sub.add_parser("energy-report")
    p.add_argument("--config", required=True)
    p.add_argument("--output", default=None)
    p.add_argument("--snapshot", default=None, help="report on a saved .fld snapshot")

    p = sub.add_parser("lemma-eval")
    lemma_sub = p.add_subparsers(dest="lemma", required=True)
    et = lemma_sub.add_parser("existence-time")
    et.add_argument("h4_norm", type=float)
    et.add_argument("gamma", type=float)
    et.add_argument("m", type=float)
    gt = lemma_sub.add_parser("gronwall-threshold")
    for arg in ("alpha", "beta", "eps"):
        gt.add_argument(arg, type=float)
    gt.add_argument("n", type=int)
    for arg in ("m", "gamma_star", "t_star", "e0"):
        gt.add_argument(arg, type=float)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "lemma-eval":
            return _lemma_eval(args)
        cfg = parse_config_file(args.config)
        snapshot = getattr(args, "snapshot", None)
        code, out_dir = run(args.command, cfg, args.output, snapshot)
        print(f"outputs: {out_dir}")
        return code
    except (ConfigError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def entrypoint() -> None:  # console script target
    sys.exit(main())
