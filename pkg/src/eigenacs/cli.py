"""Command-line front end: ``eigenacs {solve, oracle, compare}``."""
from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import os
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any

from .assembly import LossSystem, assemble
from .config import RunConfig, load_config
from .const import (
    COMPARE_FILE,
    ENV_OUT_DIR,
    ENV_THREADS,
    LOSS_HISTORY_FILE,
    LOSS_HISTORY_HEADER,
    MODE_SINGLE,
    ORACLE_FILE,
    REPORT_FILE,
)
from .exceptions import ConfigurationError, EigenAcsError, OracleError
from .features import FeatureBasis, build_basis
from .oracles import OracleSpectrum, reference_spectrum
from .population import run_population
from .solver import EigenpairEstimate, gd_baseline, run_acs

_LOGGER = logging.getLogger(__name__)

_EXTRA_ORACLE_MODES = 4


# ---------------------------------------------------------------------------
# Output helpers
# ---------------------------------------------------------------------------

def json_safe(value: Any) -> Any:
    """Copy of ``value`` with every non-finite float replaced by None."""
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if isinstance(value, dict):
        return {key: json_safe(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [json_safe(item) for item in value]
    return value


def dumps(payload: dict[str, Any]) -> str:
    """Strict JSON text: infinities and NaN are written as null."""
    return json.dumps(json_safe(payload), indent=2, allow_nan=False)


def _write_json(path: Path, payload: dict[str, Any]) -> None:
    path.write_text(dumps(payload) + "\n", encoding="utf-8")
    _LOGGER.info("Wrote %s", path)


def write_loss_history(path: Path, history: Sequence[float]) -> None:
    """CSV of the ACS loss after every half-step (``w`` then ``mu``)."""
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(LOSS_HISTORY_HEADER)
        for i, loss in enumerate(history):
            writer.writerow([i // 2 + 1, "w" if i % 2 == 0 else "mu", repr(float(loss))])
    _LOGGER.info("Wrote %s", path)


def write_field(path: Path, est: EigenpairEstimate, cfg: RunConfig) -> int:
    """Sample the eigenfunction on the clipped uniform grid; returns the row count."""
    points = cfg.problem.domain.grid(cfg.output.field_grid)
    values = est.evaluate(points)
    header = ["x", "y"][: points.shape[1]] + ["u"]
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for point, value in zip(points, values):
            writer.writerow([repr(float(c)) for c in point] + [repr(float(value))])
    _LOGGER.info("Wrote %s (%d rows)", path, len(points))
    return len(points)


def _oracle_for(cfg: RunConfig, count: int) -> OracleSpectrum | None:
    if not cfg.output.compare_oracle or cfg.problem_key is None or cfg.problem.oracle is None:
        return None
    try:
        return reference_spectrum(cfg.problem_key, count, cfg.output.oracle_grid_h)
    except OracleError as err:
        _LOGGER.warning("Oracle comparison skipped: %s", err)
        return None


def oracle_comparison(mu: float, oracle: OracleSpectrum) -> dict[str, Any]:
    """Nearest reference eigenvalue and the relative error against it."""
    if not math.isfinite(mu) or not oracle.entries:
        return {"oracle_mu": None, "oracle_label": None, "relative_error": None}
    nearest = min(oracle.entries, key=lambda e: abs(e.mu - mu))
    return {
        "oracle_mu": nearest.mu,
        "oracle_label": nearest.label,
        "relative_error": abs(mu - nearest.mu) / abs(nearest.mu),
    }


def _build_system(cfg: RunConfig) -> tuple[FeatureBasis, LossSystem]:
    spec = cfg.problem
    basis = build_basis(cfg.basis.width, spec.dim, cfg.basis.resolve_bandwidth(spec), cfg.basis.seed)
    colloc = cfg.collocation.sample(spec, cfg.collocation.seed, basis_width=basis.width)
    return basis, assemble(spec, basis, colloc, cfg.weights)


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_solve(config_path: str | Path, out_dir: Path, threads: int = 1, cfg: RunConfig | None = None) -> int:
    """Run one strand or a population search and write the report files."""
    cfg = cfg or load_config(config_path)
    out_dir.mkdir(parents=True, exist_ok=True)
    spec = cfg.problem

    if cfg.mode == MODE_SINGLE:
        basis, sys_ = _build_system(cfg)
        est = run_acs(sys_, cfg.initial_mu, cfg.acs)
        est.basis = basis
        modes = [est]
        entry = est.as_dict(include_weights=True)
        oracle = _oracle_for(cfg, _EXTRA_ORACLE_MODES)
        if oracle is not None:
            entry.update(oracle_comparison(est.mu, oracle))
        report: dict[str, Any] = {
            "problem": spec.name,
            "mode": MODE_SINGLE,
            "estimate": entry,
            "system": sys_.summary(),
            "provenance": cfg.as_dict(),
        }
        _LOGGER.info("%s: %s, mu=%.12g, lambda=%.12g", spec.name, est.status, est.mu, est.lambda_phys)
    else:
        spectrum = run_population(
            spec,
            cfg.basis,
            cfg.acs,
            cfg.population,
            collocation=cfg.collocation,
            weights=cfg.weights,
            threads=threads,
            provenance=cfg.as_dict(),
        )
        modes = spectrum.modes
        report = spectrum.as_dict()
        report["mode"] = cfg.mode
        oracle = _oracle_for(cfg, len(modes) + _EXTRA_ORACLE_MODES)
        if oracle is not None:
            for mode, entry in zip(modes, report["modes"]):
                entry.update(oracle_comparison(mode.mu, oracle))
        _LOGGER.info("%s: %d modes, mu = %s", spec.name, len(modes), ", ".join(f"{m.mu:.8g}" for m in modes))

    _write_json(out_dir / REPORT_FILE, report)
    if modes:
        write_loss_history(out_dir / LOSS_HISTORY_FILE, modes[0].loss_history)
    if cfg.mode != MODE_SINGLE:
        stem = Path(LOSS_HISTORY_FILE).stem
        for k, mode in enumerate(modes, start=1):
            write_loss_history(out_dir / f"{stem}_{k}.csv", mode.loss_history)
    if cfg.output.emit_fields:
        for k, mode in enumerate(modes, start=1):
            if mode.basis is not None and mode.weights.size:
                write_field(out_dir / f"mode_{k}.csv", mode, cfg)
    return 0


def cmd_oracle(problem: str, count: int, out_dir: Path, grid_h: float | None = None) -> int:
    """Write the reference spectrum of a catalog problem."""
    if count < 1:
        raise ConfigurationError(f"must be at least 1, got {count}", "count")
    spectrum = reference_spectrum(problem, count, grid_h)
    out_dir.mkdir(parents=True, exist_ok=True)
    payload = spectrum.as_dict()
    _write_json(out_dir / ORACLE_FILE, payload)
    print(dumps(payload))
    return 0


def time_to_reach(history: Sequence[float], elapsed: Sequence[float], target: float) -> float | None:
    """Elapsed time at which ``history`` first drops to ``target``, else None."""
    for loss, t in zip(history, elapsed):
        if loss <= target:
            return t
    return None


def cmd_compare(config_path: str | Path, out_dir: Path, cfg: RunConfig | None = None) -> int:
    """ACS against the gradient-descent baseline on one shared loss system."""
    cfg = cfg or load_config(config_path)
    out_dir.mkdir(parents=True, exist_ok=True)
    _, sys_ = _build_system(cfg)
    mu0 = cfg.initial_mu

    acs = run_acs(sys_, mu0, cfg.acs)
    gd = gd_baseline(
        sys_,
        mu0,
        None,
        cfg.gd.lr,
        cfg.gd.steps,
        beta1=cfg.gd.beta1,
        beta2=cfg.gd.beta2,
        eps=cfg.gd.eps,
        time_budget=cfg.gd.time_budget,
    )
    target = acs.final_loss
    reached = time_to_reach(gd.loss_history, gd.elapsed, target)
    gd_time = reached if reached is not None else gd.wall_time
    speedup = gd_time / acs.wall_time if acs.wall_time > 0 else math.inf

    def summary(est: EigenpairEstimate) -> dict[str, Any]:
        return {
            "status": est.status,
            "iterations": est.iterations,
            "final_loss": est.final_loss,
            "mu": est.mu if math.isfinite(est.mu) else None,
            "lambda_phys": est.lambda_phys if math.isfinite(est.lambda_phys) else None,
        }

    payload: dict[str, Any] = {
        "problem": cfg.problem.name,
        "mu0": mu0,
        "target_loss": target,
        "acs": summary(acs),
        "gd": {**summary(gd), "reached_target": reached is not None},
        "timing": {
            "acs_wall_time": acs.wall_time,
            "gd_wall_time": gd.wall_time,
            "gd_time_to_target": gd_time,
            "speedup": speedup,
        },
        "provenance": cfg.as_dict(),
    }
    oracle = _oracle_for(cfg, _EXTRA_ORACLE_MODES)
    if oracle is not None:
        payload["acs"].update(oracle_comparison(acs.mu, oracle))
        payload["gd"].update(oracle_comparison(gd.mu, oracle))
    _write_json(out_dir / COMPARE_FILE, payload)
    _LOGGER.info("%s: speedup %.1fx (GD reached ACS loss: %s)", cfg.problem.name, speedup, reached is not None)
    return 0


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="count", default=0, help="Increase log verbosity (repeatable).")
    common.add_argument("--out", default=None, help=f"Output directory (default: ${ENV_OUT_DIR} or the config's).")

    parser = argparse.ArgumentParser(prog="eigenacs", description="Differential eigenvalue solver.")
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", parents=[common], help="Solve a configured eigenvalue problem.")
    solve.add_argument("config", help="JSON run configuration.")
    solve.add_argument("--threads", type=int, default=None, help=f"Strand workers (default: ${ENV_THREADS} or CPUs).")

    oracle = sub.add_parser("oracle", parents=[common], help="Reference eigenvalues of a catalog problem.")
    oracle.add_argument("problem", help="Catalog key.")
    oracle.add_argument("count_pos", nargs="?", type=int, default=None, metavar="count")
    oracle.add_argument("--count", type=int, default=None, help="Number of eigenvalues (default 1).")
    oracle.add_argument("--grid-h", type=float, default=None, help="Finite-difference grid spacing.")

    compare = sub.add_parser("compare", parents=[common], help="ACS against the gradient-descent baseline.")
    compare.add_argument("config", help="JSON run configuration.")
    return parser


def _threads(requested: int | None) -> int:
    if requested is None:
        env = os.environ.get(ENV_THREADS)
        if env:
            try:
                requested = int(env)
            except ValueError as err:
                raise ConfigurationError(f"not an integer: '{env}'", ENV_THREADS) from err
        else:
            requested = os.cpu_count() or 1
    if requested < 1:
        raise ConfigurationError(f"must be at least 1, got {requested}", "threads")
    return requested


def _out_dir(requested: str | None, cfg: RunConfig | None = None) -> Path:
    if requested:
        return Path(requested)
    env = os.environ.get(ENV_OUT_DIR)
    if env:
        return Path(env)
    if cfg is not None and cfg.output.directory:
        return Path(cfg.output.directory)
    return Path(".")


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    level = (logging.WARNING, logging.INFO, logging.DEBUG)[min(args.verbose, 2)]
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")

    try:
        if args.command == "solve":
            cfg = load_config(args.config)
            return cmd_solve(args.config, _out_dir(args.out, cfg), _threads(args.threads), cfg=cfg)
        if args.command == "oracle":
            count = args.count if args.count is not None else (args.count_pos or 1)
            return cmd_oracle(args.problem, count, _out_dir(args.out), args.grid_h)
        cfg = load_config(args.config)
        return cmd_compare(args.config, _out_dir(args.out, cfg), cfg=cfg)
    except (EigenAcsError, OSError) as err:
        _LOGGER.error("%s failed: %s", args.command, err, exc_info=args.verbose >= 2)
        print(f"eigenacs: error: {err}", file=sys.stderr)
        return 2
