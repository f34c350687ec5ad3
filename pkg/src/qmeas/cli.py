"""Command line interface.

Subcommands:
    sweep     closed-form triple and bound gaps over a family parameter grid
    verify    validate a measurement JSON file and report its bound gaps
    simulate  run the simulated counting experiment (or its exact limit)
    compile   emit waveplate angle tables for a family point or a file

Exit codes: 0 success, 2 configuration error, 3 completeness violation,
4 runtime failure, 5 measurement not realizable as waveplate angles.
The RNG seed comes from --seed, else the QMEAS_SEED environment variable,
else 0; a fixed seed makes every command byte-reproducible.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import serialize
from .bounds import bound_report
from .errors import (
    CompletenessError,
    ConfigError,
    InsufficientDataError,
    NotRealizableError,
    QmeasError,
)
from .experiment import ExperimentResult, fit_noise, run_experiment
from .families import compile_angles, default_grid, family, family_domain, sweep

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_COMPLETENESS = 3
EXIT_RUNTIME = 4
EXIT_NOT_REALIZABLE = 5


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved options for one CLI invocation."""

    command: str
    family: int | None = None
    grid: np.ndarray | None = None
    p: float | None = None
    e: float = 1.0
    shots: int = 10_000
    runs: int = 100
    seed: int = 0
    exact: bool = False
    fit_e: bool = False
    fmt: str = "csv"
    out: str | None = None
    infile: str | None = None
    tol: float = 1e-6


def _parse_grid(text: str) -> np.ndarray:
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"grid must be start:end:count, got {text!r}")
    try:
        start, end = float(parts[0]), float(parts[1])
        count = int(parts[2])
    except ValueError as exc:
        raise ConfigError(f"grid must be start:end:count, got {text!r}") from exc
    if count < 1:
        raise ConfigError(f"grid count must be >= 1, got {count}")
    return np.linspace(start, end, count)


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("QMEAS_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise ConfigError(f"QMEAS_SEED must be an integer, got {env!r}") from exc
    return 0


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _json_dumps(payload) -> str:
    return json.dumps(payload, indent=2) + "\n"


def cmd_sweep(cfg: RunConfig) -> int:
    grid = cfg.grid if cfg.grid is not None else default_grid(cfg.family)
    rows = sweep(cfg.family, grid)
    if cfg.fmt == "json":
        payload = [dict({"t": r.t, "p": r.p}, **r.report.to_dict()) for r in rows]
        _emit(_json_dumps(payload), cfg.out)
    else:
        _emit(serialize.sweep_csv(rows), cfg.out)
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    m = serialize.load_measurement(cfg.infile, tol=cfg.tol)
    report = bound_report(m)
    if cfg.fmt == "json":
        _emit(_json_dumps(report.to_dict()), cfg.out)
    else:
        _emit(serialize.report_csv(report), cfg.out)
    return EXIT_OK


def _simulated_rows(cfg: RunConfig, grid: np.ndarray) -> list[ExperimentResult]:
    return [
        run_experiment(
            cfg.family, float(p), cfg.e,
            shots=cfg.shots, runs=cfg.runs,
            seed=[cfg.seed, i], exact=cfg.exact,
        )
        for i, p in enumerate(grid)
    ]


def cmd_simulate(cfg: RunConfig) -> int:
    single = cfg.grid is None
    grid = np.array([cfg.p]) if single else cfg.grid
    lo, hi = family_domain(cfg.family)
    for p in grid:
        if not (lo <= p <= hi):
            raise ConfigError(
                f"family {cfg.family}: p={p:.6g} outside domain [{lo:.6g}, {hi:.6g}]"
            )
    rows = _simulated_rows(cfg, grid)
    if cfg.fit_e:
        fitted = fit_noise([(r.p, (r.G, r.F, r.R)) for r in rows], cfg.family)
        rows = [ExperimentResult(**dict(r.to_dict(), e_fitted=fitted)) for r in rows]
    if cfg.fmt == "json":
        payload = rows[0].to_dict() if single else [r.to_dict() for r in rows]
        _emit(_json_dumps(payload), cfg.out)
    else:
        pairs = [(r, bound_report((r.G, r.F, r.R), dim=3, floor=True)) for r in rows]
        _emit(serialize.simulate_csv(pairs), cfg.out)
    return EXIT_OK


def cmd_compile(cfg: RunConfig) -> int:
    if cfg.infile is not None:
        m = serialize.load_measurement(cfg.infile, tol=cfg.tol)
    else:
        m = family(cfg.family, cfg.p)
    rows = compile_angles(m)
    if cfg.fmt == "json":
        payload = [
            {
                "outcome": r.outcome,
                "thetas_deg": list(r.thetas),
                "reversal_thetas_deg": list(r.reversal_thetas),
            }
            for r in rows
        ]
        _emit(_json_dumps(payload), cfg.out)
    else:
        _emit(serialize.angles_csv(rows), cfg.out)
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qmeas",
        description="Information trade-offs of quantum measurements: sweeps, "
        "bound verification, experiment simulation, waveplate compilation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--format", choices=("csv", "json"), default=None, dest="fmt")
        p.add_argument("--out", default=None, help="write output to this path instead of stdout")

    p_sweep = sub.add_parser("sweep", help="closed-form sweep over a family grid")
    p_sweep.add_argument("--family", type=int, required=True, choices=(0, 1, 2, 3, 4))
    p_sweep.add_argument("--grid", default=None, help="start:end:count (inclusive)")
    add_common(p_sweep)

    p_verify = sub.add_parser("verify", help="validate a measurement JSON and report gaps")
    p_verify.add_argument("--in", dest="infile", required=True, help="measurement JSON file")
    p_verify.add_argument("--tol", type=float, default=1e-6, help="completeness tolerance")
    add_common(p_verify)

    p_sim = sub.add_parser("simulate", help="simulated counting experiment")
    p_sim.add_argument("--family", type=int, required=True, choices=(0, 1, 2, 3, 4))
    group = p_sim.add_mutually_exclusive_group(required=True)
    group.add_argument("--p", type=float, default=None)
    group.add_argument("--grid", default=None, help="start:end:count (inclusive)")
    p_sim.add_argument("--e", type=float, default=1.0, help="input depolarization survival")
    p_sim.add_argument("--shots", type=int, default=10_000)
    p_sim.add_argument("--runs", type=int, default=100)
    p_sim.add_argument("--seed", type=int, default=None)
    p_sim.add_argument("--exact", action="store_true", help="infinite-statistics limit")
    p_sim.add_argument("--fit-e", action="store_true", dest="fit_e",
                       help="fit the noise parameter over the grid (json output)")
    add_common(p_sim)

    p_comp = sub.add_parser("compile", help="waveplate angle table")
    src = p_comp.add_mutually_exclusive_group(required=True)
    src.add_argument("--family", type=int, default=None, choices=(0, 1, 2, 3, 4))
    src.add_argument("--in", dest="infile", default=None, help="measurement JSON file")
    p_comp.add_argument("--p", type=float, default=None)
    p_comp.add_argument("--tol", type=float, default=1e-6, help="completeness tolerance")
    add_common(p_comp)

    return parser


def _config_from_args(args) -> RunConfig:
    grid = _parse_grid(args.grid) if getattr(args, "grid", None) else None
    fmt = args.fmt or "csv"
    if args.command == "verify" and args.fmt is None:
        fmt = "json"
    if args.command == "simulate":
        if args.fit_e and grid is None:
            raise ConfigError("--fit-e needs --grid with at least 3 points")
        if args.fit_e and args.fmt == "csv":
            raise ConfigError("--fit-e output is JSON; drop --format csv")
        if args.fit_e:
            fmt = "json"
    if args.command == "compile" and args.family is not None and args.p is None:
        raise ConfigError("compile --family requires --p")
    return RunConfig(
        command=args.command,
        family=getattr(args, "family", None),
        grid=grid,
        p=getattr(args, "p", None),
        e=getattr(args, "e", 1.0),
        shots=getattr(args, "shots", 10_000),
        runs=getattr(args, "runs", 100),
        seed=_resolve_seed(args) if hasattr(args, "seed") else 0,
        exact=getattr(args, "exact", False),
        fit_e=getattr(args, "fit_e", False),
        fmt=fmt,
        out=args.out,
        infile=getattr(args, "infile", None),
        tol=getattr(args, "tol", 1e-6),
    )


_HANDLERS = {
    "sweep": cmd_sweep,
    "verify": cmd_verify,
    "simulate": cmd_simulate,
    "compile": cmd_compile,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config_from_args(args)
        return _HANDLERS[cfg.command](cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except InsufficientDataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CompletenessError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_COMPLETENESS
    except NotRealizableError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_REALIZABLE
    except QmeasError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except Exception as exc:  # pragma: no cover - defensive
        print(f"unexpected error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
