"""Command-line surface.

Five subcommands cover the laboratory: ``gamma-moments`` (model-operator
trace moments), ``schrodinger-sweep`` (projection-product traces against
|ln eps|), ``scattering-table`` (eigenphases, amplitudes and limit
constants per energy), ``verify-suite`` (all standalone checks, JSON
reports) and ``logdet`` (the one-sided determinant bound).

Exit codes: 0 all checks pass, 1 a check failed, 2 invalid input.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time

from . import __version__
from .config import COMMANDS, RunConfig, parse_config
from .errors import ContractError, DomainError, InputError
from .experiments import (
    Functional,
    SchrodingerSweepSystem,
    epsilon_sweep,
    logdet_experiment,
    run_verify_suite,
)
from .hankel import moment_table
from .scattering import scattering_table
from .tables import OutputTable, emit


def _metadata(cfg: RunConfig, started: float) -> dict:
    return {
        "config": cfg.canonical_json(),
        "version": __version__,
        "wall_time_s": round(time.monotonic() - started, 3),
    }


def _system(cfg: RunConfig) -> SchrodingerSweepSystem:
    return SchrodingerSweepSystem(grid=cfg.make_grid(),
                                  potential=cfg.make_potential(),
                                  lambda_star=cfg.lambda_star)


def _run_gamma_moments(cfg: RunConfig, started: float) -> int:
    powers = []
    for name in cfg.f_list:
        functional = Functional.parse(name)
        if functional.power is None:
            raise InputError(f"gamma-moments supports only t^n functionals, "
                             f"got {name!r}")
        powers.append(float(functional.power))
    rows = moment_table(cfg.eps_list, cfg.delta, powers)
    table = OutputTable.from_records(rows, metadata=_metadata(cfg, started))
    emit(table, cfg.output_path, cfg.format)
    print(f"wrote {len(rows)} rows to {cfg.output_path}")
    return 0


def _run_schrodinger_sweep(cfg: RunConfig, started: float) -> int:
    system = _system(cfg)
    series = epsilon_sweep(system, cfg.f_list, cfg.eps_list)
    records, regressions = [], {}
    for name, ts in series.items():
        for eps, lnabs, value in ts.points:
            records.append({"f": name, "eps": eps, "abs_ln_eps": lnabs,
                            "value": value})
        regressions[name] = {"slope": ts.slope, "intercept": ts.intercept,
                             "max_residual": ts.max_residual,
                             "predicted": ts.predicted}
    meta = _metadata(cfg, started)
    meta["regressions"] = regressions
    meta["amplitudes"] = list(system.amplitudes)
    table = OutputTable.from_records(records, metadata=meta)
    emit(table, cfg.output_path, cfg.format)
    for name, reg in regressions.items():
        print(f"{name}: slope={reg['slope']:.6g} predicted={reg['predicted']:.6g}")
    print(f"wrote {len(records)} rows to {cfg.output_path}")
    return 0


def _run_scattering_table(cfg: RunConfig, started: float) -> int:
    if not cfg.energies:
        raise InputError("energies: must be nonempty for scattering-table")
    if any(e <= 0 for e in cfg.energies):
        raise InputError("energies: must be positive")
    rows = scattering_table(cfg.make_potential(), cfg.energies)
    table = OutputTable.from_records(rows, metadata=_metadata(cfg, started))
    emit(table, cfg.output_path, cfg.format)
    print(f"wrote {len(rows)} rows to {cfg.output_path}")
    return 0


def _run_verify_suite(cfg: RunConfig, started: float) -> int:
    reports = run_verify_suite(seed=cfg.seed)
    payload = {
        "metadata": _metadata(cfg, started),
        "reports": [r.to_dict() for r in reports],
    }
    if cfg.format == "json":
        with open(cfg.output_path, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=1, sort_keys=True)
            fh.write("\n")
    else:
        rows = [{"name": r.name, "pass": r.passed, "notes": r.notes}
                for r in reports]
        emit(OutputTable.from_records(rows, metadata=_metadata(cfg, started)),
             cfg.output_path, "csv")
    failed = [r.name for r in reports if not r.passed]
    for r in reports:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name}")
    print(f"wrote {len(reports)} reports to {cfg.output_path}")
    return 1 if failed else 0


def _run_logdet(cfg: RunConfig, started: float) -> int:
    system = _system(cfg)
    report = logdet_experiment(system, cfg.eps_list)
    records = [
        {"eps": eps, "abs_ln_eps": abs(math.log(eps)), "logdet": v}
        for eps, v in zip(cfg.eps_list, report.measured["values"])
    ]
    meta = _metadata(cfg, started)
    meta["slope"] = report.measured["slope"]
    meta["predicted_constant"] = report.predicted["constant"]
    meta["upper_limit"] = report.predicted["upper_limit"]
    meta["pass"] = report.passed
    table = OutputTable.from_records(records, metadata=meta)
    emit(table, cfg.output_path, cfg.format)
    print(f"slope={report.measured['slope']:.6g} "
          f"limit={report.predicted['upper_limit']:.6g} "
          f"{'PASS' if report.passed else 'FAIL'}")
    print(f"wrote {len(records)} rows to {cfg.output_path}")
    return 0 if report.passed else 1


_RUNNERS = {
    "gamma-moments": _run_gamma_moments,
    "schrodinger-sweep": _run_schrodinger_sweep,
    "scattering-table": _run_scattering_table,
    "verify-suite": _run_verify_suite,
    "logdet": _run_logdet,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="specprod",
        description="Desk-scale laboratory for products of spectral projections",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        p = sub.add_parser(command)
        p.add_argument("--config", default=None, help="JSON config file")
        p.add_argument("--out", default=None, help="output path (overrides config)")
        p.add_argument("--format", default=None, choices=["csv", "json"],
                       help="output format (overrides config)")
        p.add_argument("--seed", type=int, default=None,
                       help="seed for randomized checks (overrides config)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    started = time.monotonic()
    try:
        cfg = parse_config(args.command, args.config, overrides={
            "output_path": args.out,
            "format": args.format,
            "seed": args.seed,
        })
        return _RUNNERS[args.command](cfg, started)
    except (InputError, ContractError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
