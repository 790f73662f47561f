"""Run configuration: one nested JSON file, flags win over file values.

Every command shares the same schema; per-command defaults fill whatever
the file leaves out.  Unknown keys are rejected by name, and invariant
violations name the offending field, so a config echo can be trusted to
reproduce a run exactly.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

from .errors import InputError
from .experiments import Functional
from .schrodinger import Grid1D, Potential

COMMANDS = ("gamma-moments", "schrodinger-sweep", "scattering-table",
            "verify-suite", "logdet")

_GRID_KEYS = {"half_length", "n_points"}
_POTENTIAL_KEYS = {"kind", "depth", "half_width", "amplitude", "width"}
_TOP_KEYS = {"command", "grid", "potential", "lambda_star", "eps_list", "delta",
             "f_list", "energies", "output_path", "seed", "format"}

_DEFAULT_EPS_GAMMA = [1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8]
_DEFAULT_EPS_SWEEP = [0.4, 0.3, 0.2, 0.15, 0.1, 0.07, 0.05]


@dataclass
class RunConfig:
    """Validated parameters for one CLI run."""

    command: str
    grid: dict = field(default_factory=lambda: {"half_length": 300.0, "n_points": 6000})
    potential: dict = field(default_factory=lambda: {
        "kind": "square_well", "depth": 2.0, "half_width": 1.0})
    lambda_star: float = 1.0
    eps_list: list[float] = field(default_factory=list)
    delta: float = 1.0
    f_list: list[str] = field(default_factory=lambda: ["t^1", "t^2"])
    energies: list[float] = field(default_factory=list)
    output_path: str = "out.csv"
    seed: int = 1234
    format: str = "csv"

    def make_grid(self) -> Grid1D:
        return Grid1D(half_length=float(self.grid["half_length"]),
                      n_points=int(self.grid["n_points"]))

    def make_potential(self) -> Potential:
        kind = self.potential.get("kind", "zero")
        if kind == "square_well":
            return Potential.square_well(self.potential["depth"],
                                         self.potential["half_width"])
        if kind == "gaussian":
            return Potential.gaussian(self.potential["amplitude"],
                                      self.potential["width"])
        if kind == "zero":
            return Potential.zero()
        raise InputError(f"potential.kind must be square_well, gaussian or zero, "
                         f"got {kind!r}")

    def canonical_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True, separators=(",", ":"))


def _validate(cfg: RunConfig) -> RunConfig:
    if cfg.command not in COMMANDS:
        raise InputError(f"command must be one of {COMMANDS}, got {cfg.command!r}")
    if not cfg.eps_list:
        raise InputError("eps_list: must be nonempty")
    if any(b >= a for a, b in zip(cfg.eps_list, cfg.eps_list[1:])):
        raise InputError("eps_list: values must be strictly decreasing")
    if any(e <= 0 for e in cfg.eps_list):
        raise InputError("eps_list: values must be positive")
    if cfg.delta <= 0:
        raise InputError("delta: must be positive")
    for name in cfg.f_list:
        Functional.parse(name)  # raises naming the functional
    if cfg.format not in ("csv", "json"):
        raise InputError("format: must be 'csv' or 'json'")
    cfg.make_grid()
    cfg.make_potential()
    return cfg


def _check_unknown(mapping: dict, allowed: set, where: str) -> None:
    unknown = sorted(set(mapping) - allowed)
    if unknown:
        raise InputError(f"unknown keys in {where}: {', '.join(unknown)}")


def parse_config(command: str, path: str | None = None,
                 overrides: dict | None = None) -> RunConfig:
    """Build a validated RunConfig from defaults, optional file, then flags."""
    raw: dict = {}
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                raw = json.load(fh)
        except OSError as exc:
            raise InputError(f"cannot read config {path!r}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise InputError(f"config {path!r} is not valid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise InputError("config file must contain a JSON object")
        _check_unknown(raw, _TOP_KEYS, "config")
        if "grid" in raw:
            _check_unknown(raw["grid"], _GRID_KEYS, "config.grid")
        if "potential" in raw:
            _check_unknown(raw["potential"], _POTENTIAL_KEYS, "config.potential")
    cfg = RunConfig(command=command)
    if command == "gamma-moments":
        cfg.eps_list = list(_DEFAULT_EPS_GAMMA)
        cfg.f_list = ["t^1", "t^2", "t^3"]
        cfg.output_path = "gamma_moments.csv"
    elif command in ("schrodinger-sweep", "logdet"):
        cfg.eps_list = list(_DEFAULT_EPS_SWEEP)
        cfg.output_path = f"{command.replace('-', '_')}.csv"
    elif command == "scattering-table":
        cfg.eps_list = list(_DEFAULT_EPS_SWEEP)
        cfg.energies = [0.2 + 0.2 * i for i in range(25)]
        cfg.output_path = "scattering_table.csv"
    else:
        cfg.eps_list = list(_DEFAULT_EPS_SWEEP)
        cfg.output_path = "verify_suite.json"
        cfg.format = "json"
    file_command = raw.pop("command", None)
    if file_command is not None and file_command != command:
        raise InputError(
            f"config file says command={file_command!r} but {command!r} was invoked"
        )
    for key, value in raw.items():
        setattr(cfg, key, value)
    for key, value in (overrides or {}).items():
        if value is not None:
            setattr(cfg, key, value)
    return _validate(cfg)
