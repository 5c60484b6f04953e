"""Command-line entry point: ``fewphoton {wigner,correlations,prepare,measure}``.

Each run is described by one JSON config (``--config``); every field has a
default, so a bare invocation runs the reference experiment. Command-line
flags override the corresponding config fields.

Exit codes: 0 success, 1 config error, 2 I/O error, 3 physics-domain failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from math import pi, sqrt
from pathlib import Path
from typing import Annotated, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, ValidationError, field_validator, model_validator

from . import io
from .errors import DomainError, PostSelectionError, VacuumUndefinedError
from .evolution import DEFAULT_STEP, evolve_trajectory
from .fock import DEFAULT_DIM, density_from_state
from .qed import PrepParams, measured_wigner, measurement_sigma, outcome_probabilities, target_state, two_atom_prepare
from .statistics import correlation_sweep
from .wigner import (
    InitialStateParams,
    closed_form,
    lattice,
    negativity_metrics,
    wigner_convolution,
    wigner_from_rho,
    wigner_grid,
)

EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_DOMAIN = 0, 1, 2, 3
THREADS_ENV = "FEWPHOTON_THREADS"


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)


class StateConfig(_Strict):
    name: Optional[str] = None
    mod_c1: float = Field(1 / 3, ge=0)
    mod_c2: float = Field(sqrt(2) / 2, ge=0)
    phi: float = 0.0
    varphi: float = pi

    @model_validator(mode="after")
    def _normalizable(self):
        if self.mod_c1 ** 2 + self.mod_c2 ** 2 > 1 + 1e-12:
            raise ValueError("mod_c1^2 + mod_c2^2 must not exceed 1")
        return self

    def params(self) -> InitialStateParams:
        return InitialStateParams.from_moduli(self.mod_c1, self.mod_c2, self.phi, self.varphi)


class GridConfig(_Strict):
    x_min: float = -3.0
    x_max: float = 3.0
    p_min: float = -3.0
    p_max: float = 3.0
    nx: int = Field(101, ge=2)
    n_p: int = Field(101, ge=2, alias="np")

    @model_validator(mode="after")
    def _ordered(self):
        if not (self.x_max > self.x_min and self.p_max > self.p_min):
            raise ValueError("grid bounds must satisfy min < max")
        return self

    def bounds(self) -> dict:
        return dict(x_min=self.x_min, x_max=self.x_max, p_min=self.p_min, p_max=self.p_max, nx=self.nx, n_p=self.n_p)


def _ascending(values: list[float]) -> list[float]:
    if any(v < 0 for v in values):
        raise ValueError("kappa_t values must be nonnegative")
    if any(b < a for a, b in zip(values, values[1:])):
        raise ValueError("kappa_t values must be ascending")
    return values


class WignerConfig(_Strict):
    command: Literal["wigner"] = "wigner"
    state: StateConfig = StateConfig()
    kappa_t: list[float] = Field(default_factory=lambda: [0.0, 0.2, 0.35, 3.0], min_length=1)
    grid: GridConfig = GridConfig()
    route: Literal["closed", "rho", "convolution", "both"] = "rho"
    dim: int = Field(DEFAULT_DIM, ge=3)
    step: float = Field(DEFAULT_STEP, gt=0)

    _check_times = field_validator("kappa_t")(_ascending)


def _correlation_defaults() -> list[StateConfig]:
    sets = [("blue", sqrt(6) / 6, sqrt(6) / 3), ("red", 2 / 9, 2 / 3), ("gray", 1 / 3, 1 / 3), ("green", 1 / 5, 1 / 3)]
    return [StateConfig(name=n, mod_c1=c1, mod_c2=c2) for n, c1, c2 in sets]


class CorrelationsConfig(_Strict):
    command: Literal["correlations"] = "correlations"
    states: list[StateConfig] = Field(default_factory=_correlation_defaults, min_length=1)
    kappa_t: list[float] = Field(default_factory=lambda: [float(t) for t in np.linspace(0.0, 3.0, 61)], min_length=1)

    _check_times = field_validator("kappa_t")(_ascending)


class PrepConfig(_Strict):
    gt1: float = pi / 4
    gt2: float = pi / 4
    theta1: float = 7 * pi / 2
    theta2: float = pi / 2
    phi1: float = pi
    phi2: float = 0.0


class PrepareConfig(_Strict):
    command: Literal["prepare"] = "prepare"
    params: PrepConfig = PrepConfig()
    model: Literal["paper", "exact"] = "paper"
    dim: int = Field(DEFAULT_DIM, ge=3)


class MeasureConfig(_Strict):
    command: Literal["measure"] = "measure"
    state: StateConfig = StateConfig()
    kappa_t: float = Field(0.0, ge=0)
    grid: GridConfig = GridConfig(nx=21, n_p=21)
    shots: int = Field(0, ge=0)
    seed: int = 0
    dim: int = Field(DEFAULT_DIM, ge=3)
    step: float = Field(DEFAULT_STEP, gt=0)


RunConfig = Annotated[
    Union[WignerConfig, CorrelationsConfig, PrepareConfig, MeasureConfig],
    Field(discriminator="command"),
]
_RUN_CONFIG = TypeAdapter(RunConfig)


class ConfigError(Exception):
    pass


def load_config(command: str, path: Optional[str], overrides: dict) -> BaseModel:
    """Merge file contents and flag overrides, then validate everything at once."""
    raw: dict = {}
    if path is not None:
        try:
            raw = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError(f"config {path} must hold a JSON object")
    if raw.setdefault("command", command) != command:
        raise ConfigError(f"config is for command {raw['command']!r}, not {command!r}")
    raw.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return _RUN_CONFIG.validate_python(raw)
    except ValidationError as exc:
        raise ConfigError(str(exc)) from exc


def _threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def _point(loc) -> dict:
    return {"x": loc.x, "p": loc.p}


def cmd_wigner(cfg: WignerConfig, out: Path) -> int:
    params = cfg.state.params()
    bounds = cfg.grid.bounds()
    workers = _threads()
    trajectory = None
    if cfg.route in ("rho", "both"):
        trajectory = evolve_trajectory(density_for(params, cfg.dim), cfg.kappa_t, cfg.step)

    snapshots = []
    worst = 0.0
    for i, t in enumerate(cfg.kappa_t):
        if cfg.route == "closed":
            grid = wigner_grid(closed_form(params, t), workers=workers, **bounds)
        elif cfg.route == "convolution":
            initial = closed_form(params, 0.0)
            grid = wigner_grid(lambda a: wigner_convolution(initial, t, a), workers=workers, **bounds)
        else:
            grid = wigner_grid(trajectory.states[i], workers=workers, **bounds)
        if cfg.route == "both":
            other = wigner_grid(closed_form(params, t), workers=workers, **bounds)
            worst = max(worst, float(np.max(np.abs(grid.values - other.values))))
        name = f"wigner_{i:02d}.csv"
        io.write_wigner_csv(grid, out / name)
        metrics = negativity_metrics(grid)
        snapshots.append({
            "kappa_t": t,
            "file": name,
            "min_value": metrics.min_value,
            "min_location": _point(metrics.min_location),
            "negative_volume": metrics.negative_volume,
            "max_value": float(grid.values.max()),
        })
    summary = {"command": "wigner", "route": cfg.route, "snapshots": snapshots}
    if cfg.route == "both":
        summary["max_route_discrepancy"] = worst
    io.write_json(summary, out / "wigner_summary.json")
    return EXIT_OK


def density_for(params: InitialStateParams, dim: int):
    return density_from_state(params.state(dim))


def _set_name(state: StateConfig, index: int) -> str:
    return state.name or f"set{index}"


def cmd_correlations(cfg: CorrelationsConfig, out: Path) -> int:
    sets = []
    for i, state in enumerate(cfg.states):
        name = _set_name(state, i)
        samples = correlation_sweep(state.params(), cfg.kappa_t)
        file = f"sweep_{name}.csv"
        io.write_sweep_csv(samples, out / file)
        g2 = np.array([s.g2 for s in samples])
        drift = None if np.all(np.isnan(g2)) else float(np.nanmax(np.abs(g2 - g2[0])))
        sets.append({
            "name": name,
            "file": file,
            "g2_initial": None if np.isnan(g2[0]) else float(g2[0]),
            "max_g2_drift": drift,
            "g2a_initial": samples[0].g2a,
            "g2a_final": samples[-1].g2a,
        })
    io.write_json({"command": "correlations", "sets": sets}, out / "correlations_summary.json")
    return EXIT_OK


def cmd_prepare(cfg: PrepareConfig, out: Path) -> int:
    params = PrepParams(**cfg.params.model_dump())
    outcomes = outcome_probabilities(params, cfg.model, cfg.dim)
    try:
        prep = two_atom_prepare(params, cfg.model, cfg.dim)
    except PostSelectionError as exc:
        io.write_json(io.preparation_report(params, cfg.model, None, None, outcomes), out / "prepare.json")
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    fidelity = prep.cavity.fidelity(target_state(cfg.dim))
    io.write_json(io.preparation_report(params, cfg.model, prep, fidelity, outcomes), out / "prepare.json")
    return EXIT_OK


def cmd_measure(cfg: MeasureConfig, out: Path) -> int:
    rho = evolve_trajectory(density_for(cfg.state.params(), cfg.dim), [cfg.kappa_t], cfg.step).states[0]
    # row-major, x fastest; seed = base seed + grid index
    alphas = lattice(**cfg.grid.bounds()).T.ravel()
    records = [measured_wigner(rho, a, cfg.shots, cfg.seed + k) for k, a in enumerate(alphas)]
    io.write_measurement_csv(records, out / "measure.csv")

    engine = wigner_from_rho(rho, alphas)
    estimates = np.array([r.w_estimate for r in records])
    summary = {
        "command": "measure",
        "kappa_t": cfg.kappa_t,
        "shots": cfg.shots,
        "seed": cfg.seed,
        "points": len(records),
        "max_abs_deviation": float(np.max(np.abs(estimates - engine))),
    }
    if cfg.shots:
        exact = [measured_wigner(rho, a) for a in alphas]
        sigma = np.array([measurement_sigma(r.p_e_phase0, r.p_e_phase_pi, cfg.shots) for r in exact])
        within = np.abs(estimates - engine) <= 4 * sigma
        summary["fraction_within_4sigma"] = float(np.mean(within))
    io.write_json(summary, out / "measure_summary.json")
    return EXIT_OK


FLAG_OWNERS = {"seed": "measure", "model": "prepare", "route": "wigner"}

COMMANDS = {
    "wigner": cmd_wigner,
    "correlations": cmd_correlations,
    "prepare": cmd_prepare,
    "measure": cmd_measure,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fewphoton", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON run configuration")
        p.add_argument("--out", default=".", help="output directory (default: current directory)")
        p.add_argument("--seed", type=int, help="base RNG seed (measure)")
        p.add_argument("--model", choices=["paper", "exact"], help="Jaynes-Cummings model (prepare)")
        p.add_argument("--route", choices=["closed", "rho", "convolution", "both"], help="Wigner evaluation route (wigner)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {}
    try:
        for flag, owner in FLAG_OWNERS.items():
            value = getattr(args, flag)
            if value is None:
                continue
            if owner != args.command:
                raise ConfigError(f"--{flag} applies only to the {owner} command")
            overrides[flag] = value
        cfg = load_config(args.command, args.config, overrides)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        out = io.ensure_dir(args.out)
        return COMMANDS[args.command](cfg, out)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (DomainError, VacuumUndefinedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
