"""Readers and writers for the CSV and JSON files produced by the command line.

Floats are written with 17 significant digits so that values round-trip
exactly through text.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .qed import MeasurementRecord, PrepParams, Preparation
from .statistics import CorrelationSample
from .wigner import PhasePoint, WignerGrid

WIGNER_HEADER = ["x", "p", "W"]
SWEEP_HEADER = ["kappa_t", "g2", "g2a", "mean_n", "m2"]
MEASUREMENT_HEADER = ["x", "p", "Pe0", "Pepi", "W_est", "shots"]


def fmt(value: float) -> str:
    return f"{value:.17g}"


def _write_rows(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _read_rows(path, header) -> list[list[str]]:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        found = next(reader, None)
        if found != header:
            raise ValueError(f"{path}: expected header {header}, found {found}")
        return [row for row in reader if row]


def write_wigner_csv(grid: WignerGrid, path) -> None:
    """Row-major with x varying fastest."""
    xs, ps = grid.xs, grid.ps
    rows = (
        (fmt(xs[i]), fmt(ps[j]), fmt(grid.values[i, j]))
        for j in range(grid.n_p)
        for i in range(grid.nx)
    )
    _write_rows(path, WIGNER_HEADER, rows)


def read_wigner_csv(path) -> WignerGrid:
    data = np.array(_read_rows(path, WIGNER_HEADER), dtype=float)
    x, p, w = data.T
    nx = int(np.argmax(p != p[0])) if np.any(p != p[0]) else len(p)
    n_p = len(p) // nx
    if nx * n_p != len(p):
        raise ValueError(f"{path}: row count {len(p)} is not a full lattice")
    values = w.reshape(n_p, nx).T
    return WignerGrid(x[0], x[nx - 1], p[0], p[-1], values)


def write_sweep_csv(samples: list[CorrelationSample], path) -> None:
    rows = (
        (fmt(s.kappa_t), fmt(s.g2), fmt(s.g2a), fmt(s.mean_n), fmt(s.second_factorial_moment))
        for s in samples
    )
    _write_rows(path, SWEEP_HEADER, rows)


def read_sweep_csv(path) -> list[CorrelationSample]:
    # float("nan") parses the undefined-g2 token
    return [CorrelationSample(*map(float, row)) for row in _read_rows(path, SWEEP_HEADER)]


def write_measurement_csv(records: list[MeasurementRecord], path) -> None:
    rows = (
        (fmt(r.alpha.x), fmt(r.alpha.p), fmt(r.p_e_phase0), fmt(r.p_e_phase_pi), fmt(r.w_estimate), str(r.shots))
        for r in records
    )
    _write_rows(path, MEASUREMENT_HEADER, rows)


def read_measurement_csv(path) -> list[MeasurementRecord]:
    records = []
    for x, p, pe0, pepi, west, shots in _read_rows(path, MEASUREMENT_HEADER):
        records.append(MeasurementRecord(PhasePoint.from_xp(float(x), float(p)), float(pe0), float(pepi), int(shots), float(west)))
    return records


def write_json(obj, path) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True, allow_nan=True)
        fh.write("\n")


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


def preparation_report(
    params: PrepParams,
    model: str,
    preparation: Preparation | None,
    fidelity: float | None,
    outcomes: dict[str, float] | None = None,
) -> dict:
    """JSON-ready preparation report; ``preparation`` is None when post-selection failed."""
    report = {
        "params": {
            "gt1": params.gt1, "gt2": params.gt2,
            "theta1": params.theta1, "theta2": params.theta2,
            "phi1": params.phi1, "phi2": params.phi2,
        },
        "model": model,
        "success_probability": 0.0,
        "cavity_amplitudes": None,
        "target_fidelity": None,
        "outcome_probabilities": outcomes,
    }
    if preparation is not None:
        amps = preparation.cavity.amplitudes
        report["success_probability"] = preparation.success_probability
        report["cavity_amplitudes"] = [[float(a.real), float(a.imag)] for a in amps]
        report["target_fidelity"] = fidelity
    return report


def read_preparation_report(path) -> dict:
    report = read_json(path)
    missing = {"params", "model", "success_probability", "cavity_amplitudes", "target_fidelity"} - report.keys()
    if missing:
        raise ValueError(f"{path}: preparation report lacks {sorted(missing)}")
    if report["cavity_amplitudes"] is not None:
        report["cavity_amplitudes"] = np.array([complex(re, im) for re, im in report["cavity_amplitudes"]])
    return report


def ensure_dir(path) -> Path:
    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)
    return path
