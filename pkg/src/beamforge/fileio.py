"""Readers and writers for the pipeline file formats.

JSON files use radians and full-precision floats (shortest round-trip
repr), so write -> read -> write is byte-identical.  Pattern CSVs carry
degree columns (suffixed ``_deg``) and 9 significant digits.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .constellations import ArrayGeometry
from .hermitian import HermitianMatrix
from .radiation import DEG, MetricsReport, PatternGrid, UserSet

__all__ = [
    "DesignFile",
    "read_design",
    "read_geometry",
    "read_pattern_csv",
    "read_users",
    "write_design",
    "write_geometry",
    "write_json",
    "write_metrics",
    "write_pattern_csv",
    "write_users",
]

DB_FLOOR = -100.0


def write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(obj, indent=2) + "\n", encoding="utf-8")


def _read_json(path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def write_geometry(path, geom: ArrayGeometry) -> None:
    write_json(path, {"label": geom.label, "elements": geom.elements.tolist()})


def read_geometry(path) -> ArrayGeometry:
    data = _read_json(path)
    return ArrayGeometry(np.asarray(data["elements"], dtype=float), label=data["label"])


def write_users(path, users: UserSet) -> None:
    write_json(
        path,
        {"label": users.label, "users": [[d.theta, d.phi] for d in users.users]},
    )


def read_users(path) -> UserSet:
    data = _read_json(path)
    return UserSet.from_pairs(data["users"], label=data["label"])


@dataclass(frozen=True)
class DesignFile:
    """On-disk form of a covariance design."""

    method: str
    power_budget: float
    objective: float | None
    degenerate: bool
    R: HermitianMatrix


def write_design(path, design: DesignFile) -> None:
    write_json(
        path,
        {
            "method": design.method,
            "power_budget": design.power_budget,
            "objective": design.objective,
            "degenerate": design.degenerate,
            "R": design.R.to_dict(),
        },
    )


def read_design(path) -> DesignFile:
    data = _read_json(path)
    return DesignFile(
        method=data["method"],
        power_budget=float(data["power_budget"]),
        objective=None if data["objective"] is None else float(data["objective"]),
        degenerate=bool(data["degenerate"]),
        R=HermitianMatrix.from_dict(data["R"]),
    )


def _db_column(power: np.ndarray) -> np.ndarray:
    peak = power.max()
    if peak <= 0:
        return np.full_like(power, DB_FLOOR)
    with np.errstate(divide="ignore"):
        db = 10.0 * np.log10(power / peak)
    return np.maximum(db, DB_FLOOR)


def write_pattern_csv(path, grid: PatternGrid) -> None:
    th_deg = grid.theta_samples / DEG
    ph_deg = grid.phi_samples / DEG
    db = _db_column(grid.power)
    chunks = ["theta_deg,phi_deg,power,power_db"]
    for i, t in enumerate(th_deg):
        row = grid.power[i]
        dbr = db[i]
        chunks.extend(
            f"{t:.9g},{p:.9g},{row[j]:.9g},{dbr[j]:.9g}" for j, p in enumerate(ph_deg)
        )
    Path(path).write_text("\n".join(chunks) + "\n", encoding="utf-8")


def read_pattern_csv(path) -> PatternGrid:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header[:4] != ["theta_deg", "phi_deg", "power", "power_db"]:
            raise ValueError(f"unexpected pattern CSV header: {header}")
        rows = [(float(r[0]), float(r[1]), float(r[2])) for r in reader]
    if not rows:
        raise ValueError("pattern CSV has no data rows")
    phis = []
    for _, p, _ in rows:
        if phis and p == phis[0]:
            break
        phis.append(p)
    n_phi = len(phis)
    if len(rows) % n_phi:
        raise ValueError("pattern CSV is not a rectangular grid")
    n_th = len(rows) // n_phi
    thetas = [rows[i * n_phi][0] for i in range(n_th)]
    power = np.array([r[2] for r in rows], dtype=float).reshape(n_th, n_phi)
    return PatternGrid(
        np.asarray(thetas) * DEG,
        np.asarray(phis) * DEG,
        power,
    )


def write_metrics(path, report: MetricsReport) -> None:
    write_json(path, report.to_dict())
