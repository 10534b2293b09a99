"""Sampled radial fields, solver reports and their CSV/JSON serialisation."""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ValidationError

__all__ = [
    "RadialProfile",
    "ResidualProfile",
    "SolverReport",
    "SweepTable",
    "uniform_grid",
    "fmt",
    "write_csv",
    "write_profile_csv",
    "write_json",
]


def uniform_grid(n: int, start: float = 0.0) -> np.ndarray:
    """``n`` equally spaced nodes on ``[start, 1]``; the last node is exactly 1."""
    if int(n) != n or n < 2:
        raise ValidationError("grid needs an integer number of nodes >= 2")
    grid = np.linspace(start, 1.0, int(n))
    grid[-1] = 1.0
    return grid


@dataclass(frozen=True)
class RadialProfile:
    """A dimensionless field sampled on a radial grid ending at the wall."""

    sigma: np.ndarray
    u: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        sigma = np.asarray(self.sigma, dtype=float)
        u = np.asarray(self.u, dtype=float)
        if sigma.ndim != 1 or sigma.shape != u.shape or sigma.size < 2:
            raise ValidationError("sigma and u must be 1-D arrays of equal length >= 2")
        if np.any(np.diff(sigma) <= 0):
            raise ValidationError("sigma must be strictly increasing")
        if sigma[0] < 0 or sigma[-1] != 1.0:
            raise ValidationError("sigma must lie in [0, 1] and end at 1")
        if not np.all(np.isfinite(u)):
            raise ValidationError("profile contains non-finite values")
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "u", u)

    @property
    def n(self) -> int:
        return self.sigma.size


@dataclass(frozen=True)
class ResidualProfile:
    """Pointwise ODE residual on the nodes kept after trimming boundary bands."""

    sigma: np.ndarray
    values: np.ndarray

    @property
    def sup(self) -> float:
        return float(np.max(np.abs(self.values)))


@dataclass
class SolverReport:
    sup_residual: float | None = None
    bc_residuals: dict = field(default_factory=dict)
    dual_solver_gap: float | None = None
    grid_n: int | None = None

    def to_dict(self) -> dict:
        return {
            "sup_residual": self.sup_residual,
            "bc_residuals": dict(self.bc_residuals),
            "dual_solver_gap": self.dual_solver_gap,
            "grid_n": self.grid_n,
        }


@dataclass(frozen=True)
class SweepTable:
    """Classical-limit sweep: one row per lambda1, errors measured in the sup norm."""

    lambdas: np.ndarray
    sup_errors: np.ndarray
    phi: np.ndarray | None
    sigma: np.ndarray
    pointwise: np.ndarray

    def rows(self):
        phi = self.phi if self.phi is not None else [math.nan] * len(self.lambdas)
        return [(float(l), float(e), float(p)) for l, e, p in zip(self.lambdas, self.sup_errors, phi)]


def fmt(x) -> str:
    """17 significant digits, enough to round-trip any double."""
    return f"{float(x):.16e}"


def write_csv(path, header, columns):
    """Write equal-length columns; numbers are formatted with :func:`fmt`, strings verbatim."""
    path = Path(path)
    columns = [list(c) for c in columns]
    lengths = {len(c) for c in columns}
    if len(lengths) > 1:
        raise ValidationError("CSV columns differ in length")
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in zip(*columns):
            w.writerow([v if isinstance(v, str) else fmt(v) for v in row])
    return path


def write_profile_csv(path, profile: RadialProfile):
    return write_csv(path, ["sigma", "u"], [profile.sigma, profile.u])


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_json(path, payload):
    path = Path(path)
    path.write_text(json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n")
    return path
