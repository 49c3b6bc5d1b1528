"""Transmit covariance designs that focus power on user directions.

Given the user gram matrix ``Z`` (sum of steering outer products), the
trace-constrained power delivered to the users, ``tr(R Z)``, is
maximized over PSD covariances by the rank-one matrix built from the
dominant eigenvector of ``Z``; the proportional alternative scales ``Z``
itself to the power budget and serves as the fairness reference
("ideal beam pattern").  Three canonical fixed covariances round out
the method set for baseline comparisons.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .constellations import ArrayGeometry
from .hermitian import HermitianMatrix, dominant_eigenpair
from .radiation import UserSet, steering_vector

__all__ = [
    "CANONICAL_KINDS",
    "DESIGN_METHODS",
    "DesignResult",
    "DesignSpec",
    "build_user_gram",
    "canonical_matrix",
    "design_eig",
    "design_ideal",
]

DESIGN_METHODS = ("eig", "ideal", "identity", "full_ones", "toeplitz")
CANONICAL_KINDS = ("identity", "full_ones", "toeplitz")


@dataclass(frozen=True)
class DesignSpec:
    """Power budget and method selector for a covariance design."""

    power_budget: float
    method: str
    rho: float = 0.8

    def __post_init__(self):
        if self.power_budget <= 0:
            raise ValueError("power_budget must be positive")
        if self.method not in DESIGN_METHODS:
            raise ValueError(f"unknown method {self.method!r}; expected one of {DESIGN_METHODS}")
        if self.method == "toeplitz" and not (0.0 <= self.rho <= 1.0):
            raise ValueError("toeplitz correlation rho must lie in [0, 1]")


@dataclass(frozen=True)
class DesignResult:
    """A designed covariance with its achieved user-power objective."""

    R: HermitianMatrix
    achieved_objective: float
    rank1_factor: np.ndarray | None
    degenerate: bool


def build_user_gram(geom: ArrayGeometry, users: UserSet) -> HermitianMatrix:
    """Sum of steering outer products ``s(d) s(d)*`` over the user set.

    The result is PSD by construction with trace exactly K * N.  The
    steering columns are attached as the matrix's low-rank factor.
    """
    if users.count > geom.count:
        warnings.warn(
            f"{users.count} users exceed {geom.count} elements; the gram matrix is rank-deficient",
            stacklevel=2,
        )
    n = geom.count
    z = np.zeros((n, n), dtype=complex)
    cols = []
    for d in users.users:
        s = steering_vector(geom, d).values
        z += np.outer(s, s.conj())
        cols.append(s)
    return HermitianMatrix(z, factor=np.column_stack(cols))


def design_eig(z: HermitianMatrix, spec: DesignSpec) -> DesignResult:
    """Rank-one covariance along the dominant eigenvector of ``z``.

    Maximizes ``tr(R z)`` subject to ``tr(R) = power_budget`` and PSD;
    the achieved objective is ``power_budget * lambda_1(z)``.  The
    degeneracy flag of the eigensolve (a tied second eigenvalue means
    the optimizer direction is not unique) is passed through.
    """
    if not np.any(z.array):
        raise ValueError("user gram matrix is zero; no direction to focus on")
    pair = dominant_eigenpair(z)
    pt = spec.power_budget
    w = np.sqrt(pt) * pair.vector
    r = HermitianMatrix.from_factor(w)
    zv = z.array @ pair.vector
    objective = pt * float(np.vdot(pair.vector, zv).real)
    return DesignResult(R=r, achieved_objective=objective, rank1_factor=w, degenerate=pair.degenerate)


def design_ideal(z: HermitianMatrix, spec: DesignSpec) -> DesignResult:
    """Ideal beam pattern: ``z`` itself scaled to the power budget.

    Spends the budget proportionally on every user, which trades
    objective for fairness.
    """
    t = z.trace()
    if t <= 0:
        raise ValueError("user gram matrix has nonpositive trace")
    scale = spec.power_budget / t
    factor = np.sqrt(scale) * z.factor if z.factor is not None else None
    r = HermitianMatrix(scale * z.array, factor=factor)
    objective = scale * float(np.vdot(z.array, z.array).real)  # tr(R z) = scale tr(z^2)
    return DesignResult(R=r, achieved_objective=objective, rank1_factor=None, degenerate=False)


def canonical_matrix(kind: str, dim: int, spec: DesignSpec) -> HermitianMatrix:
    """One of the fixed baseline covariances, scaled to trace = budget.

    ``full_ones`` is the fully correlated matrix (rank one), ``toeplitz``
    decays as rho**|k - l| off the diagonal, ``identity`` is uncorrelated
    and radiates isotropically.
    """
    if dim < 1:
        raise ValueError("dim must be at least 1")
    if kind not in CANONICAL_KINDS:
        raise ValueError(f"unknown canonical kind {kind!r}; expected one of {CANONICAL_KINDS}")
    scale = spec.power_budget / dim
    if kind == "identity":
        return HermitianMatrix(np.eye(dim, dtype=complex) * scale)
    if kind == "full_ones":
        return HermitianMatrix.from_factor(np.full((dim, 1), np.sqrt(scale), dtype=complex))
    k = np.arange(dim)
    m = (spec.rho ** np.abs(k[:, None] - k[None, :])).astype(complex) * scale
    return HermitianMatrix(m)
