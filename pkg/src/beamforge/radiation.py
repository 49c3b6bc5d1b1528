"""Far-field power patterns of covariance-driven arrays.

The power density radiated toward a direction is the quadratic form
``s* R s / (4 pi)`` where ``s`` is the array steering vector and ``R``
the transmit covariance.  This module evaluates that form pointwise, on
dense angle grids, and integrated over the sphere, and derives the
pattern quality metrics used by the scenario reports.

Angle conventions: ``theta`` is elevation from the x-y plane in
[-pi/2, +pi/2]; ``phi`` is azimuth from +x toward +y in [0, 2 pi] (the
closed upper end lets full-circle grids carry both endpoints).  The
direction unit vector is (cos t cos p, cos t sin p, sin t); for a
z-axis array the steering phase reduces to ``2 pi z sin(theta)``.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .constellations import ArrayGeometry
from .hermitian import HermitianMatrix

__all__ = [
    "Direction",
    "MetricsReport",
    "PatternGrid",
    "SteeringVector",
    "UserSet",
    "evaluate_grid",
    "integrate_over_sphere",
    "pattern_metrics",
    "pattern_value",
    "steering_vector",
    "user_powers",
]

DEG = np.pi / 180.0
FOUR_PI = 4.0 * np.pi
_ANGLE_SLACK = 1e-12
# Dense quadratic forms: imaginary residue above this (relative to the
# value or the power budget) signals a non-Hermitian covariance; real
# parts below -NEG_CLAMP are an error, tiny negatives clamp to zero.
IMAG_TOL = 1e-9
NEG_CLAMP = 1e-9

THREADS_ENV = "BEAMFORGE_THREADS"


@dataclass(frozen=True)
class Direction:
    """Far-field direction; ``theta`` elevation, ``phi`` azimuth, radians."""

    theta: float
    phi: float

    def __post_init__(self):
        if not (-np.pi / 2 - _ANGLE_SLACK <= self.theta <= np.pi / 2 + _ANGLE_SLACK):
            raise ValueError(f"theta {self.theta!r} outside [-pi/2, pi/2]")
        if not (-_ANGLE_SLACK <= self.phi <= 2 * np.pi + _ANGLE_SLACK):
            raise ValueError(f"phi {self.phi!r} outside [0, 2 pi]")

    @classmethod
    def from_degrees(cls, theta_deg: float, phi_deg: float) -> "Direction":
        return cls(theta_deg * DEG, phi_deg * DEG)

    def unit_vector(self) -> np.ndarray:
        ct = np.cos(self.theta)
        return np.array([ct * np.cos(self.phi), ct * np.sin(self.phi), np.sin(self.theta)])


@dataclass(frozen=True)
class SteeringVector:
    """Per-element unit-modulus response toward one direction."""

    direction: Direction
    values: np.ndarray


@dataclass(frozen=True)
class UserSet:
    """Ordered collection of user directions."""

    users: tuple
    label: str = "users"

    def __post_init__(self):
        users = tuple(self.users)
        if not users:
            raise ValueError("user set must contain at least one direction")
        object.__setattr__(self, "users", users)

    @classmethod
    def from_pairs(cls, pairs, label: str = "users") -> "UserSet":
        return cls(tuple(Direction(float(t), float(p)) for t, p in pairs), label=label)

    @property
    def count(self) -> int:
        return len(self.users)


@dataclass(frozen=True)
class PatternGrid:
    """Power samples over a rectangular (theta, phi) grid, W/sr."""

    theta_samples: np.ndarray
    phi_samples: np.ndarray
    power: np.ndarray

    def __post_init__(self):
        th = np.asarray(self.theta_samples, dtype=float)
        ph = np.asarray(self.phi_samples, dtype=float)
        p = np.asarray(self.power, dtype=float)
        if p.shape != (th.size, ph.size):
            raise ValueError("power shape does not match the sample axes")
        if np.any(p < 0):
            raise ValueError("pattern grid contains negative power")
        for arr in (th, ph, p):
            arr.setflags(write=False)
        object.__setattr__(self, "theta_samples", th)
        object.__setattr__(self, "phi_samples", ph)
        object.__setattr__(self, "power", p)


@dataclass(frozen=True)
class MetricsReport:
    """Pattern quality summary for one covariance on one grid."""

    user_powers: tuple
    fairness: float
    resolved_count: int
    psl_db: float
    hpbw_deg: float

    def to_dict(self) -> dict:
        return {
            "user_powers": list(self.user_powers),
            "fairness": self.fairness,
            "resolved_count": self.resolved_count,
            "psl_db": self.psl_db,
            "hpbw_deg": self.hpbw_deg,
        }


def steering_vector(geom: ArrayGeometry, direction: Direction) -> SteeringVector:
    """Array response ``exp(j 2 pi p_i . u)`` toward ``direction``."""
    u = direction.unit_vector()
    return SteeringVector(direction, np.exp(2j * np.pi * (geom.elements @ u)))


def _check_dim(r: HermitianMatrix, n: int):
    if r.dim != n:
        raise ValueError(f"covariance dimension {r.dim} does not match element count {n}")


def pattern_value(r: HermitianMatrix, s: SteeringVector) -> float:
    """Power density ``s* R s / (4 pi)`` toward the steering direction.

    Uses the low-rank factor of ``r`` when present (O(N r) instead of
    O(N^2)).  Dense evaluation verifies the quadratic form is real and
    clamps round-off negatives to zero.
    """
    v = s.values
    _check_dim(r, v.shape[0])
    if r.factor is not None:
        q = float(np.sum(np.abs(r.factor.conj().T @ v) ** 2))
    elif r.is_diagonal():
        q = float(r.array.diagonal().real @ (v.real**2 + v.imag**2))
    else:
        qc = np.vdot(v, r.array @ v)
        scale = max(abs(qc), abs(r.trace()), np.finfo(float).tiny)
        if abs(qc.imag) > IMAG_TOL * scale:
            raise ValueError(
                f"imaginary residual {qc.imag:.3e} in s*Rs signals a non-Hermitian covariance"
            )
        q = float(qc.real)
    if q < 0.0:
        if q < -NEG_CLAMP:
            raise ValueError(f"negative power {q:.3e} from a supposedly PSD covariance")
        q = 0.0
    return q / FOUR_PI


def _worker_count() -> int:
    raw = os.environ.get(THREADS_ENV, "0")
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None
    if n < 0:
        raise ValueError(f"{THREADS_ENV} must be >= 0")
    if n == 0:
        return min(os.cpu_count() or 1, 8)
    return n


def _row_steering(pos: np.ndarray, theta: float, cos_phi: np.ndarray, sin_phi: np.ndarray) -> np.ndarray:
    # (N, n_phi) steering matrix for one elevation row.
    ct = np.cos(theta)
    st = np.sin(theta)
    proj = (
        pos[:, 0:1] * (ct * cos_phi)[None, :]
        + pos[:, 1:2] * (ct * sin_phi)[None, :]
        + pos[:, 2:3] * st
    )
    return np.exp(2j * np.pi * proj)


def _row_power(pos, r: HermitianMatrix, theta, cos_phi, sin_phi) -> np.ndarray:
    s = _row_steering(pos, theta, cos_phi, sin_phi)
    if r.factor is not None:
        g = r.factor.conj().T @ s
        p = np.sum(g.real**2 + g.imag**2, axis=0)
    elif r.is_diagonal():
        p = r.array.diagonal().real @ (s.real**2 + s.imag**2)
    else:
        t = r.array @ s
        q = np.einsum("ij,ij->j", s.conj(), t)
        scale = np.maximum(np.abs(q), max(abs(r.trace()), np.finfo(float).tiny))
        if np.any(np.abs(q.imag) > IMAG_TOL * scale):
            raise ValueError("imaginary residual in s*Rs signals a non-Hermitian covariance")
        p = q.real
        if np.any(p < -NEG_CLAMP):
            raise ValueError(
                f"negative power {p.min():.3e} from a supposedly PSD covariance"
            )
        p = np.where(p < 0.0, 0.0, p)
    return p / FOUR_PI


def _validate_axis(samples, lo, hi, name) -> np.ndarray:
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 1 or arr.size < 1:
        raise ValueError(f"{name} samples must be a nonempty 1-d array")
    if arr.size > 1 and not np.all(np.diff(arr) > 0):
        raise ValueError(f"{name} samples must be strictly increasing")
    if arr[0] < lo - _ANGLE_SLACK or arr[-1] > hi + _ANGLE_SLACK:
        raise ValueError(f"{name} samples outside [{lo:.6g}, {hi:.6g}]")
    return arr


def evaluate_grid(geom: ArrayGeometry, r: HermitianMatrix, theta_samples, phi_samples) -> PatternGrid:
    """Pattern power over the outer product of the two sample axes.

    Rows (fixed theta) are independent units of work and may be spread
    over a thread pool; the per-row computation is identical either way,
    so the result is bitwise independent of the partitioning.  The pool
    size is ``BEAMFORGE_THREADS`` (0 or unset picks a small automatic
    pool).
    """
    th = _validate_axis(theta_samples, -np.pi / 2, np.pi / 2, "theta")
    ph = _validate_axis(phi_samples, 0.0, 2 * np.pi, "phi")
    _check_dim(r, geom.count)
    pos = geom.elements
    cos_phi = np.cos(ph)
    sin_phi = np.sin(ph)
    out = np.empty((th.size, ph.size))

    def fill(i: int):
        out[i, :] = _row_power(pos, r, th[i], cos_phi, sin_phi)

    workers = _worker_count()
    if workers > 1 and th.size > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(fill, range(th.size)))
    else:
        for i in range(th.size):
            fill(i)
    return PatternGrid(th, ph, out)


def integrate_over_sphere(geom: ArrayGeometry, r: HermitianMatrix, order: int, n_phi: int | None = None) -> float:
    """Total radiated power ``integral P(theta, phi) cos(theta) dtheta dphi``.

    Substituting u = sin(theta) turns the elevation integral into a
    polynomial-friendly one handled by Gauss-Legendre nodes of the given
    order; azimuth uses the periodic trapezoid (uniform) rule with
    ``n_phi`` points (default ``4 * order``).  For any covariance with
    trace Pt the exact value is Pt.
    """
    if order < 2:
        raise ValueError("quadrature order must be at least 2")
    if n_phi is None:
        n_phi = 4 * order
    if n_phi < 1:
        raise ValueError("n_phi must be at least 1")
    _check_dim(r, geom.count)
    u, w = np.polynomial.legendre.leggauss(order)
    thetas = np.arcsin(u)
    ph = np.arange(n_phi) * (2.0 * np.pi / n_phi)
    cos_phi = np.cos(ph)
    sin_phi = np.sin(ph)
    pos = geom.elements
    total = 0.0
    for i in range(order):
        row = _row_power(pos, r, thetas[i], cos_phi, sin_phi)
        total += w[i] * row.sum()
    return float(total * (2.0 * np.pi / n_phi))


def user_powers(geom: ArrayGeometry, r: HermitianMatrix, users: UserSet) -> list[float]:
    """Pattern power toward each user direction."""
    return [pattern_value(r, steering_vector(geom, d)) for d in users.users]


def _unit_vectors(theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    ct = np.cos(theta)
    return np.column_stack([ct * np.cos(phi), ct * np.sin(phi), np.sin(theta)])


def _local_maxima(p: np.ndarray):
    """Row, column, value of every 8-neighbor local maximum.

    Plateaus (connected runs of equal candidate cells) are collapsed to
    their lexicographically smallest (row, col) cell.
    """
    mx = ndimage.maximum_filter(p, size=3, mode="constant", cval=-np.inf)
    cand = p >= mx
    labels, _ = ndimage.label(cand, structure=np.ones((3, 3), dtype=int))
    ii, jj = np.nonzero(cand)  # row-major: already (row, col) sorted
    _, first = np.unique(labels[ii, jj], return_index=True)
    return ii[first], jj[first], p[ii[first], jj[first]]


def _nearest_cell(grid: PatternGrid, d: Direction):
    th = grid.theta_samples
    ph = grid.phi_samples
    dt = th[1] - th[0] if th.size > 1 else _ANGLE_SLACK
    dp = ph[1] - ph[0] if ph.size > 1 else _ANGLE_SLACK
    if not (th[0] - dt / 2 <= d.theta <= th[-1] + dt / 2):
        raise ValueError(f"user at theta {d.theta / DEG:.3f} deg outside grid coverage")
    dphi = np.abs(ph - d.phi)
    dphi = np.minimum(dphi, 2 * np.pi - dphi)
    full_circle = ph.size > 1 and (ph[-1] - ph[0]) >= 2 * np.pi - 1.5 * dp
    if not full_circle and dphi.min() > dp / 2 + _ANGLE_SLACK:
        raise ValueError(f"user at phi {d.phi / DEG:.3f} deg outside grid coverage")
    return int(np.argmin(np.abs(th - d.theta))), int(np.argmin(dphi))


def _hpbw_theta_deg(p: np.ndarray, th: np.ndarray, i0: int, j0: int) -> float:
    # Width of the half-power interval along theta through the peak cell,
    # linearly interpolated; clamped at the grid boundary.
    col = p[:, j0]
    half = col[i0] / 2.0
    lo = th[0]
    i = i0
    while i > 0 and col[i - 1] >= half:
        i -= 1
    if i > 0:
        frac = (col[i] - half) / (col[i] - col[i - 1])
        lo = th[i] - frac * (th[i] - th[i - 1])
    hi = th[-1]
    i = i0
    while i < col.size - 1 and col[i + 1] >= half:
        i += 1
    if i < col.size - 1:
        frac = (col[i] - half) / (col[i] - col[i + 1])
        hi = th[i] + frac * (th[i + 1] - th[i])
    return float((hi - lo) / DEG)


def pattern_metrics(grid: PatternGrid, users: UserSet, resolve_tol_deg: float) -> MetricsReport:
    """Per-user power, fairness, resolved count, sidelobe level, beamwidth.

    A user counts as resolved when some local maximum of the grid lies
    within ``resolve_tol_deg`` (great-circle) of it and that maximum
    carries at least half the best user's power.  The peak sidelobe is
    the strongest local maximum outside every user neighborhood, in dB
    relative to the global peak and floored at -100 dB.
    """
    if resolve_tol_deg <= 0:
        raise ValueError("resolve_tol_deg must be positive")
    p = grid.power
    cells = [_nearest_cell(grid, d) for d in users.users]
    upow = tuple(float(p[i, j]) for i, j in cells)
    best = max(upow)
    fairness = float(min(upow) / best) if best > 0 else 0.0

    li, lj, lval = _local_maxima(p)
    ldirs = _unit_vectors(grid.theta_samples[li], grid.phi_samples[lj])
    udirs = np.array([d.unit_vector() for d in users.users])
    ang = np.arccos(np.clip(ldirs @ udirs.T, -1.0, 1.0))  # (L, K)
    tol = resolve_tol_deg * DEG

    resolved = 0
    for k in range(users.count):
        near = ang[:, k] <= tol
        if np.any(near & (lval >= 0.5 * best)):
            resolved += 1

    peak = float(p.max())
    i0, j0 = np.unravel_index(int(np.argmax(p)), p.shape)
    outside = ~np.any(ang <= tol, axis=1)
    psl_db = -100.0
    if peak > 0 and np.any(outside):
        top_side = float(lval[outside].max())
        if top_side > 0:
            psl_db = max(10.0 * np.log10(top_side / peak), -100.0)
    hpbw = _hpbw_theta_deg(p, grid.theta_samples, int(i0), int(j0)) if peak > 0 else 0.0
    return MetricsReport(
        user_powers=upow,
        fairness=fairness,
        resolved_count=int(resolved),
        psl_db=float(psl_db),
        hpbw_deg=float(hpbw),
    )
