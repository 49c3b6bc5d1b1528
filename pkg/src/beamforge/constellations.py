"""Deterministic antenna-array geometry generators.

All element positions are expressed in wavelengths.  Linear arrays lie
on the z axis; planar constellations lie in the y-z plane (x = 0) so a
broadside user sits near the +x axis.  Every generator is a pure
function of its arguments: the same call always reproduces the same
element list, element for element.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq

__all__ = [
    "ArrayGeometry",
    "QuadratureError",
    "SpiralParams",
    "make_archimedes_spiral",
    "make_disk",
    "make_hexagon",
    "make_log_spiral",
    "make_square_grid",
    "make_ula",
]

MIN_ELEMENT_SEPARATION = 1e-9


class QuadratureError(RuntimeError):
    """Adaptive arclength quadrature failed to converge."""


@dataclass(frozen=True)
class ArrayGeometry:
    """Ordered antenna element positions (x, y, z), in wavelengths."""

    elements: np.ndarray
    label: str = "array"

    def __post_init__(self):
        el = np.array(self.elements, dtype=float)
        if el.ndim != 2 or el.shape[1] != 3:
            raise ValueError(f"elements must have shape (N, 3), got {el.shape}")
        if el.shape[0] < 1:
            raise ValueError("array needs at least one element")
        el.setflags(write=False)
        object.__setattr__(self, "elements", el)
        if el.shape[0] > 1 and self.min_pairwise_distance() < MIN_ELEMENT_SEPARATION:
            raise ValueError("two elements are closer than 1e-9 wavelengths")

    @property
    def count(self) -> int:
        return self.elements.shape[0]

    def min_pairwise_distance(self) -> float:
        # O(N^2) scan; arrays stay small enough (N <= a few hundred).
        d = self.elements[:, None, :] - self.elements[None, :, :]
        dist = np.sqrt((d * d).sum(axis=-1))
        iu = np.triu_indices(self.count, k=1)
        return float(dist[iu].min())

    def bounding_box(self) -> tuple[np.ndarray, np.ndarray]:
        return self.elements.min(axis=0), self.elements.max(axis=0)


@dataclass(frozen=True)
class SpiralParams:
    """Spiral curve constants, in wavelengths and radians.

    ``a`` scales the radius.  ``b`` is the logarithmic growth rate (log
    spiral only); ``n`` is the root index in ``r = a * theta**(1/n)``
    (Archimedes family only).  ``start_angle`` is where marching begins.
    """

    a: float
    b: float | None = None
    n: int | None = None
    start_angle: float = 0.0


def make_ula(count: int, spacing: float = 0.5) -> ArrayGeometry:
    """Uniform linear array along z, centered on the origin."""
    if count < 1:
        raise ValueError("count must be at least 1")
    if spacing <= 0:
        raise ValueError("spacing must be positive")
    z = (np.arange(count) - (count - 1) / 2.0) * spacing
    pos = np.column_stack([np.zeros(count), np.zeros(count), z])
    return ArrayGeometry(pos, label=f"ula-{count}")


def make_square_grid(side: int, spacing: float = 0.5) -> ArrayGeometry:
    """side x side grid in the y-z plane, centered, row-major order."""
    if side < 1:
        raise ValueError("side must be at least 1")
    if spacing <= 0:
        raise ValueError("spacing must be positive")
    offs = (np.arange(side) - (side - 1) / 2.0) * spacing
    yy, zz = np.meshgrid(offs, offs, indexing="ij")
    pos = np.column_stack([np.zeros(side * side), yy.ravel(), zz.ravel()])
    return ArrayGeometry(pos, label=f"square-{side}x{side}")


def _grid_angles(y: np.ndarray, z: np.ndarray) -> np.ndarray:
    # Angle from the +y axis, counterclockwise in the y-z plane, [0, 2pi).
    return np.mod(np.arctan2(z, y), 2.0 * np.pi)


_HEX_EDGE_ANGLES = np.radians(30.0 + 60.0 * np.arange(6))


def _hexagon_norm(y: np.ndarray, z: np.ndarray) -> np.ndarray:
    # Smallest t such that (y, z) lies inside the regular hexagon of
    # circumradius t with a vertex on the +y axis: gauge function of the
    # hexagon, max projection onto the six edge normals over the apothem.
    proj = np.max(
        [y * np.cos(t) + z * np.sin(t) for t in _HEX_EDGE_ANGLES], axis=0
    )
    return proj / (math.sqrt(3.0) / 2.0)


def _select_from_offset_grid(count, spacing, key_fn):
    """First ``count`` offset-grid points ranked by (key, angle).

    Keys are rounded to 1e-9 before sorting so points on the same shell
    tie exactly and the angle tie-break decides; shells of this lattice
    are separated far more than that.  The candidate window grows until
    the count-th smallest key is strictly inside it, which guarantees no
    point outside the window could rank earlier (every key function
    below bounds the Euclidean radius from below).
    """
    bound = spacing * (math.sqrt(count / math.pi) + 2.0)
    while True:
        half = int(math.ceil(bound / spacing)) + 1
        coords = (np.arange(-half, half) + 0.5) * spacing
        yy, zz = np.meshgrid(coords, coords, indexing="ij")
        y = yy.ravel()
        z = zz.ravel()
        keys = np.round(key_fn(y, z), 9)
        order = np.lexsort((_grid_angles(y, z), keys))
        if order.size >= count and keys[order[count - 1]] < bound:
            sel = order[:count]
            return np.column_stack([np.zeros(count), y[sel], z[sel]])
        bound *= 1.5


def make_disk(count: int, spacing: float = 0.5) -> ArrayGeometry:
    """Disk-shaped constellation cut from a centered offset grid.

    Candidate positions ((m + 1/2) s, (n + 1/2) s) are ranked by radius,
    ties broken by angle from the +y axis counterclockwise, and the
    first ``count`` are kept.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    if spacing <= 0:
        raise ValueError("spacing must be positive")
    pos = _select_from_offset_grid(count, spacing, lambda y, z: np.hypot(y, z))
    return ArrayGeometry(pos, label=f"disk-{count}")


def make_hexagon(count: int, spacing: float = 0.5) -> ArrayGeometry:
    """Hexagonal constellation cut from the same offset grid as the disk.

    Points are ranked by the hexagon gauge norm (regular hexagon with a
    vertex on the +y axis), ties broken by angle.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    if spacing <= 0:
        raise ValueError("spacing must be positive")
    pos = _select_from_offset_grid(count, spacing, _hexagon_norm)
    return ArrayGeometry(pos, label=f"hexagon-{count}")


def make_log_spiral(count: int, params: SpiralParams, arc_spacing: float = 0.5) -> ArrayGeometry:
    """Elements marched at equal arclength along ``r = a * exp(b * theta)``.

    ``theta`` is measured from the +y axis in the y-z plane, so the
    curve point is (y, z) = (r cos(theta), r sin(theta)).  The arclength
    from the curve start has the closed form
    ``s(theta) = a * sqrt(1 + b^2) / b * (exp(b theta) - 1)``, which is
    inverted exactly for each step, so no marching error accumulates.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    if arc_spacing <= 0:
        raise ValueError("arc_spacing must be positive")
    if params.a <= 0:
        raise ValueError("spiral constant a must be positive")
    if params.b is None or params.b <= 0:
        raise ValueError("log spiral needs a positive growth rate b")
    a, b = params.a, float(params.b)
    c = a * math.sqrt(1.0 + b * b) / b
    base = math.exp(b * params.start_angle)
    growth = base + np.arange(count) * (arc_spacing / c)
    theta = np.log(growth) / b
    r = a * growth
    pos = np.column_stack([np.zeros(count), r * np.cos(theta), r * np.sin(theta)])
    return ArrayGeometry(pos, label=f"log-spiral-{count}")


def _arc_segment(speed, t0: float, t1: float) -> float:
    res = quad(speed, t0, t1, epsabs=1e-13, epsrel=1e-13, limit=200, full_output=1)
    if len(res) > 3:
        raise QuadratureError(f"arclength quadrature failed on [{t0:.6g}, {t1:.6g}]: {res[3]}")
    return float(res[0])


def make_archimedes_spiral(count: int, params: SpiralParams, arc_spacing: float = 0.5) -> ArrayGeometry:
    """Elements marched at equal arclength along ``r = a * theta**(1/n)``.

    The arclength integrand ``sqrt(r^2 + (dr/dtheta)^2)`` is evaluated by
    adaptive quadrature and each step angle is found by root bracketing,
    so consecutive elements are ``arc_spacing`` apart along the curve.
    ``start_angle`` must be positive (the curve slope is singular at 0).
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    if arc_spacing <= 0:
        raise ValueError("arc_spacing must be positive")
    if params.a <= 0:
        raise ValueError("spiral constant a must be positive")
    if params.n is None or params.n < 1:
        raise ValueError("Archimedes spiral needs an integer root index n >= 1")
    if params.start_angle <= 0:
        raise ValueError("start_angle must be positive")
    a = params.a
    inv = 1.0 / float(params.n)

    def speed(t):
        return math.hypot(a * t**inv, a * inv * t ** (inv - 1.0))

    thetas = [float(params.start_angle)]
    for _ in range(count - 1):
        t0 = thetas[-1]
        hi = t0 + arc_spacing / speed(t0)
        while _arc_segment(speed, t0, hi) < arc_spacing:
            hi = t0 + (hi - t0) * 1.6
        t1 = brentq(
            lambda t: _arc_segment(speed, t0, t) - arc_spacing,
            t0,
            hi,
            xtol=1e-13,
        )
        thetas.append(float(t1))
    theta = np.asarray(thetas)
    r = a * theta**inv
    pos = np.column_stack([np.zeros(count), r * np.cos(theta), r * np.sin(theta)])
    return ArrayGeometry(pos, label=f"archimedes{params.n}-{count}")
