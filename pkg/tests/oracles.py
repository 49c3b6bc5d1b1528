"""Independent reference implementations used to cross-check the library.

Everything here is deliberately slow and dumb: direct double sums, dense
Jacobi eigensolves, brute-force lattice enumeration.  None of it shares
code with the package under test.
"""

from __future__ import annotations

import math

import numpy as np


def pattern_double_sum(elements, r, theta, phi):
    """P(theta, phi) = sum_kl R[k,l] exp(j*2*pi*(p_k - p_l) . u) / (4*pi)."""
    u = np.array(
        [
            math.cos(theta) * math.cos(phi),
            math.cos(theta) * math.sin(phi),
            math.sin(theta),
        ]
    )
    phase = 2.0 * math.pi * (elements @ u)
    total = 0.0 + 0.0j
    n = elements.shape[0]
    for k in range(n):
        for l in range(n):
            total += r[k, l] * np.exp(1j * (phase[k] - phase[l]))
    return total.real / (4.0 * math.pi)


def sphere_power_sinc_sum(elements, r):
    """Closed form of the sphere integral of the quadratic-form pattern.

    Integrating exp(j*2*pi*(p_k - p_l).u) over the unit sphere gives
    4*pi*sinc(2*pi*|p_k - p_l|), so the radiated power reduces to
    sum_kl R[k,l]*sinc(q_kl) with q_kl = 2*pi*|p_k - p_l|.
    """
    n = elements.shape[0]
    total = 0.0 + 0.0j
    for k in range(n):
        for l in range(n):
            q = 2.0 * math.pi * np.linalg.norm(elements[k] - elements[l])
            total += r[k, l] * (1.0 if q == 0.0 else math.sin(q) / q)
    return total.real


def jacobi_eigh(a, sweeps=100, tol=1e-14):
    """Dense Hermitian eigensolve by cyclic complex Jacobi rotations.

    Returns (w, v) with eigenvalues ascending and a[:, :] @ v[:, i] =
    w[i] * v[:, i].  Self-contained alternative to any iterative scheme.
    """
    a = np.array(a, dtype=complex)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = max(np.abs(a).max(), 1.0)
    for _ in range(sweeps):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= tol * scale:
                    continue
                off = max(off, abs(apq))
                # unitary 2x2 rotation that annihilates a[p, q]
                f = apq / abs(apq)
                tau = (a[q, q].real - a[p, p].real) / (2.0 * abs(apq))
                t = math.copysign(1.0, tau) / (abs(tau) + math.hypot(1.0, tau))
                c = 1.0 / math.hypot(1.0, t)
                s = t * c
                rp = a[:, p].copy()
                rq = a[:, q].copy()
                a[:, p] = c * rp - s * np.conj(f) * rq
                a[:, q] = s * f * rp + c * rq
                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = c * rp - s * f * rq
                a[q, :] = s * np.conj(f) * rp + c * rq
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * np.conj(f) * vq
                v[:, q] = s * f * vp + c * vq
        if off <= tol * scale:
            break
    w = np.real(np.diag(a))
    order = np.argsort(w)
    return w[order], v[:, order]


def brute_force_disk(count, spacing, half=40):
    """Enumerate offset-grid points in a huge window, sort by radius."""
    return _brute_force_select(count, spacing, lambda y, z: math.hypot(y, z), half)


def brute_force_hexagon(count, spacing, half=40):
    return _brute_force_select(count, spacing, hexagon_gauge, half)


def _brute_force_select(count, spacing, norm_fn, half):
    pts = []
    for m in range(-half, half):
        for n in range(-half, half):
            y = (m + 0.5) * spacing
            z = (n + 0.5) * spacing
            # keys rounded so same-shell points tie exactly
            key = round(norm_fn(y, z), 9)
            # counterclockwise angle measured from the +y axis
            ang = math.atan2(z, y) % (2.0 * math.pi)
            pts.append((key, ang, y, z))
    pts.sort(key=lambda t: (t[0], t[1]))
    chosen = pts[:count]
    return np.array([[0.0, y, z] for _, _, y, z in chosen])


def hexagon_point_inside(y, z, circumradius):
    """Ray-casting point-in-polygon test against a regular hexagon.

    Vertices sit at circumradius distance, at angles 0, 60, ..., 300
    degrees measured counterclockwise from the +y axis (vertex on +y).
    Boundary points may land on either side; the bisection caller only
    needs the answer to flip once.
    """
    verts = []
    for k in range(6):
        ang = math.radians(60.0 * k)
        verts.append((circumradius * math.cos(ang), circumradius * math.sin(ang)))
    inside = False
    j = 5
    for i in range(6):
        yi, zi = verts[i]
        yj, zj = verts[j]
        if (zi > z) != (zj > z) and y < (yj - yi) * (z - zi) / (zj - zi) + yi:
            inside = not inside
        j = i
    return inside


def hexagon_gauge(y, z):
    """Smallest circumradius t whose hexagon (vertex on +y) contains (y, z).

    Bisection against the point-in-polygon test; independent of any
    closed-form support-function formula.
    """
    if y == 0.0 and z == 0.0:
        return 0.0
    hi = 2.0 * math.hypot(y, z) + 1.0
    lo = 0.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if hexagon_point_inside(y, z, mid):
            hi = mid
        else:
            lo = mid
    return hi


def archimedes1_arclength(a, t):
    """Closed form of integral of a*sqrt(1+u^2) du from 0 to t (n = 1)."""
    return 0.5 * a * (t * math.sqrt(1.0 + t * t) + math.asinh(t))
