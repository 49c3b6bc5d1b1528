"""Matplotlib rendering of scenario artifacts to PNG files.

Figures accompany the delimited outputs of each bundle; the numeric
pipeline itself never depends on them.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .constellations import ArrayGeometry
from .radiation import DEG, PatternGrid, UserSet

__all__ = [
    "render_cut_overlay",
    "render_geometry",
    "render_surface",
    "render_top_view",
]

_DPI = 150


def _db(power: np.ndarray, floor: float = -60.0) -> np.ndarray:
    peak = power.max()
    if peak <= 0:
        return np.full_like(power, floor)
    with np.errstate(divide="ignore"):
        db = 10.0 * np.log10(power / peak)
    return np.maximum(db, floor)


def render_cut_overlay(path, curves, title: str, user_thetas_deg=None) -> None:
    """Overlay theta cuts: ``curves`` is a list of (label, theta_deg, power)."""
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(8, 7), sharex=True)
    for label, th, p in curves:
        ax1.plot(th, p, label=label, lw=1.2)
        peak = max(max(p), np.finfo(float).tiny)
        with np.errstate(divide="ignore"):
            db = np.maximum(10.0 * np.log10(np.asarray(p) / peak), -60.0)
        ax2.plot(th, db, label=label, lw=1.2)
    if user_thetas_deg is not None:
        for ax in (ax1, ax2):
            for t in user_thetas_deg:
                ax.axvline(t, color="gray", ls=":", lw=0.8)
    ax1.set_ylabel("power (W/sr)")
    ax2.set_ylabel("power (dB rel. peak)")
    ax2.set_xlabel("theta (deg)")
    ax1.set_title(title)
    ax1.legend(fontsize=8)
    for ax in (ax1, ax2):
        ax.grid(alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def render_top_view(path, grid: PatternGrid, users: UserSet | None, title: str) -> None:
    """Heatmap of the pattern in dB over (phi, theta)."""
    fig, ax = plt.subplots(figsize=(8, 5.5))
    th = grid.theta_samples / DEG
    ph = grid.phi_samples / DEG
    mesh = ax.pcolormesh(ph, th, _db(grid.power), cmap="viridis", shading="auto")
    fig.colorbar(mesh, ax=ax, label="power (dB rel. peak)")
    if users is not None:
        ax.plot(
            [d.phi / DEG for d in users.users],
            [d.theta / DEG for d in users.users],
            "r^",
            ms=6,
            mfc="none",
            label="users",
        )
        ax.legend(fontsize=8, loc="upper right")
    ax.set_xlabel("phi (deg)")
    ax.set_ylabel("theta (deg)")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def render_surface(path, grid: PatternGrid, title: str) -> None:
    """3-d surface of the pattern power, downsampled for plot speed."""
    th = grid.theta_samples / DEG
    ph = grid.phi_samples / DEG
    step_t = max(1, th.size // 180)
    step_p = max(1, ph.size // 180)
    tt, pp = np.meshgrid(th[::step_t], ph[::step_p], indexing="ij")
    zz = grid.power[::step_t, ::step_p]
    fig = plt.figure(figsize=(8, 6))
    ax = fig.add_subplot(projection="3d")
    ax.plot_surface(pp, tt, zz, cmap="viridis", linewidth=0, antialiased=False)
    ax.set_xlabel("phi (deg)")
    ax.set_ylabel("theta (deg)")
    ax.set_zlabel("power (W/sr)")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)


def render_geometry(path, geom: ArrayGeometry, users: UserSet | None, title: str) -> None:
    """Element layout in the y-z plane and, when given, user directions."""
    ncols = 2 if users is not None else 1
    fig, axes = plt.subplots(1, ncols, figsize=(5.5 * ncols, 5))
    axes = np.atleast_1d(axes)
    ax = axes[0]
    ax.plot(geom.elements[:, 1], geom.elements[:, 2], "o", ms=2.5)
    ax.set_xlabel("y (wavelengths)")
    ax.set_ylabel("z (wavelengths)")
    ax.set_title(f"{geom.label} ({geom.count} elements)")
    ax.set_aspect("equal")
    ax.grid(alpha=0.3)
    if users is not None:
        ax = axes[1]
        ax.plot(
            [d.phi / DEG for d in users.users],
            [d.theta / DEG for d in users.users],
            "r^",
            ms=7,
        )
        ax.set_xlabel("phi (deg)")
        ax.set_ylabel("theta (deg)")
        ax.set_title("user directions")
        ax.grid(alpha=0.3)
    fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
