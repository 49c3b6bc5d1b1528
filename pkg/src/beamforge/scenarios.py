"""Scripted experiment bundles.

Each scenario writes a self-contained directory: geometry and user
files, covariance designs, pattern grids as CSV, metrics, gnuplot
scripts for the delimited data, rendered PNG figures, and a manifest
listing every artifact together with the parameter defaults that
produced them.  Scenario outputs are deterministic; re-running one
reproduces every CSV/JSON byte for byte.
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

import numpy as np

from .constellations import (
    ArrayGeometry,
    SpiralParams,
    make_archimedes_spiral,
    make_disk,
    make_hexagon,
    make_log_spiral,
    make_square_grid,
    make_ula,
)
from .design import DesignSpec, build_user_gram, canonical_matrix, design_eig, design_ideal
from .fileio import (
    DesignFile,
    write_design,
    write_geometry,
    write_json,
    write_metrics,
    write_pattern_csv,
    write_users,
)
from .radiation import DEG, UserSet, evaluate_grid, pattern_metrics
from . import report

__all__ = [
    "PLANAR_CONSTELLATIONS",
    "SCENARIO_NAMES",
    "run_all_planar",
    "run_fig1",
    "run_linear",
    "run_planar",
    "shipped_constellation",
    "shipped_users",
    "summarize",
    "verify_bundle",
]

DEFAULT_SPACING = 0.5
DEFAULT_ARC_SPACING = 0.5
DEFAULT_THETA_STEP_DEG = 0.25
DEFAULT_PHI_STEP_DEG = 0.5
DEFAULT_RESOLVE_TOL_DEG = 6.0

PLANAR_CONSTELLATIONS = ("square", "disk", "hexagon", "log_spiral", "archimedes1", "archimedes3")
SCENARIO_NAMES = ("fig1", "ula50") + PLANAR_CONSTELLATIONS + ("all-planar",)

_USERS_RESOURCE = "users_default.json"

# Reference range for the shipped user set; directions are what matter
# in the far field, the range is context only.
USERS_RANGE_NOTE = "far-field directions; nominal user range 100 km along the +x axis"


def shipped_constellation(name: str) -> ArrayGeometry:
    """The 400-element constellation registered under ``name``."""
    if name == "square":
        return make_square_grid(20, DEFAULT_SPACING)
    if name == "disk":
        return make_disk(400, DEFAULT_SPACING)
    if name == "hexagon":
        return make_hexagon(400, DEFAULT_SPACING)
    if name == "log_spiral":
        return make_log_spiral(400, SpiralParams(a=0.15, b=0.1, start_angle=0.0), DEFAULT_ARC_SPACING)
    if name == "archimedes1":
        return make_archimedes_spiral(400, SpiralParams(a=0.08, n=1, start_angle=2 * np.pi), DEFAULT_ARC_SPACING)
    if name == "archimedes3":
        return make_archimedes_spiral(400, SpiralParams(a=0.28, n=3, start_angle=2 * np.pi), DEFAULT_ARC_SPACING)
    raise ValueError(f"unknown constellation {name!r}; expected one of {PLANAR_CONSTELLATIONS}")


def shipped_users() -> UserSet:
    """The versioned six-user direction set shared by all scenarios."""
    text = resources.files("beamforge").joinpath("data").joinpath(_USERS_RESOURCE).read_text("utf-8")
    data = json.loads(text)
    return UserSet.from_pairs(data["users"], label=data["label"])


def _axis_deg(lo: float, hi: float, step: float) -> np.ndarray:
    n = round((hi - lo) / step)
    return np.linspace(lo, hi, n + 1) * DEG


def _cut_script(csv_name: str, labels_title: str) -> str:
    return "\n".join(
        [
            "# gnuplot script; run from the bundle directory",
            'set datafile separator ","',
            "set grid",
            'set xlabel "theta (deg)"',
            'set ylabel "power (W/sr)"',
            f'set title "{labels_title}"',
            f'plot "{csv_name}" skip 1 using 1:3 with lines title "{csv_name}"',
            "pause -1",
            "",
        ]
    )


def _grid_script(csv_name: str, title: str) -> str:
    return "\n".join(
        [
            "# gnuplot script; run from the bundle directory",
            'set datafile separator ","',
            f'set title "{title}"',
            'set xlabel "phi (deg)"',
            'set ylabel "theta (deg)"',
            "# top view (dB heatmap)",
            f'plot "{csv_name}" skip 1 using 2:1:4 with image notitle',
            "pause -1",
            "# 3-d surface view (linear power); uncomment to use",
            "# set view 55, 310",
            f'# splot "{csv_name}" skip 1 using 2:1:3 every 8 with points palette notitle',
            "",
        ]
    )


def _write_manifest(out: Path, scenario: str, files: list[str], provenance: dict) -> None:
    write_json(
        out / "manifest.json",
        {"scenario": scenario, "files": sorted(files), "provenance": provenance},
    )


def verify_bundle(bundle_dir) -> None:
    """Check every manifest-listed artifact exists; raise if one is missing."""
    out = Path(bundle_dir)
    manifest = json.loads((out / "manifest.json").read_text("utf-8"))
    missing = [name for name in manifest["files"] if not (out / name).exists()]
    if missing:
        raise FileNotFoundError(f"bundle {out} is missing artifacts: {missing}")


def run_fig1(out_dir, theta_step_deg: float = DEFAULT_THETA_STEP_DEG, render: bool = True) -> dict:
    """Three canonical covariances on a 10-element half-wave ULA.

    Writes one theta-cut CSV per matrix (phi = 0) plus a combined plot
    script and overlay figure.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    geom = make_ula(10, DEFAULT_SPACING)
    n = geom.count
    th = _axis_deg(-90.0, 90.0, theta_step_deg)
    phi = np.array([0.0])
    files = ["geometry.json", "manifest.json", "plot_fig1.gp"]
    write_geometry(out / "geometry.json", geom)

    curves = []
    peak_at_broadside = {}
    for kind in ("full_ones", "toeplitz", "identity"):
        spec = DesignSpec(power_budget=float(n), method=kind)
        r = canonical_matrix(kind, n, spec)
        grid = evaluate_grid(geom, r, th, phi)
        write_design(
            out / f"design_{kind}.json",
            DesignFile(method=kind, power_budget=float(n), objective=None, degenerate=False, R=r),
        )
        write_pattern_csv(out / f"pattern_{kind}.csv", grid)
        files += [f"design_{kind}.json", f"pattern_{kind}.csv"]
        curves.append((kind, th / DEG, grid.power[:, 0]))
        i0 = int(np.argmin(np.abs(th)))
        peak_at_broadside[kind] = float(grid.power[i0, 0])

    script = ["# gnuplot script; run from the bundle directory", 'set datafile separator ","', "set grid"]
    script += ['set xlabel "theta (deg)"', 'set ylabel "power (W/sr)"', 'set title "canonical covariances, 10-element ULA"']
    script.append(
        "plot "
        + ", ".join(f'"pattern_{k}.csv" skip 1 using 1:3 with lines title "{k}"' for k in ("full_ones", "toeplitz", "identity"))
    )
    script += ["pause -1", ""]
    (out / "plot_fig1.gp").write_text("\n".join(script), encoding="utf-8")

    if render:
        report.render_cut_overlay(out / "figure_patterns.png", curves, "canonical covariances, 10-element ULA")
        files.append("figure_patterns.png")

    provenance = {
        "power_budget": float(n),
        "spacing": DEFAULT_SPACING,
        "theta_step_deg": theta_step_deg,
        "phi_cut_deg": 0.0,
        "toeplitz_rho": 0.8,
    }
    _write_manifest(out, "fig1", files, provenance)
    verify_bundle(out)
    return {"scenario": "fig1", "dir": str(out), "broadside_power": peak_at_broadside}


def _design_pair(geom: ArrayGeometry, users: UserSet):
    z = build_user_gram(geom, users)
    pt = float(geom.count)
    eig = design_eig(z, DesignSpec(power_budget=pt, method="eig"))
    ideal = design_ideal(z, DesignSpec(power_budget=pt, method="ideal"))
    return z, eig, ideal


def _write_method_outputs(out, method, design, pt, grid, users, resolve_tol_deg, files):
    write_design(
        out / f"design_{method}.json",
        DesignFile(
            method=method,
            power_budget=pt,
            objective=design.achieved_objective,
            degenerate=design.degenerate,
            R=design.R,
        ),
    )
    write_pattern_csv(out / f"pattern_{method}.csv", grid)
    metrics = pattern_metrics(grid, users, resolve_tol_deg)
    write_metrics(out / f"metrics_{method}.json", metrics)
    files += [f"design_{method}.json", f"pattern_{method}.csv", f"metrics_{method}.json"]
    return metrics


def run_linear(
    out_dir,
    users: UserSet | None = None,
    theta_step_deg: float = DEFAULT_THETA_STEP_DEG,
    phi_step_deg: float = DEFAULT_PHI_STEP_DEG,
    resolve_tol_deg: float = DEFAULT_RESOLVE_TOL_DEG,
    render: bool = True,
) -> dict:
    """Focusing study on the 50-element half-wave ULA.

    Emits overlaid theta-cut CSVs (the pattern of a z-axis array does
    not depend on phi) and metrics for the eigen and ideal designs.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    geom = make_ula(50, DEFAULT_SPACING)
    users = users or shipped_users()
    pt = float(geom.count)
    z, eig, ideal = _design_pair(geom, users)

    th = _axis_deg(-90.0, 90.0, theta_step_deg)
    ph = _axis_deg(0.0, 360.0, phi_step_deg)
    cut_phi = np.array([0.0])

    files = ["geometry.json", "users.json", "manifest.json"]
    write_geometry(out / "geometry.json", geom)
    write_users(out / "users.json", users)

    results = {}
    curves = []
    for method, design in (("eig", eig), ("ideal", ideal)):
        # metrics come from the full grid (users sit at nonzero phi);
        # the shipped CSV is the phi = 0 cut the overlay figure uses.
        full = evaluate_grid(geom, design.R, th, ph)
        cut = evaluate_grid(geom, design.R, th, cut_phi)
        metrics = pattern_metrics(full, users, resolve_tol_deg)
        write_design(
            out / f"design_{method}.json",
            DesignFile(method=method, power_budget=pt, objective=design.achieved_objective, degenerate=design.degenerate, R=design.R),
        )
        write_pattern_csv(out / f"pattern_{method}.csv", cut)
        write_metrics(out / f"metrics_{method}.json", metrics)
        (out / f"plot_{method}.gp").write_text(
            _cut_script(f"pattern_{method}.csv", f"{method} design, 50-element ULA"), encoding="utf-8"
        )
        files += [f"design_{method}.json", f"pattern_{method}.csv", f"metrics_{method}.json", f"plot_{method}.gp"]
        results[method] = metrics
        curves.append((method, th / DEG, cut.power[:, 0]))

    if render:
        report.render_cut_overlay(
            out / "figure_patterns.png",
            curves,
            "user focusing on the 50-element ULA",
            user_thetas_deg=[d.theta / DEG for d in users.users],
        )
        report.render_geometry(out / "figure_geometry.png", geom, users, "ula50 scenario")
        files += ["figure_patterns.png", "figure_geometry.png"]

    provenance = {
        "power_budget": pt,
        "spacing": DEFAULT_SPACING,
        "theta_step_deg": theta_step_deg,
        "phi_step_deg": phi_step_deg,
        "resolve_tol_deg": resolve_tol_deg,
        "users_note": USERS_RANGE_NOTE,
    }
    _write_manifest(out, "ula50", files, provenance)
    verify_bundle(out)
    return {
        "scenario": "ula50",
        "dir": str(out),
        "objective_eig": eig.achieved_objective,
        "degenerate": eig.degenerate,
        "metrics": results,
    }


def run_planar(
    name: str,
    out_dir,
    users: UserSet | None = None,
    theta_step_deg: float = DEFAULT_THETA_STEP_DEG,
    phi_step_deg: float = DEFAULT_PHI_STEP_DEG,
    resolve_tol_deg: float = DEFAULT_RESOLVE_TOL_DEG,
    render: bool = True,
) -> dict:
    """Focusing study on one 400-element planar constellation."""
    geom = shipped_constellation(name)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    users = users or shipped_users()
    pt = float(geom.count)
    z, eig, ideal = _design_pair(geom, users)

    th = _axis_deg(-90.0, 90.0, theta_step_deg)
    ph = _axis_deg(0.0, 360.0, phi_step_deg)

    files = ["geometry.json", "users.json", "manifest.json"]
    write_geometry(out / "geometry.json", geom)
    write_users(out / "users.json", users)

    results = {}
    for method, design in (("eig", eig), ("ideal", ideal)):
        grid = evaluate_grid(geom, design.R, th, ph)
        metrics = _write_method_outputs(out, method, design, pt, grid, users, resolve_tol_deg, files)
        (out / f"plot_{method}.gp").write_text(
            _grid_script(f"pattern_{method}.csv", f"{method} design, {geom.label}"), encoding="utf-8"
        )
        files.append(f"plot_{method}.gp")
        results[method] = metrics
        if render:
            report.render_top_view(out / f"figure_{method}_top.png", grid, users, f"{method} design, {geom.label}")
            report.render_surface(out / f"figure_{method}_3d.png", grid, f"{method} design, {geom.label}")
            files += [f"figure_{method}_top.png", f"figure_{method}_3d.png"]

    if render:
        report.render_geometry(out / "figure_geometry.png", geom, users, f"{name} scenario")
        files.append("figure_geometry.png")

    provenance = {
        "power_budget": pt,
        "spacing": DEFAULT_SPACING,
        "arc_spacing": DEFAULT_ARC_SPACING,
        "theta_step_deg": theta_step_deg,
        "phi_step_deg": phi_step_deg,
        "resolve_tol_deg": resolve_tol_deg,
        "users_note": USERS_RANGE_NOTE,
    }
    _write_manifest(out, name, files, provenance)
    verify_bundle(out)
    return {
        "scenario": name,
        "dir": str(out),
        "objective_eig": eig.achieved_objective,
        "degenerate": eig.degenerate,
        "metrics": results,
    }


def summarize(bundles: list[dict]) -> str:
    """CSV summary table across constellations (eigen design metrics,
    with the ideal design's resolved count and fairness alongside)."""
    lines = [
        "constellation,objective,resolved_count,fairness,psl_db,hpbw_deg,"
        "resolved_count_ideal,fairness_ideal,degenerate"
    ]
    for b in bundles:
        m_eig = b["metrics"]["eig"]
        m_ideal = b["metrics"]["ideal"]
        lines.append(
            f'{b["scenario"]},{b["objective_eig"]:.12g},{m_eig.resolved_count},'
            f"{m_eig.fairness:.12g},{m_eig.psl_db:.12g},{m_eig.hpbw_deg:.12g},"
            f"{m_ideal.resolved_count},{m_ideal.fairness:.12g},{b['degenerate']}"
        )
    return "\n".join(lines) + "\n"


def run_all_planar(out_dir, **kwargs) -> list[dict]:
    """Run every planar constellation scenario and write summary.csv."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    bundles = [run_planar(name, out / name, **kwargs) for name in PLANAR_CONSTELLATIONS]
    (out / "summary.csv").write_text(summarize(bundles), encoding="utf-8")
    return bundles
