"""Command-line pipeline: geometry -> design -> pattern -> metrics.

Subcommands exchange JSON/CSV files so stages can be rerun or swapped
independently.  Angles on the command line are degrees; files store
radians (CSV columns suffixed ``_deg`` excepted).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .constellations import (
    QuadratureError,
    SpiralParams,
    make_archimedes_spiral,
    make_disk,
    make_hexagon,
    make_log_spiral,
    make_square_grid,
    make_ula,
)
from .design import CANONICAL_KINDS, DesignSpec, build_user_gram, canonical_matrix, design_eig, design_ideal
from .fileio import (
    DesignFile,
    read_design,
    read_geometry,
    read_pattern_csv,
    read_users,
    write_design,
    write_geometry,
    write_metrics,
    write_pattern_csv,
)
from .hermitian import ConvergenceError
from .radiation import DEG, evaluate_grid, pattern_metrics
from .scenarios import (
    DEFAULT_PHI_STEP_DEG,
    DEFAULT_RESOLVE_TOL_DEG,
    DEFAULT_THETA_STEP_DEG,
    SCENARIO_NAMES,
    run_all_planar,
    run_fig1,
    run_linear,
    run_planar,
    summarize,
)

GEOMETRY_KINDS = ("ula", "square", "disk", "hexagon", "log-spiral", "archimedes")

_SPIRAL_A_DEFAULTS = {"log-spiral": 0.15, ("archimedes", 1): 0.08, ("archimedes", 3): 0.28}


def _build_geometry(args):
    kind = args.kind
    if kind == "ula":
        if args.count is None:
            raise ValueError("ula needs --count")
        return make_ula(args.count, args.spacing)
    if kind == "square":
        if args.side is None:
            raise ValueError("square needs --side")
        return make_square_grid(args.side, args.spacing)
    if kind in ("disk", "hexagon"):
        if args.count is None:
            raise ValueError(f"{kind} needs --count")
        maker = make_disk if kind == "disk" else make_hexagon
        return maker(args.count, args.spacing)
    if args.count is None:
        raise ValueError(f"{kind} needs --count")
    if kind == "log-spiral":
        a = args.a if args.a is not None else _SPIRAL_A_DEFAULTS["log-spiral"]
        start = 0.0 if args.start_angle is None else args.start_angle * DEG
        params = SpiralParams(a=a, b=args.b, start_angle=start)
        return make_log_spiral(args.count, params, args.arc_spacing)
    if kind == "archimedes":
        a = args.a if args.a is not None else _SPIRAL_A_DEFAULTS.get(("archimedes", args.n))
        if a is None:
            raise ValueError(f"no default spiral constant for n={args.n}; pass --a")
        start = 2 * np.pi if args.start_angle is None else args.start_angle * DEG
        params = SpiralParams(a=a, n=args.n, start_angle=start)
        return make_archimedes_spiral(args.count, params, args.arc_spacing)
    raise ValueError(f"unknown geometry kind {kind!r}")


def cmd_geometry(args) -> int:
    geom = _build_geometry(args)
    write_geometry(args.out, geom)
    lo, hi = geom.bounding_box()
    print(
        f"wrote {args.out}: {geom.label}, N={geom.count}, "
        f"x[{lo[0]:.4g}, {hi[0]:.4g}] y[{lo[1]:.4g}, {hi[1]:.4g}] z[{lo[2]:.4g}, {hi[2]:.4g}]"
    )
    return 0


def cmd_design(args) -> int:
    geom = read_geometry(args.geometry) if args.geometry else None
    if args.method in ("eig", "ideal"):
        if geom is None or args.users is None:
            raise ValueError(f"method {args.method} needs --geometry and --users")
        dim = geom.count
    else:
        if args.dim is not None:
            dim = args.dim
        elif geom is not None:
            dim = geom.count
        else:
            raise ValueError(f"method {args.method} needs --dim or --geometry")
        if geom is not None and args.dim is not None and args.dim != geom.count:
            raise ValueError(f"--dim {args.dim} does not match geometry element count {geom.count}")
    power = args.power if args.power is not None else float(dim)
    spec = DesignSpec(power_budget=power, method=args.method, rho=args.rho)

    if args.method in ("eig", "ideal"):
        users = read_users(args.users)
        z = build_user_gram(geom, users)
        result = design_eig(z, spec) if args.method == "eig" else design_ideal(z, spec)
        design = DesignFile(
            method=args.method,
            power_budget=power,
            objective=result.achieved_objective,
            degenerate=result.degenerate,
            R=result.R,
        )
        print(
            f"wrote {args.out}: method={args.method}, objective={result.achieved_objective:.9g}, "
            f"degenerate={result.degenerate}"
        )
    else:
        r = canonical_matrix(args.method, dim, spec)
        design = DesignFile(method=args.method, power_budget=power, objective=None, degenerate=False, R=r)
        print(f"wrote {args.out}: method={args.method}, dim={dim}, trace={r.trace():.9g}")
    write_design(args.out, design)
    return 0


def _grid_axes(args):
    for name, lo, hi, step in (
        ("theta", args.theta_min, args.theta_max, args.theta_step),
        ("phi", args.phi_min, args.phi_max, args.phi_step),
    ):
        if step <= 0:
            raise ValueError(f"--{name}-step must be positive")
        if hi <= lo:
            raise ValueError(f"--{name}-max must exceed --{name}-min")
    n_t = round((args.theta_max - args.theta_min) / args.theta_step)
    n_p = round((args.phi_max - args.phi_min) / args.phi_step)
    th = np.linspace(args.theta_min, args.theta_max, n_t + 1) * DEG
    ph = np.linspace(args.phi_min, args.phi_max, n_p + 1) * DEG
    return th, ph


def cmd_pattern(args) -> int:
    geom = read_geometry(args.geometry)
    design = read_design(args.design)
    th, ph = _grid_axes(args)
    grid = evaluate_grid(geom, design.R, th, ph)
    write_pattern_csv(args.out, grid)
    print(f"wrote {args.out}: {th.size} x {ph.size} grid, peak {grid.power.max():.9g} W/sr")
    if args.users:
        users = read_users(args.users)
        metrics = pattern_metrics(grid, users, args.resolve_tol)
        metrics_path = args.metrics or str(Path(args.out).with_suffix("")) + "_metrics.json"
        write_metrics(metrics_path, metrics)
        print(
            f"wrote {metrics_path}: resolved {metrics.resolved_count}/{users.count}, "
            f"fairness {metrics.fairness:.4f}, psl {metrics.psl_db:.2f} dB"
        )
    return 0


def cmd_metrics(args) -> int:
    grid = read_pattern_csv(args.pattern)
    users = read_users(args.users)
    metrics = pattern_metrics(grid, users, args.resolve_tol)
    write_metrics(args.out, metrics)
    print(
        f"wrote {args.out}: resolved {metrics.resolved_count}/{users.count}, "
        f"fairness {metrics.fairness:.4f}, psl {metrics.psl_db:.2f} dB, "
        f"hpbw {metrics.hpbw_deg:.3f} deg"
    )
    return 0


def cmd_scenario(args) -> int:
    name = args.name
    if name not in SCENARIO_NAMES:
        raise ValueError(f"unknown scenario {name!r}; available: {', '.join(SCENARIO_NAMES)}")
    out_dir = args.out_dir or f"bundles/{name}"
    common = dict(
        theta_step_deg=args.theta_step,
        phi_step_deg=args.phi_step,
        resolve_tol_deg=args.resolve_tol,
        render=not args.no_render,
    )
    users = read_users(args.users) if args.users else None
    if name == "fig1":
        info = run_fig1(out_dir, theta_step_deg=args.theta_step, render=not args.no_render)
        print(f"wrote bundle {info['dir']}")
        for kind, p in info["broadside_power"].items():
            print(f"  broadside power {kind}: {p:.6g} W/sr")
        return 0
    if name == "ula50":
        info = run_linear(out_dir, users=users, **common)
    elif name == "all-planar":
        bundles = run_all_planar(out_dir, users=users, **common)
        print(f"wrote bundles under {out_dir}")
        print(summarize(bundles), end="")
        return 0
    else:
        info = run_planar(name, out_dir, users=users, **common)
    print(f"wrote bundle {info['dir']}")
    for method, m in info["metrics"].items():
        print(
            f"  {method}: resolved {m.resolved_count}, fairness {m.fairness:.4f}, "
            f"psl {m.psl_db:.2f} dB, hpbw {m.hpbw_deg:.3f} deg"
        )
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="beamforge",
        description="Covariance-based transmit beampattern design and analysis.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("geometry", help="generate an array geometry JSON file")
    g.add_argument("kind", choices=GEOMETRY_KINDS, help="constellation family")
    g.add_argument("--count", type=int, help="number of elements (all kinds except square)")
    g.add_argument("--side", type=int, help="grid side length (square only)")
    g.add_argument("--spacing", type=float, default=0.5, help="element spacing in wavelengths (default 0.5)")
    g.add_argument("--arc-spacing", type=float, default=0.5, help="spiral arclength step in wavelengths (default 0.5)")
    g.add_argument("--a", type=float, help="spiral radius constant (defaults: 0.15 log, 0.08 n=1, 0.28 n=3)")
    g.add_argument("--b", type=float, default=0.1, help="log-spiral growth rate (default 0.1)")
    g.add_argument("--n", type=int, default=1, help="Archimedes root index (default 1)")
    g.add_argument("--start-angle", type=float, help="marching start angle in degrees (default 0 log, 360 Archimedes)")
    g.add_argument("--out", required=True, help="output geometry JSON path")
    g.set_defaults(func=cmd_geometry)

    d = sub.add_parser("design", help="design or construct a transmit covariance")
    d.add_argument("--method", required=True, choices=("eig", "ideal") + CANONICAL_KINDS)
    d.add_argument("--geometry", help="geometry JSON (required for eig/ideal)")
    d.add_argument("--users", help="user-set JSON (required for eig/ideal)")
    d.add_argument("--dim", type=int, help="matrix dimension (canonical methods without geometry)")
    d.add_argument("--power", type=float, help="power budget, trace of R (default: element count)")
    d.add_argument("--rho", type=float, default=0.8, help="toeplitz correlation (default 0.8)")
    d.add_argument("--out", required=True, help="output design JSON path")
    d.set_defaults(func=cmd_design)

    p = sub.add_parser("pattern", help="evaluate a pattern grid CSV from geometry + design")
    p.add_argument("--geometry", required=True)
    p.add_argument("--design", required=True)
    p.add_argument("--theta-min", type=float, default=-90.0, help="degrees (default -90)")
    p.add_argument("--theta-max", type=float, default=90.0, help="degrees (default 90)")
    p.add_argument("--theta-step", type=float, default=DEFAULT_THETA_STEP_DEG, help="degrees (default 0.25)")
    p.add_argument("--phi-min", type=float, default=0.0, help="degrees (default 0)")
    p.add_argument("--phi-max", type=float, default=360.0, help="degrees (default 360)")
    p.add_argument("--phi-step", type=float, default=DEFAULT_PHI_STEP_DEG, help="degrees (default 0.5)")
    p.add_argument("--users", help="user-set JSON; also writes metrics when given")
    p.add_argument("--metrics", help="metrics JSON path (default: <out>_metrics.json)")
    p.add_argument("--resolve-tol", type=float, default=DEFAULT_RESOLVE_TOL_DEG, help="degrees (default 6)")
    p.add_argument("--out", required=True, help="output pattern CSV path")
    p.set_defaults(func=cmd_pattern)

    m = sub.add_parser("metrics", help="compute pattern metrics from an existing CSV")
    m.add_argument("--pattern", required=True, help="pattern CSV path")
    m.add_argument("--users", required=True, help="user-set JSON")
    m.add_argument("--resolve-tol", type=float, default=DEFAULT_RESOLVE_TOL_DEG, help="degrees (default 6)")
    m.add_argument("--out", required=True, help="output metrics JSON path")
    m.set_defaults(func=cmd_metrics)

    s = sub.add_parser("scenario", help="run a scripted experiment bundle")
    s.add_argument("name", help=f"one of: {', '.join(SCENARIO_NAMES)}")
    s.add_argument("--out-dir", help="bundle directory (default bundles/<name>)")
    s.add_argument("--users", help="override the shipped user set with a user-set JSON")
    s.add_argument("--theta-step", type=float, default=DEFAULT_THETA_STEP_DEG, help="degrees (default 0.25)")
    s.add_argument("--phi-step", type=float, default=DEFAULT_PHI_STEP_DEG, help="degrees (default 0.5)")
    s.add_argument("--resolve-tol", type=float, default=DEFAULT_RESOLVE_TOL_DEG, help="degrees (default 6)")
    s.add_argument("--no-render", action="store_true", help="skip PNG figure rendering")
    s.set_defaults(func=cmd_scenario)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError, ConvergenceError, QuadratureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
