"""Command-line surface: regime reports, cell stage, Darcy stage, profiles.

Subcommands
-----------
``regime ELL GAMMA R``
    Print the regime label, limit-model family and the exact rational
    scaling exponents.
``cell --config CFG``
    Solve the cell stage: permeability tensor (Newtonian kinds) or a flux
    table over the configured driving samples (nonlinear kinds), plus VTK
    dumps of the mesh and a representative cell solution.
``darcy --config CFG``
    Run the cell stage, then the macroscale Darcy solve; write pressure and
    velocity CSV/VTK and a run-summary JSON.
``profile --config CFG --x X Y``
    Through-thickness profile of the cell-averaged velocity at a macro
    point, with the mean-versus-flux consistency residual.

Exit codes: 0 when every stage met its tolerance, 1 on numerical failure,
2 on configuration or usage errors.  Identical configurations produce
byte-identical CSV output.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import writers
from .cellmesh import build_cell_mesh
from .cellsolve import effective_law
from .config import build_force, load_config
from .errors import ConfigError, DomainError, ThinPorousError
from .macro import MacroProblem, build_macro_mesh, flux_map_strategy, solve_linear_darcy, solve_nonlinear_darcy
from .params import LimitModelKind, RegimeLabel, classify_regime, limit_model_kind, scaling_table
from .reconstruct import filtration_profile, macro_driving

_NEWTONIAN_KINDS = (LimitModelKind.NEWTONIAN_ETA0, LimitModelKind.NEWTONIAN_ETA_INF)


def _frac(x):
    return str(Fraction(x))


def cmd_regime(ell, gamma, r, out=None):
    """Print the regime / limit-model / scaling report; returns the lines."""
    out = sys.stdout if out is None else out
    regime = classify_regime(ell)
    kind = limit_model_kind(r, gamma)
    table = scaling_table(r, gamma)
    lines = [
        f"ell: {_frac(ell)}",
        f"regime: {regime.value}",
        f"limit_model: {kind.value}",
        f"normalization_exponent: {table.normalization}",
    ]
    for label, triple in table.rows():
        for name, value in zip(("velocity", "gradient", "sym_gradient"), triple):
            lines.append(f"{label}_{name}: {value}")
    if regime is not RegimeLabel.VTPM:
        lines.append(
            f"note: regime {regime.value} detected; the solvers in this "
            "package target VTPM (0 < ell < 1)"
        )
    for line in lines:
        print(line, file=out)
    return lines


def _prepare(config):
    config.require_vtpm()
    mesh = build_cell_mesh(config.geometry, config.cell_n)
    law = effective_law(
        mesh,
        config.limit_model,
        config.fluid,
        config.quadrature(),
        cell_tol=config.cell_tol,
        max_iter=config.max_iter,
    )
    return mesh, law


def _nonlinear_table_deltas(config):
    spec = config.table_spec
    angles = int(spec.get("angles", 8))
    if config.limit_model is LimitModelKind.POWER_LAW:
        radii = [float(t) for t in spec.get("radii", [0.5, 1.0, 2.0, 10.0])]
    else:
        radii = [float(t) for t in spec.get("magnitudes", [0.0, 1.0, 10.0])]
    thetas = [2.0 * np.pi * k / angles for k in range(angles)]
    deltas = []
    for t in radii:
        if t == 0.0:
            deltas.append((0.0, 0.0))
            continue
        for th in thetas:
            deltas.append((t * np.cos(th), t * np.sin(th)))
    return deltas


def cmd_cell(config, threads=1):
    """Run the cell stage; returns the summary dict."""
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    mesh, law = _prepare(config)
    writers.write_cell_mesh_vtk(out_dir / "cell_mesh.vtk", mesh)
    kind = config.limit_model
    summary = {
        "regime": None if config.regime is None else config.regime.value,
        "limit_model": kind.value,
        "cell_n": config.cell_n,
        "fluid_area": mesh.fluid_area,
    }

    if kind in _NEWTONIAN_KINDS:
        from .cellsolve import permeability_tensor

        tensor, sols = permeability_tensor(
            mesh, tol=config.cell_tol, return_solutions=True
        )
        writers.write_permeability_csv(out_dir / "permeability.csv", tensor, config.cell_n)
        for axis, sol in zip((1, 2), sols):
            writers.write_cell_solution_vtk(out_dir / f"cell_q{axis}.vtk", mesh, sol.q)
        summary["permeability"] = tensor.matrix.tolist()
        summary["cell_residuals"] = [s.residual for s in sols]
        summary["tolerances_met"] = all(s.residual <= config.cell_tol for s in sols)
        writers.write_summary_json(out_dir / "cell_summary.json", summary)
        return summary

    deltas = _nonlinear_table_deltas(config)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(
                pool.map(lambda d: law.evaluate_with_diagnostics(np.array(d)), deltas)
            )
        rows = [
            (d[0], d[1], f[0], f[1], iters, residual)
            for d, (f, iters, residual) in zip(deltas, results)
        ]
    else:
        rows = law.table(deltas)

    extra_header, extra_cols = (), None
    if kind is LimitModelKind.POWER_LAW:
        # in-run homogeneity residual against the unit-radius row of each angle
        rp = config.fluid.r_prime
        unit = {}
        flux_by_delta = {(row[0], row[1]): np.array([row[2], row[3]]) for row in rows}
        for (dx, dy), f in flux_by_delta.items():
            t = float(np.hypot(dx, dy))
            if abs(t - 1.0) < 1e-12:
                unit[(round(dx, 12), round(dy, 12))] = f
        extra_cols = []
        for row in rows:
            t = float(np.hypot(row[0], row[1]))
            res = 0.0
            if t > 0.0:
                key = (round(row[0] / t, 12), round(row[1] / t, 12))
                if key in unit:
                    ref = t ** (rp - 1.0) * unit[key]
                    f = np.array([row[2], row[3]])
                    res = float(
                        np.linalg.norm(f - ref) / max(np.linalg.norm(ref), 1e-300)
                    )
            extra_cols.append([res])
        extra_header = ("homogeneity_residual",)
    writers.write_flux_table_csv(
        out_dir / "flux_table.csv", rows, extra_header, extra_cols
    )
    last = np.array(deltas[-1], dtype=float)
    sol = law.cell_solution(last)
    writers.write_cell_solution_vtk(out_dir / "cell_q_last.vtk", mesh, sol.q)
    summary["table_rows"] = len(rows)
    summary["max_cell_residual"] = max((row[5] for row in rows), default=0.0)
    summary["tolerances_met"] = all(row[5] <= config.cell_tol for row in rows)
    writers.write_summary_json(out_dir / "cell_summary.json", summary)
    return summary


def _solve_macro(config, mesh_cell, law):
    mmesh = build_macro_mesh(config.L1, config.L2, config.n1, config.n2)
    force = build_force(config, mmesh)
    plan = flux_map_strategy(law, mesh_cell.geometry.kind if mesh_cell.geometry.kind != "none" else "square")
    problem = MacroProblem(mesh=mmesh, force=force, law=plan)
    if config.limit_model in _NEWTONIAN_KINDS:
        solution = solve_linear_darcy(problem, tol=min(config.macro_tol, 1e-12))
    else:
        solution = solve_nonlinear_darcy(
            problem, tol=config.macro_tol, max_outer=config.max_iter
        )
    return mmesh, problem, solution


def cmd_darcy(config, threads=1):
    """Run cell then macro stage; returns the summary dict."""
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    mesh, law = _prepare(config)
    mmesh, problem, solution = _solve_macro(config, mesh, law)

    writers.write_pressure_csv(out_dir / "pressure.csv", mmesh, solution.p)
    writers.write_velocity_csv(out_dir / "velocity.csv", mmesh, solution.V)
    writers.write_macro_vtk(out_dir / "darcy.vtk", mmesh, solution.p, solution.V)
    v_max = float(np.abs(solution.V).max()) if solution.V.size else 0.0
    balance_tol = max(1e-8, config.macro_tol) * max(1.0, v_max)
    met = (
        solution.residual <= config.macro_tol
        and solution.div_residual <= balance_tol
        and solution.flux_residual <= balance_tol
    )
    summary = {
        "regime": None if config.regime is None else config.regime.value,
        "limit_model": config.limit_model.value,
        "cell_n": config.cell_n,
        "macro_mesh": [config.n1, config.n2],
        "macro": {
            "iterations": solution.iterations,
            "residual": solution.residual,
            "div_residual": solution.div_residual,
            "boundary_flux_residual": solution.flux_residual,
            "v_max": v_max,
        },
        "tolerances_met": bool(met),
    }
    writers.write_summary_json(out_dir / "darcy_summary.json", summary)
    return summary


def cmd_profile(config, x_point, threads=1):
    """Column profile of the cell-averaged velocity at macro point ``x``."""
    out_dir = Path(config.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    mesh, law = _prepare(config)
    mmesh, problem, solution = _solve_macro(config, mesh, law)

    x = np.asarray(x_point, dtype=float)
    delta = macro_driving(solution, x)  # raises DomainError outside the rectangle
    z3 = np.linspace(0.0, 1.0, 65)
    values = filtration_profile(mesh, law, delta, z3, config.quadrature())
    writers.write_profile_csv(out_dir / "profile.csv", z3, values)

    # thickness mean versus the law flux, integrated with panels that put an
    # edge at the midplane (the power-law profile has an algebraic cusp there)
    xg, wg = np.polynomial.legendre.leggauss(8)
    edges = np.linspace(0.0, 1.0, 33)
    mid, half = 0.5 * (edges[1:] + edges[:-1]), 0.5 * np.diff(edges)
    nodes = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
    weights = (half[:, None] * wg[None, :]).ravel()
    mean = weights @ filtration_profile(mesh, law, delta, nodes, config.quadrature())
    flux = law.evaluate(delta)
    residual = float(np.abs(mean - flux).max())
    summary = {
        "point": [float(x[0]), float(x[1])],
        "delta": delta.tolist(),
        "flux": flux.tolist(),
        "profile_mean": mean.tolist(),
        "mean_flux_residual": residual,
        "tolerances_met": bool(residual <= 1e-8 * max(1.0, float(np.abs(flux).max()))),
    }
    writers.write_summary_json(out_dir / "profile_summary.json", summary)
    return summary


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="thinporous",
        description="Effective Darcy flow of Carreau fluids through very thin porous media.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_regime = sub.add_parser("regime", help="classify (ell, gamma, r) and print scalings")
    p_regime.add_argument("ell")
    p_regime.add_argument("gamma")
    p_regime.add_argument("r")

    for name in ("cell", "darcy", "profile"):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, metavar="PATH")
        p.add_argument("--out", metavar="DIR", help="override output.dir")
        p.add_argument("--n-cell", type=int, metavar="INT", help="override cell.n")
        p.add_argument("--tol", type=float, metavar="FLOAT", help="override the stage tolerance")
        p.add_argument("--threads", type=int, default=1, metavar="INT")
        if name == "profile":
            p.add_argument("--x", nargs=2, type=float, required=True, metavar=("X", "Y"))
    return parser


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "regime":
            cmd_regime(args.ell, args.gamma, args.r)
            return 0
        config = load_config(args.config)
        if args.out:
            config.output_dir = Path(args.out)
        if args.n_cell:
            if args.n_cell < 4 or args.n_cell % 2:
                raise ConfigError("--n-cell", "must be even and >= 4")
            config.cell_n = args.n_cell
        if args.tol:
            if args.command == "cell":
                config.cell_tol = args.tol
            else:
                config.macro_tol = args.tol
        if args.command == "cell":
            summary = cmd_cell(config, threads=args.threads)
        elif args.command == "darcy":
            summary = cmd_darcy(config, threads=args.threads)
        else:
            summary = cmd_profile(config, args.x, threads=args.threads)
        return 0 if summary.get("tolerances_met", True) else 1
    except (ConfigError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ThinPorousError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
