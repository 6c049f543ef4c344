"""Byte-stable CSV and legacy-VTK ASCII writers.

Layouts are frozen and documented in FORMAT.md at the repository root.  All
floating-point values are printed with 17 significant digits so that output
round-trips exactly and golden-file comparisons are meaningful; CSV follows
RFC 4180 (CRLF line endings, header row).
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

__all__ = [
    "fmt17",
    "write_csv",
    "write_flux_table_csv",
    "write_permeability_csv",
    "write_pressure_csv",
    "write_velocity_csv",
    "write_profile_csv",
    "write_cell_mesh_vtk",
    "write_cell_solution_vtk",
    "write_macro_vtk",
    "write_structured_points_vtk",
    "write_summary_json",
]


def fmt17(x):
    """Format a float with 17 significant digits (exact round trip)."""
    return format(float(x), ".17g")


def write_csv(path, header, rows):
    """RFC-4180 CSV with a header row; floats rendered via :func:`fmt17`."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\r\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(
                [fmt17(v) if isinstance(v, (float, np.floating)) else v for v in row]
            )
    return path


def write_flux_table_csv(path, rows, extra_header=(), extra_columns=None):
    """Flux-map tabulation: delta_x, delta_y, flux_x, flux_y, iterations, residual.

    ``extra_columns`` (same row count) appends the optional in-run check
    columns, e.g. the power-law homogeneity residual.
    """
    header = ["delta_x", "delta_y", "flux_x", "flux_y", "iterations", "residual"]
    header += list(extra_header)
    out = []
    for k, row in enumerate(rows):
        line = [row[0], row[1], row[2], row[3], int(row[4]), row[5]]
        if extra_columns is not None:
            line += list(extra_columns[k])
        out.append(line)
    return write_csv(path, header, out)


def write_permeability_csv(path, tensor, n):
    a = tensor.matrix
    return write_csv(
        path,
        ["a11", "a12", "a21", "a22", "fluid_area", "n"],
        [[a[0, 0], a[0, 1], a[1, 0], a[1, 1], tensor.fluid_area, n]],
    )


def write_pressure_csv(path, mesh, p):
    rows = [[x, y, pv] for (x, y), pv in zip(mesh.nodes, p)]
    return write_csv(path, ["x", "y", "p"], rows)


def write_velocity_csv(path, mesh, V):
    centroids = mesh.nodes[mesh.triangles].mean(axis=1)
    rows = [[c[0], c[1], v[0], v[1]] for c, v in zip(centroids, V)]
    return write_csv(path, ["x", "y", "Vx", "Vy"], rows)


def write_profile_csv(path, z3, values):
    rows = [[z, w[0], w[1]] for z, w in zip(z3, values)]
    return write_csv(path, ["z3", "wx", "wy"], rows)


def _vtk_header(fh, title, dataset):
    fh.write("# vtk DataFile Version 3.0\n")
    fh.write(f"{title}\n")
    fh.write("ASCII\n")
    fh.write(f"DATASET {dataset}\n")


def write_cell_mesh_vtk(path, mesh, title="perforated unit cell"):
    """POLYDATA triangles with the fluid mask as cell data."""
    path = Path(path)
    with path.open("w") as fh:
        _vtk_header(fh, title, "POLYDATA")
        fh.write(f"POINTS {len(mesh.vertices)} double\n")
        for x, y in mesh.vertices:
            fh.write(f"{fmt17(x)} {fmt17(y)} 0\n")
        nt = len(mesh.triangles)
        fh.write(f"POLYGONS {nt} {4 * nt}\n")
        for tri in mesh.triangles:
            fh.write(f"3 {tri[0]} {tri[1]} {tri[2]}\n")
        fh.write(f"CELL_DATA {nt}\n")
        fh.write("SCALARS fluid int 1\nLOOKUP_TABLE default\n")
        for flag in mesh.fluid:
            fh.write(f"{int(flag)}\n")
    return path


def write_cell_solution_vtk(path, mesh, q, title="cell corrector pressure"):
    """POLYDATA with the DOF field as point data (zero off the fluid DOFs)."""
    path = Path(path)
    nodal = np.zeros(len(mesh.vertices))
    carried = mesh.dof >= 0
    nodal[carried] = q[mesh.dof[carried]]
    with path.open("w") as fh:
        _vtk_header(fh, title, "POLYDATA")
        fh.write(f"POINTS {len(mesh.vertices)} double\n")
        for x, y in mesh.vertices:
            fh.write(f"{fmt17(x)} {fmt17(y)} 0\n")
        nt = len(mesh.triangles)
        fh.write(f"POLYGONS {nt} {4 * nt}\n")
        for tri in mesh.triangles:
            fh.write(f"3 {tri[0]} {tri[1]} {tri[2]}\n")
        fh.write(f"POINT_DATA {len(mesh.vertices)}\n")
        fh.write("SCALARS q double 1\nLOOKUP_TABLE default\n")
        for v in nodal:
            fh.write(f"{fmt17(v)}\n")
        fh.write(f"CELL_DATA {nt}\n")
        fh.write("SCALARS fluid int 1\nLOOKUP_TABLE default\n")
        for flag in mesh.fluid:
            fh.write(f"{int(flag)}\n")
    return path


def write_macro_vtk(path, mesh, p, V, title="macroscale Darcy solution"):
    """UNSTRUCTURED_GRID with nodal pressure and element velocity."""
    path = Path(path)
    with path.open("w") as fh:
        _vtk_header(fh, title, "UNSTRUCTURED_GRID")
        fh.write(f"POINTS {mesh.nn} double\n")
        for x, y in mesh.nodes:
            fh.write(f"{fmt17(x)} {fmt17(y)} 0\n")
        fh.write(f"CELLS {mesh.nt} {4 * mesh.nt}\n")
        for tri in mesh.triangles:
            fh.write(f"3 {tri[0]} {tri[1]} {tri[2]}\n")
        fh.write(f"CELL_TYPES {mesh.nt}\n")
        fh.write("5\n" * mesh.nt)
        fh.write(f"POINT_DATA {mesh.nn}\n")
        fh.write("SCALARS p double 1\nLOOKUP_TABLE default\n")
        for v in p:
            fh.write(f"{fmt17(v)}\n")
        fh.write(f"CELL_DATA {mesh.nt}\n")
        fh.write("VECTORS V double\n")
        for v in V:
            fh.write(f"{fmt17(v[0])} {fmt17(v[1])} 0\n")
    return path


def write_structured_points_vtk(path, origin, spacing, dims, vectors, title="reconstructed velocity"):
    """STRUCTURED_POINTS lattice with a 3-vector point field.

    ``vectors`` has shape (nx*ny*nz, 3) in VTK point order (x fastest).
    """
    path = Path(path)
    nx, ny, nz = dims
    with path.open("w") as fh:
        _vtk_header(fh, title, "STRUCTURED_POINTS")
        fh.write(f"DIMENSIONS {nx} {ny} {nz}\n")
        fh.write(f"ORIGIN {fmt17(origin[0])} {fmt17(origin[1])} {fmt17(origin[2])}\n")
        fh.write(f"SPACING {fmt17(spacing[0])} {fmt17(spacing[1])} {fmt17(spacing[2])}\n")
        fh.write(f"POINT_DATA {nx * ny * nz}\n")
        fh.write("VECTORS u double\n")
        for v in vectors:
            fh.write(f"{fmt17(v[0])} {fmt17(v[1])} {fmt17(v[2])}\n")
    return path


def write_summary_json(path, summary):
    """Deterministic run summary (sorted keys, 17-digit floats)."""

    def convert(obj):
        if isinstance(obj, dict):
            return {k: convert(v) for k, v in obj.items()}
        if isinstance(obj, (list, tuple)):
            return [convert(v) for v in obj]
        if isinstance(obj, (np.floating, float)):
            return float(fmt17(obj))
        if isinstance(obj, (np.integer,)):
            return int(obj)
        if isinstance(obj, np.ndarray):
            return [convert(v) for v in obj.tolist()]
        return obj

    path = Path(path)
    path.write_text(json.dumps(convert(summary), indent=2, sort_keys=True) + "\n")
    return path
