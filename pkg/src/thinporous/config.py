"""JSON run configuration: loading, eager validation, force construction.

A run configuration bundles the fluid parameters, the cell geometry and
resolution, the macroscale domain with its body force, optional regime
exponents, solver tolerances and the output directory.  Every invariant is
checked when the file is loaded, and violations name the offending field
path, so a bad configuration never reaches a solver.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import macro as macro_mod
from .cellmesh import CellGeometry
from .constitutive import MobilityQuadrature
from .errors import ConfigError, GeometryError, ParameterError
from .params import FluidParams, RegimeLabel, classify_regime, limit_model_kind

__all__ = ["RunConfig", "load_config", "build_force"]

_SENTINEL = object()


@dataclass(eq=False)
class RunConfig:
    """Validated run configuration."""

    fluid: FluidParams
    geometry: CellGeometry
    cell_n: int
    L1: float
    L2: float
    n1: int
    n2: int
    force_spec: dict
    ell: object  # Fraction-compatible; None when no regime block is given
    cell_tol: float
    macro_tol: float
    max_iter: int
    mobility_tol: float
    output_dir: Path
    table_spec: dict = field(default_factory=dict)

    @property
    def regime(self):
        return None if self.ell is None else classify_regime(self.ell)

    @property
    def limit_model(self):
        return limit_model_kind(self.fluid.r, self.fluid.gamma)

    def quadrature(self):
        return MobilityQuadrature(rel_tol=self.mobility_tol)

    def require_vtpm(self):
        """Solvers in this package target the very-thin regime only."""
        regime = self.regime
        if regime is not None and regime is not RegimeLabel.VTPM:
            raise ConfigError(
                "regime.ell",
                f"spacing exponent {self.ell} gives regime {regime.value}; "
                "the cell and Darcy solvers apply to VTPM (0 < ell < 1) only",
            )


def _get(doc, path, expected=None, default=_SENTINEL):
    node = doc
    for part in path.split("."):
        if not isinstance(node, dict) or part not in node:
            if default is not _SENTINEL:
                return default
            raise ConfigError(path, "missing required field")
        node = node[part]
    if expected is not None and not isinstance(node, expected):
        names = (
            expected.__name__
            if isinstance(expected, type)
            else "/".join(t.__name__ for t in expected)
        )
        raise ConfigError(path, f"expected {names}, got {type(node).__name__}")
    return node


def _number(doc, path, default=_SENTINEL):
    val = _get(doc, path, (int, float), default)
    if isinstance(val, bool):
        raise ConfigError(path, "expected a number, got a boolean")
    return val


def load_config(path) -> RunConfig:
    """Load and fully validate a JSON run configuration."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(str(path), f"cannot read configuration: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(str(path), f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(str(path), "top-level JSON value must be an object")

    try:
        fluid = FluidParams(
            eta0=float(_number(doc, "fluid.eta0")),
            eta_inf=float(_number(doc, "fluid.eta_inf")),
            lam=float(_number(doc, "fluid.lambda")),
            r=float(_number(doc, "fluid.r")),
            gamma=float(_number(doc, "fluid.gamma", default=1.0)),
        )
    except ParameterError as exc:
        raise ConfigError("fluid.r" if "r >" in str(exc) else "fluid", str(exc)) from exc

    shape = _get(doc, "cell.geometry.shape", str, default="none").lower()
    try:
        if shape == "none":
            geometry = CellGeometry.none()
        elif shape == "disk":
            geometry = CellGeometry.disk(_number(doc, "cell.geometry.radius"))
        elif shape == "square":
            geometry = CellGeometry.square(_number(doc, "cell.geometry.half_width"))
        else:
            raise ConfigError("cell.geometry.shape", f"unknown shape {shape!r}")
    except GeometryError as exc:
        raise ConfigError("cell.geometry", str(exc)) from exc

    cell_n = _get(doc, "cell.n", int, default=32)
    if cell_n < 4 or cell_n % 2:
        raise ConfigError("cell.n", f"must be even and >= 4, got {cell_n}")

    L1 = float(_number(doc, "macro.L1", default=1.0))
    L2 = float(_number(doc, "macro.L2", default=1.0))
    if L1 <= 0 or L2 <= 0:
        raise ConfigError("macro.L1", "domain lengths must be positive")
    n1 = _get(doc, "macro.n1", int, default=16)
    n2 = _get(doc, "macro.n2", int, default=16)
    if n1 < 2 or n2 < 2:
        raise ConfigError("macro.n1", "mesh subdivisions must be >= 2")

    force_spec = _get(doc, "macro.force", dict, default={"kind": "constant", "value": [1.0, 0.0]})
    kind = force_spec.get("kind")
    if kind not in ("constant", "gradient_quadratic", "rotational", "csv"):
        raise ConfigError("macro.force.kind", f"unknown force kind {kind!r}")
    if kind == "constant":
        value = force_spec.get("value")
        if (
            not isinstance(value, (list, tuple))
            or len(value) != 2
            or not all(isinstance(v, (int, float)) for v in value)
        ):
            raise ConfigError("macro.force.value", "expected a 2-vector of numbers")
    if kind == "gradient_quadratic":
        coeffs = force_spec.get("coeffs")
        if not isinstance(coeffs, (list, tuple)) or len(coeffs) != 5:
            raise ConfigError(
                "macro.force.coeffs", "expected 5 coefficients (a11, a22, a12, b1, b2)"
            )
    if kind == "csv" and not isinstance(force_spec.get("path"), str):
        raise ConfigError("macro.force.path", "expected a file path")

    ell = _get(doc, "regime.ell", (int, float, str), default=None)
    if ell is not None:
        try:
            classify_regime(ell)
        except ParameterError as exc:
            raise ConfigError("regime.ell", str(exc)) from exc

    cell_tol = float(_number(doc, "solver.cell_tol", default=1e-10))
    macro_tol = float(_number(doc, "solver.macro_tol", default=1e-8))
    max_iter = _get(doc, "solver.max_iter", int, default=200)
    mobility_tol = float(_number(doc, "solver.mobility_tol", default=1e-10))
    for name, val in (
        ("solver.cell_tol", cell_tol),
        ("solver.macro_tol", macro_tol),
        ("solver.mobility_tol", mobility_tol),
    ):
        if not val > 0.0:
            raise ConfigError(name, "tolerance must be positive")
    if max_iter < 1:
        raise ConfigError("solver.max_iter", "must be >= 1")

    output_dir = Path(_get(doc, "output.dir", str, default="out"))
    table_spec = _get(doc, "cell.table", dict, default={})
    angles = table_spec.get("angles", 8)
    if not isinstance(angles, int) or angles < 1:
        raise ConfigError("cell.table.angles", f"expected a positive integer, got {angles!r}")
    for field_name in ("radii", "magnitudes"):
        if field_name in table_spec:
            values = table_spec[field_name]
            if not isinstance(values, (list, tuple)) or not all(
                isinstance(v, (int, float)) and v >= 0 for v in values
            ):
                raise ConfigError(
                    f"cell.table.{field_name}", "expected a list of nonnegative numbers"
                )

    return RunConfig(
        fluid=fluid,
        geometry=geometry,
        cell_n=cell_n,
        L1=L1,
        L2=L2,
        n1=n1,
        n2=n2,
        force_spec=dict(force_spec),
        ell=ell,
        cell_tol=cell_tol,
        macro_tol=macro_tol,
        max_iter=max_iter,
        mobility_tol=mobility_tol,
        output_dir=output_dir,
        table_spec=dict(table_spec),
    )


def build_force(config: RunConfig, mesh):
    """Per-element force samples for the configured force spec."""
    spec = config.force_spec
    kind = spec["kind"]
    if kind == "constant":
        return macro_mod.force_constant(mesh, spec["value"])
    if kind == "gradient_quadratic":
        return macro_mod.force_quadratic_gradient(mesh, spec["coeffs"])
    if kind == "rotational":
        return macro_mod.force_rotational(mesh, spec.get("center"))
    # per-node CSV samples: columns x, y, fx, fy matching the mesh nodes
    csv_path = Path(spec["path"])
    try:
        with csv_path.open(newline="") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise ConfigError("macro.force.path", f"cannot read {csv_path}: {exc}") from exc
    if len(rows) != mesh.nn:
        raise ConfigError(
            "macro.force.path",
            f"expected {mesh.nn} node rows, found {len(rows)}",
        )
    nodal = np.empty((mesh.nn, 2))
    for k, row in enumerate(rows):
        try:
            x, y = float(row["x"]), float(row["y"])
            nodal[k] = (float(row["fx"]), float(row["fy"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(
                "macro.force.path", f"row {k}: need numeric columns x, y, fx, fy"
            ) from exc
        if abs(x - mesh.nodes[k, 0]) > 1e-9 or abs(y - mesh.nodes[k, 1]) > 1e-9:
            raise ConfigError(
                "macro.force.path",
                f"row {k} coordinates {(x, y)} do not match mesh node "
                f"{tuple(mesh.nodes[k])}",
            )
    return macro_mod.force_from_nodes(mesh, nodal)
