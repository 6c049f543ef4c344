"""Periodic triangulation of the perforated unit cell.

The unit cell is the square (-1/2, 1/2)^2 with an optional obstacle (disk or
square) strictly inside it; the flow lives on the fluid complement.  The mesh
is a uniform n-by-n grid of squares, each split into two triangles with the
diagonal alternating in a union-jack pattern so that, for even n, the
triangulation is invariant under the reflections and quarter turns that fix
the obstacle.  Opposite edges are identified: vertices that differ by a full
period share one degree of freedom.  A triangle is solid when its centroid
falls inside the obstacle; solid triangles are simply excluded from any
assembly, which imposes the no-flux obstacle condition weakly.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .errors import GeometryError, ParameterError

__all__ = [
    "CellGeometry",
    "PeriodicMesh",
    "obstacle_indicator",
    "build_cell_mesh",
]


@dataclass(frozen=True)
class CellGeometry:
    """Obstacle shape in unit-cell coordinates.

    ``kind`` is one of ``"none"``, ``"disk"``, ``"square"``; ``size`` is the
    disk radius or the square half-width, and must stay strictly below 1/2 so
    that the obstacle closure is strictly inside the cell.
    """

    kind: str
    size: float = 0.0

    def __post_init__(self):
        if self.kind not in ("none", "disk", "square"):
            raise GeometryError(f"unknown obstacle kind {self.kind!r}")
        if self.kind != "none" and not 0.0 < self.size < 0.5:
            raise GeometryError(
                f"obstacle size must lie in (0, 1/2), got {self.size} for {self.kind}"
            )

    @classmethod
    def none(cls):
        return cls("none")

    @classmethod
    def disk(cls, radius):
        return cls("disk", float(radius))

    @classmethod
    def square(cls, half_width):
        return cls("square", float(half_width))


def obstacle_mask(geom: CellGeometry, pts):
    """Boolean array: which of the points (m, 2) lie inside the open obstacle."""
    pts = np.asarray(pts, dtype=float)
    if geom.kind == "none":
        return np.zeros(pts.shape[:-1], dtype=bool)
    if geom.kind == "disk":
        return pts[..., 0] ** 2 + pts[..., 1] ** 2 < geom.size**2
    return np.maximum(np.abs(pts[..., 0]), np.abs(pts[..., 1])) < geom.size


def obstacle_indicator(geom: CellGeometry, z):
    """True iff the point ``z`` lies inside the open obstacle."""
    return bool(obstacle_mask(geom, np.asarray(z, dtype=float)))


@dataclass(eq=False)
class PeriodicMesh:
    """Immutable triangulation of the unit cell with periodic DOF identification.

    Attributes
    ----------
    n : int
        Grid subdivisions per side.
    vertices : (nv, 2) float array
        Grid vertex coordinates including the duplicated right/top seam.
    triangles : (nt, 3) int array
        Vertex indices, counterclockwise.
    dof : (nv,) int array
        Periodic degree of freedom of each vertex, or -1 for vertices that
        touch no fluid triangle.
    ndof : int
        Number of distinct periodic representatives carrying fluid DOFs.
    fluid : (nt,) bool array
        Per-triangle fluid mask.
    h : float
        Mesh size (triangle diameter, sqrt(2)/n).
    fluid_area : float
        Total area of the fluid triangles.
    geometry : CellGeometry
        The obstacle this mesh was built for.
    """

    n: int
    vertices: np.ndarray
    triangles: np.ndarray
    dof: np.ndarray
    ndof: int
    fluid: np.ndarray
    h: float
    fluid_area: float
    geometry: CellGeometry = field(default_factory=CellGeometry.none)

    @property
    def fluid_triangles(self):
        """Vertex indices of the fluid triangles, shape (m, 3)."""
        return self.triangles[self.fluid]

    def lumped_mass(self):
        """Lumped (row-sum) mass per DOF from the fluid triangles."""
        tri = self.fluid_triangles
        area = _triangle_areas(self.vertices, tri)
        m = np.zeros(self.ndof)
        np.add.at(m, self.dof[tri].ravel(), np.repeat(area / 3.0, 3))
        return m


def _triangle_areas(vertices, triangles):
    p = vertices[triangles]
    e1 = p[:, 1] - p[:, 0]
    e2 = p[:, 2] - p[:, 0]
    return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])


def build_cell_mesh(geom: CellGeometry, n: int) -> PeriodicMesh:
    """Build the periodic cell mesh on an n-by-n grid (n >= 4, even).

    Raises :class:`GeometryError` when the obstacle disconnects the fluid
    degrees of freedom across periodic copies (the standing assumption of a
    connected fluid part fails at this resolution).
    """
    if n < 4 or n % 2 != 0:
        raise ParameterError(f"subdivision count must be even and >= 4, got {n}")

    coords = -0.5 + np.arange(n + 1) / n
    ix, iy = np.meshgrid(np.arange(n + 1), np.arange(n + 1), indexing="ij")
    vertices = np.column_stack([coords[ix.ravel()], coords[iy.ravel()]])

    def vid(i, j):
        return i * (n + 1) + j

    cx, cy = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    cx, cy = cx.ravel(), cy.ravel()
    v00, v10 = vid(cx, cy), vid(cx + 1, cy)
    v01, v11 = vid(cx, cy + 1), vid(cx + 1, cy + 1)

    main = (cx + cy) % 2 == 0  # union-jack: alternate the split diagonal
    tris = np.empty((2 * n * n, 3), dtype=np.int64)
    tris[0::2] = np.where(
        main[:, None], np.column_stack([v00, v10, v11]), np.column_stack([v00, v10, v01])
    )
    tris[1::2] = np.where(
        main[:, None], np.column_stack([v00, v11, v01]), np.column_stack([v10, v11, v01])
    )

    centroids = vertices[tris].mean(axis=1)
    fluid = ~obstacle_mask(geom, centroids)
    if not np.any(fluid):
        raise GeometryError("obstacle leaves no fluid triangles")

    # Periodic representative of each vertex; only representatives touched by
    # a fluid triangle become degrees of freedom.
    rep = (ix.ravel() % n) * n + (iy.ravel() % n)
    touched = np.unique(rep[tris[fluid].ravel()])
    rep_to_dof = np.full(n * n, -1, dtype=np.int64)
    rep_to_dof[touched] = np.arange(touched.size)
    dof = rep_to_dof[rep]

    ndof = touched.size
    tri_dofs = dof[tris[fluid]]
    edges = np.concatenate([tri_dofs[:, [0, 1]], tri_dofs[:, [1, 2]], tri_dofs[:, [2, 0]]])
    graph = sp.coo_matrix(
        (np.ones(len(edges)), (edges[:, 0], edges[:, 1])), shape=(ndof, ndof)
    )
    ncomp, _ = connected_components(graph, directed=False)
    if ncomp != 1:
        raise GeometryError(
            f"fluid region disconnects into {ncomp} components at n={n}; "
            "refine the mesh or shrink the obstacle"
        )

    areas = _triangle_areas(vertices, tris)
    if np.any(areas <= 0.0):
        raise GeometryError("degenerate triangle produced")  # pragma: no cover

    return PeriodicMesh(
        n=n,
        vertices=vertices,
        triangles=tris,
        dof=dof,
        ndof=ndof,
        fluid=fluid,
        h=np.sqrt(2.0) / n,
        fluid_area=float(areas[fluid].sum()),
        geometry=geom,
    )
