"""Explicit through-thickness velocity profiles and 3D reconstruction.

The limit velocity separates into a cell-dependent horizontal driving and an
explicit profile across the film thickness z3 in [0, 1].  The profiles here
are parameterized by the pressure-gradient-like driving ``g`` (the cell
driving plus the corrector gradient), so their thickness means come out as

    Newtonian:  -g / (6 eta)
    Carreau:    -M(|g|) g
    power law:  -c_r |g|^(r'-2) g,

matching the closed-form flux laws.  All profiles vanish identically at
z3 = 0 and z3 = 1 and are symmetric about the midplane.  Reconstruction at a
physical point evaluates the macro driving ``delta = f - grad p`` there,
pulls the cached cell corrector, and feeds ``-(delta + grad q)`` to the
profile; the sign flip orients the reconstructed velocity so its cell-and-
thickness average is the (positive-convention) filtration flux.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import constitutive
from .cellmesh import PeriodicMesh
from .cellsolve import _p1_data, solution_gradients
from .constitutive import MobilityQuadrature, _panel_rule
from .errors import DomainError, NumericalError, ParameterError
from .macro import MacroSolution, element_gradients
from .params import FluidParams, LimitModelKind

__all__ = [
    "Profile",
    "newtonian_profile",
    "carreau_profile",
    "powerlaw_profile",
    "newtonian_mean_flux",
    "carreau_mean_flux",
    "powerlaw_mean_flux",
    "sample_profile",
    "filtration_profile",
    "macro_driving",
    "reconstruct_velocity",
]

_NEWTONIAN_KINDS = (LimitModelKind.NEWTONIAN_ETA0, LimitModelKind.NEWTONIAN_ETA_INF)


@dataclass(eq=False)
class Profile:
    """Sampled through-thickness profile w(z3) for a fixed driving vector."""

    g: np.ndarray  # driving vector (2,)
    z3: np.ndarray  # (m,)
    values: np.ndarray  # (m, 2)
    kind: str
    stress: np.ndarray | None = None  # (m, 2), oracle diagnostics
    mean: np.ndarray | None = None  # (2,), thickness average when known

    def sup_distance(self, other_values):
        return float(np.abs(self.values - other_values).max())


def _check_z3(z3):
    z3 = np.asarray(z3, dtype=float)
    if np.any(z3 < 0.0) or np.any(z3 > 1.0):
        raise ParameterError("z3 must lie in [0, 1]")
    return z3


def newtonian_profile(g, eta, z3):
    """Poiseuille profile (1/eta) (z3^2 - z3) g; thickness mean -g/(6 eta)."""
    z3 = _check_z3(z3)
    g = np.asarray(g, dtype=float)
    shape = (z3 * z3 - z3) / eta
    return np.multiply.outer(shape, g) if np.ndim(z3) else shape * g


def _carreau_thickness_integral(gnorms, z3, params, quad):
    """I(g, z) = int_{1/2 - zf}^{1/2} xi / psi(2 g xi) dxi, batched.

    ``zf`` is z3 folded about the midplane, which makes the no-slip
    endpoints exact zeros and the midplane symmetry exact.  Returns an array
    of shape (len(gnorms), len(z3)).
    """
    gnorms = np.atleast_1d(np.asarray(gnorms, dtype=float))
    z3 = np.atleast_1d(np.asarray(z3, dtype=float))
    zf = np.minimum(z3, 1.0 - z3)
    lo = 0.5 - zf
    prev = None
    vals = np.zeros((len(gnorms), len(z3)))
    for level in range(quad.max_levels + 1):
        xs, ws = _panel_rule(quad.nodes_per_panel, 2**level, 0.0, 1.0)
        xi = lo[:, None] + zf[:, None] * xs[None, :]  # (nz, k)
        tau = 2.0 * gnorms[:, None, None] * xi[None, :, :]
        integ = xi[None, :, :] / constitutive.psi(tau, params)
        vals = zf[None, :] * (integ @ ws)
        if prev is not None and np.all(
            np.abs(vals - prev) <= quad.rel_tol * np.maximum(np.abs(vals), 1e-300)
        ):
            return vals
        prev = vals
    raise NumericalError(
        "thickness-profile quadrature did not converge", last_value=vals
    )


def carreau_profile(g, params: FluidParams, z3, quad: MobilityQuadrature | None = None):
    """Carreau profile -2 (int_{1/2 - z3}^{1/2} xi / psi(2 |g| |xi|) dxi) g.

    Thickness mean -mobility(|g|) g; near-Newtonian parameters reduce it to
    :func:`newtonian_profile` at eta0.
    """
    quad = quad or MobilityQuadrature()
    z3 = _check_z3(z3)
    g = np.asarray(g, dtype=float)
    gnorm = float(np.hypot(g[0], g[1]))
    z_flat = np.atleast_1d(z3).ravel()
    I = _carreau_thickness_integral(np.array([gnorm]), z_flat, params, quad)[0]
    w = -2.0 * np.multiply.outer(I, g)
    if np.ndim(z3) == 0:
        return w[0]
    return w.reshape(z3.shape + (2,))


def _powerlaw_shape(z3, r_prime):
    """Nonnegative thickness shape (1/2)^r' - |1/2 - z3|^r' (exact zero endpoints).

    The endpoints are masked to exactly zero: scalar and array power
    evaluations may disagree by one ulp, and the no-slip condition is
    analytic, not merely numerically small.
    """
    dist = np.abs(0.5 - z3)
    shape = 0.5**r_prime - dist**r_prime
    return np.where(dist >= 0.5, 0.0, shape)


def powerlaw_profile(g, params: FluidParams, z3):
    """Dilatant power-law profile -kappa ((1/2)^r' - |1/2 - z3|^r') |g|^(r'-2) g.

    ``kappa`` is tied to the flux prefactor c_r by
    kappa = c_r (r' + 1) 2^r' / r', so the thickness mean is exactly
    -c_r |g|^(r'-2) g and the profile-oracle agreement certifies both.
    """
    if not params.r > 2.0:
        raise ParameterError(f"power-law profile requires r > 2, got r={params.r}")
    z3 = _check_z3(z3)
    g = np.asarray(g, dtype=float)
    rp = params.r_prime
    c_r = constitutive.powerlaw_prefactor(params)
    kappa = c_r * (rp + 1.0) * 2.0**rp / rp
    gnorm = float(np.hypot(g[0], g[1]))
    amp = gnorm ** (rp - 2.0) * g if gnorm > 0.0 else np.zeros(2)
    shape = -kappa * _powerlaw_shape(z3, rp)
    return np.multiply.outer(shape, amp) if np.ndim(z3) else shape * amp


def newtonian_mean_flux(g, eta):
    """Closed-form thickness mean of the Newtonian profile."""
    return -np.asarray(g, dtype=float) / (6.0 * eta)


def carreau_mean_flux(g, params, quad=None):
    """Closed-form thickness mean -M(|g|) g of the Carreau profile."""
    g = np.asarray(g, dtype=float)
    return -constitutive.mobility(float(np.hypot(g[0], g[1])), params, quad) * g


def powerlaw_mean_flux(g, params):
    """Closed-form thickness mean -c_r |g|^(r'-2) g of the power-law profile."""
    g = np.asarray(g, dtype=float)
    gnorm = float(np.hypot(g[0], g[1]))
    if gnorm == 0.0:
        return np.zeros(2)
    c_r = constitutive.powerlaw_prefactor(params)
    return -c_r * gnorm ** (params.r_prime - 2.0) * g


def _profile_for_kind(kind, g, z3, *, params=None, eta=None, quad=None):
    if kind in _NEWTONIAN_KINDS:
        return newtonian_profile(g, eta, z3)
    if kind is LimitModelKind.CARREAU:
        return carreau_profile(g, params, z3, quad)
    return powerlaw_profile(g, params, z3)


def sample_profile(kind, g, *, params=None, eta=None, quad=None, n=65):
    """Profile sampled on a uniform z3 grid, with its closed-form mean attached."""
    z3 = np.linspace(0.0, 1.0, n)
    values = _profile_for_kind(kind, g, z3, params=params, eta=eta, quad=quad)
    if kind in _NEWTONIAN_KINDS:
        mean = newtonian_mean_flux(g, eta)
    elif kind is LimitModelKind.CARREAU:
        mean = carreau_mean_flux(g, params, quad)
    else:
        mean = powerlaw_mean_flux(g, params)
    return Profile(
        g=np.asarray(g, dtype=float), z3=z3, values=values, kind=kind.value, mean=mean
    )


def filtration_profile(mesh: PeriodicMesh, law, delta, z3, quad=None):
    """Cell-averaged horizontal velocity profile at the macro driving ``delta``.

    Samples z3 -> int_{cell fluid part} u'(z', z3) dz' as an (m, 2) array;
    the thickness mean of this curve equals the law flux at ``delta``.
    """
    delta = np.asarray(delta, dtype=float)
    z3 = _check_z3(np.atleast_1d(np.asarray(z3, dtype=float)))
    sol = law.cell_solution(delta)
    _, area, _ = _p1_data(mesh)
    g = delta[None, :] + solution_gradients(mesh, sol.q)  # (nt, 2), cell orientation

    kind = law.kind
    if kind in _NEWTONIAN_KINDS:
        total = (area[:, None] * g).sum(axis=0)
        return np.multiply.outer((z3 - z3 * z3) / law.eta, total)
    if kind is LimitModelKind.CARREAU:
        q = quad or law.quad or MobilityQuadrature()
        gnorms = np.linalg.norm(g, axis=1)
        I = _carreau_thickness_integral(gnorms, z3, law.params, q)  # (nt, nz)
        # u'(z', z3) = +2 I(|g|, z3) g per triangle (profile fed with -g)
        return 2.0 * np.einsum("tz,t,td->zd", I, area, g)
    rp = law.params.r_prime
    c_r = constitutive.powerlaw_prefactor(law.params)
    kappa = c_r * (rp + 1.0) * 2.0**rp / rp
    gnorms = np.linalg.norm(g, axis=1)
    amp = (area * np.where(gnorms > 0.0, gnorms, 1.0) ** (rp - 2.0))[:, None] * g
    amp[gnorms == 0.0] = 0.0
    return kappa * np.multiply.outer(_powerlaw_shape(z3, rp), amp.sum(axis=0))


def _locate_uniform(coord, length, cells):
    idx = int(np.floor(coord / length * cells))
    return min(max(idx, 0), cells - 1)


def _macro_element(mesh, x):
    """Index of the macro triangle containing x (lower/upper diagonal split)."""
    if not (0.0 <= x[0] <= mesh.L1 and 0.0 <= x[1] <= mesh.L2):
        raise DomainError(f"point {tuple(x)} outside the macro domain")
    i = _locate_uniform(x[0], mesh.L1, mesh.n1)
    j = _locate_uniform(x[1], mesh.L2, mesh.n2)
    hx, hy = mesh.L1 / mesh.n1, mesh.L2 / mesh.n2
    xloc = x[0] / hx - i
    yloc = x[1] / hy - j
    cell = i * mesh.n2 + j
    return 2 * cell + (0 if yloc <= xloc else 1)


def _cell_triangle(mesh: PeriodicMesh, z_prime):
    """Fluid-array index of the triangle holding the wrapped cell point, or None."""
    zw = (np.asarray(z_prime, dtype=float) + 0.5) % 1.0  # wrap into [0, 1)
    n = mesh.n
    cx = _locate_uniform(zw[0], 1.0, n)
    cy = _locate_uniform(zw[1], 1.0, n)
    xloc = zw[0] * n - cx
    yloc = zw[1] * n - cy
    if (cx + cy) % 2 == 0:
        local = 0 if yloc <= xloc else 1  # main diagonal split
    else:
        local = 0 if xloc + yloc <= 1.0 else 1  # anti-diagonal split
    tri = 2 * (cx * n + cy) + local
    if not mesh.fluid[tri]:
        return None
    return int(mesh.fluid[:tri].sum())


def macro_driving(macro: MacroSolution, x):
    """Element driving delta = f - grad p of a macro solution at the point ``x``."""
    mesh = macro.problem.mesh
    el = _macro_element(mesh, np.asarray(x, dtype=float))
    return macro.problem.force[el] - element_gradients(mesh, macro.p)[el]


def reconstruct_velocity(macro: MacroSolution, mesh: PeriodicMesh, law, x, z):
    """Limit 3D velocity (u', 0) at macro point ``x`` and cell point ``z``.

    ``z = (z1, z2, z3)`` has its horizontal part in unit-cell coordinates
    (wrapped periodically) and z3 in [0, 1].  Returns zero inside the
    obstacle (the zero-extension convention); raises
    :class:`~thinporous.errors.DomainError` for ``x`` outside the rectangle.
    """
    z = np.asarray(z, dtype=float)
    z3 = float(z[2])
    if not 0.0 <= z3 <= 1.0:
        raise ParameterError("z3 must lie in [0, 1]")
    delta = macro_driving(macro, x)

    idx = _cell_triangle(mesh, z[:2])
    if idx is None:
        return np.zeros(3)
    sol = law.cell_solution(delta)
    g = delta + solution_gradients(mesh, sol.q)[idx]

    kind = law.kind
    if kind in _NEWTONIAN_KINDS:
        w = newtonian_profile(-g, law.eta, z3)
    elif kind is LimitModelKind.CARREAU:
        w = carreau_profile(-g, law.params, z3, law.quad)
    else:
        w = powerlaw_profile(-g, law.params, z3)
    return np.array([w[0], w[1], 0.0])
