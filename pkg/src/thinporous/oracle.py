"""Independent brute-force references for the profiles and cell solvers.

Two oracles live here, deliberately sharing no assembly code with the main
solvers:

* :func:`bvp_profile_oracle` solves the reduced through-thickness momentum
  balance as a two-point boundary value problem by semi-analytic stress
  integration: the stress is affine in z3, its constant is found by scalar
  root finding on the zero-mean-slope condition, and the slope is recovered
  by pointwise inversion of the scalar stress-rate relation.  This makes it
  nearly exact and a trustworthy arbiter for the closed-form profiles and
  for the power-law flux prefactor.

* :func:`dense_energy_cell_oracle` minimizes the discrete convex cell energy
  directly (dense arrays, projected gradient descent with Barzilai-Borwein
  steps and backtracking) on meshes small enough for that to be cheap.

:func:`fd_gradient_check` compares any assembled gradient against central
finite differences of the matching energy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import constitutive
from .cellmesh import CellGeometry, build_cell_mesh
from .cellsolve import CellSolution
from .constitutive import MobilityQuadrature
from .errors import NumericalError, ParameterError
from .params import FluidParams, LimitModelKind
from .reconstruct import Profile

__all__ = [
    "OracleReport",
    "bvp_profile_oracle",
    "dense_energy_cell_oracle",
    "oracle_cell_flux",
    "fd_gradient_check",
    "compare_profiles",
]

_NEWTONIAN_KINDS = (LimitModelKind.NEWTONIAN_ETA0, LimitModelKind.NEWTONIAN_ETA_INF)


@dataclass(frozen=True)
class OracleReport:
    """Agreement record between a candidate profile and its oracle."""

    sup_error: float
    mean_flux_error: float
    grid_size: int
    kind: str

    def __post_init__(self):
        if self.sup_error < 0.0 or self.mean_flux_error < 0.0:
            raise ParameterError("oracle errors must be nonnegative")


# ---------------------------------------------------------------------------
# 1D boundary-value oracle


def _gauss_batch(n_nodes, n_panels):
    x, w = np.polynomial.legendre.leggauss(n_nodes)
    edges = np.linspace(0.0, 1.0, n_panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    xs = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    ws = (half[:, None] * w[None, :]).ravel()
    return xs, ws


def _slope_fn(kind, params, eta):
    """Odd increasing map from stress (with slope-2 normalization) to shear rate."""
    if kind in _NEWTONIAN_KINDS:
        return lambda sig: sig / eta
    if kind is LimitModelKind.CARREAU:
        return lambda sig: constitutive.shear_rate_from_stress(sig, params)
    # power law: stress tau = 2 K |w'|^(r-2) w' with the thin-film coefficient K
    K = (
        2.0 ** (-0.5 * params.r)
        * (params.eta0 - params.eta_inf)
        * params.lam ** (0.5 * (params.r - 2.0))
    )
    rp = params.r_prime
    scale = (2.0 * K) ** (1.0 - rp)

    def slope(sig):
        return scale * np.abs(sig) ** (rp - 2.0) * sig

    return slope


def bvp_profile_oracle(
    g,
    params: FluidParams,
    kind: LimitModelKind,
    n: int = 129,
    *,
    quad_nodes: int = 24,
    quad_panels: int = 16,
) -> Profile:
    """Reference through-thickness profile for the driving vector ``g``.

    Solves w(0) = w(1) = 0 for the reduced momentum balance
    -(1/2) d/dz3( coef(|w'|) w' ) = -g: the stress sigma(z3) = C + 2 a z3
    (a = |g|) is affine, C is found by Brent root finding on the zero mean
    of the slope, the slope is inverted pointwise through the constitutive
    relation, and the profile is integrated on an ``n``-point grid (exactly
    for the power law, by panel Gauss quadrature otherwise).
    """
    if n < 64:
        raise ParameterError(f"oracle grid must have n >= 64 points, got {n}")
    g = np.asarray(g, dtype=float)
    a = float(np.hypot(g[0], g[1]))
    z3 = np.linspace(0.0, 1.0, n)
    if a == 0.0:
        if kind is LimitModelKind.POWER_LAW:
            raise ParameterError("power-law oracle is degenerate at g = 0")
        return Profile(
            g=g, z3=z3, values=np.zeros((n, 2)), kind=f"oracle_{kind.value}",
            stress=np.zeros((n, 2)), mean=np.zeros(2),
        )
    u = g / a
    eta = None
    if kind in _NEWTONIAN_KINDS:
        eta = params.eta0 if kind is LimitModelKind.NEWTONIAN_ETA0 else params.eta_inf
    slope = _slope_fn(kind, params, eta)

    if kind is LimitModelKind.POWER_LAW:
        # closed-form mean slope: antiderivative of |C + 2 a s|^(r'-2)(C + 2 a s)
        rp = params.r_prime
        pre = slope(1.0)  # = (2K)^(1-r')

        def mean_slope(C):
            return pre * (np.abs(C + 2.0 * a) ** rp - np.abs(C) ** rp) / (2.0 * a * rp)

    else:
        xs, ws = _gauss_batch(quad_nodes, quad_panels)

        def mean_slope(C):
            return float(slope(C + 2.0 * a * xs) @ ws)

    try:
        C = brentq(mean_slope, -2.0 * a, 0.0, xtol=1e-15 * max(1.0, 2.0 * a), rtol=1e-15)
    except ValueError as exc:  # pragma: no cover - bracket is analytic
        raise NumericalError("oracle stress-constant root find failed") from exc

    sigma = C + 2.0 * a * z3
    if kind is LimitModelKind.POWER_LAW:
        # w(z) = Y(z) - Y(0) and the thickness mean, both in closed form
        rp = params.r_prime
        pre = slope(1.0)
        anti = pre * np.abs(sigma) ** rp / (2.0 * a * rp)
        w_scalar = anti - anti[0]
        anti2 = pre * sigma * np.abs(sigma) ** rp / (4.0 * a * a * rp * (rp + 1.0))
        mean_scalar = anti2[-1] - anti2[0] - anti[0]
    else:
        # cumulative Gauss quadrature of the slope, all intervals batched
        xs, ws = _gauss_batch(quad_nodes, 2)
        dz = np.diff(z3)
        s_nodes = z3[:-1, None] + dz[:, None] * xs[None, :]
        rates = slope(C + 2.0 * a * s_nodes)
        w_scalar = np.concatenate([[0.0], np.cumsum(dz * (rates @ ws))])
        xs_m, ws_m = _gauss_batch(quad_nodes, quad_panels)
        mean_scalar = float((slope(C + 2.0 * a * xs_m) * (1.0 - xs_m)) @ ws_m)

    return Profile(
        g=g,
        z3=z3,
        values=np.multiply.outer(w_scalar, u),
        kind=f"oracle_{kind.value}",
        stress=np.multiply.outer(sigma, u),
        mean=mean_scalar * u,
    )


def compare_profiles(oracle: Profile, candidate_values, candidate_mean=None):
    """Build an :class:`OracleReport` from oracle samples and candidate values."""
    sup = float(np.abs(oracle.values - np.asarray(candidate_values)).max())
    mean_err = 0.0
    if candidate_mean is not None and oracle.mean is not None:
        mean_err = float(np.abs(oracle.mean - np.asarray(candidate_mean)).max())
    return OracleReport(
        sup_error=sup, mean_flux_error=mean_err, grid_size=len(oracle.z3),
        kind=oracle.kind,
    )


# ---------------------------------------------------------------------------
# dense energy-minimization cell oracle


def _dense_cell_operators(mesh):
    """The oracle's own P1 element operators (dense, independent assembly)."""
    tri = mesh.triangles[mesh.fluid]
    p = mesh.vertices[tri]
    x, y = p[..., 0], p[..., 1]
    area = 0.5 * (
        (x[:, 1] - x[:, 0]) * (y[:, 2] - y[:, 0])
        - (x[:, 2] - x[:, 0]) * (y[:, 1] - y[:, 0])
    )
    m = len(tri)
    G = np.zeros((m, 2, mesh.ndof))
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        gx = (y[:, j] - y[:, k]) / (2.0 * area)
        gy = (x[:, k] - x[:, j]) / (2.0 * area)
        dof_i = mesh.dof[tri[:, i]]
        G[np.arange(m), 0, dof_i] += gx
        G[np.arange(m), 1, dof_i] += gy
    return area, G


def _cell_energy_pieces(kind, delta, params, quad, eps_reg):
    """Energy density and coefficient as functions of |g| for the oracle."""
    if kind == "linear":
        return (lambda t: 0.5 * t * t), (lambda t: np.ones_like(t))
    if kind == "powerlaw":
        rp = params.r_prime

        def dens(t):
            return (t * t + eps_reg * eps_reg) ** (0.5 * rp) / rp

        def coef(t):
            return (t * t + eps_reg * eps_reg) ** (0.5 * (rp - 2.0))

        return dens, coef
    if kind == "carreau":

        def dens(t):
            return constitutive.carreau_energy_density(t, params, quad)

        def coef(t):
            return 0.5 * constitutive.mobility(t, params, quad)

        return dens, coef
    raise ParameterError(f"unknown oracle law kind {kind!r}")


def dense_energy_cell_oracle(
    geom: CellGeometry,
    n: int,
    delta,
    kind: str,
    params: FluidParams | None = None,
    quad: MobilityQuadrature | None = None,
    *,
    grad_tol: float = 1e-10,
    max_iter: int = 200000,
    eps_reg=None,
) -> CellSolution:
    """Minimize the discrete convex cell energy directly on a tiny mesh.

    ``kind`` is one of ``"linear"``, ``"powerlaw"``, ``"carreau"``; the
    discretization (mesh, centroid coefficients, regularization) matches the
    main solvers exactly, but assembly and solution path are independent:
    dense element operators, projected gradient descent with backtracking,
    run until the (mean-zero-projected) gradient norm drops below
    ``grad_tol``.
    """
    if n > 16:
        raise ParameterError(f"dense oracle is restricted to n <= 16, got {n}")
    mesh = build_cell_mesh(geom, n)
    delta = np.asarray(delta, dtype=float)
    quad = quad or MobilityQuadrature()
    if kind == "powerlaw" and eps_reg is None:
        eps_reg = 1e-8 * max(1.0, float(np.linalg.norm(delta)))
    dens, coef = _cell_energy_pieces(kind, delta, params, quad, eps_reg)
    area, G = _dense_cell_operators(mesh)

    def grads_of(q):
        return delta[None, :] + np.einsum("tdn,n->td", G, q)

    def energy(q):
        t = np.linalg.norm(grads_of(q), axis=1)
        return float(area @ dens(t))

    def gradient(q):
        gf = grads_of(q)
        c = coef(np.linalg.norm(gf, axis=1))
        gvec = np.einsum("tdn,td,t->n", G, gf, c * area)
        return gvec - gvec.mean()

    # Projected gradient descent with Barzilai-Borwein steps.  Near the
    # minimum the energy decrement drops below double-precision resolution
    # long before the gradient does, so steps are accepted whenever the
    # energy does not increase beyond roundoff slack.
    q = np.zeros(mesh.ndof)
    e = energy(q)
    gv = gradient(q)
    gn = float(np.linalg.norm(gv))
    step = 1.0
    q_prev = gv_prev = None
    it = 0
    while gn > grad_tol:
        it += 1
        if it > max_iter:
            raise NumericalError(
                "dense cell oracle hit the iteration cap",
                gradient_norm=gn,
                iterations=it,
            )
        if q_prev is not None:
            s = q - q_prev
            yv = gv - gv_prev
            sy = float(s @ yv)
            if sy > 0.0:
                step = float(s @ s) / sy  # Barzilai-Borwein step
        slack = 1e-13 * max(abs(e), 1.0)
        q_try = q - step * gv
        for _ in range(60):
            e_try = energy(q_try)
            if e_try <= e + slack:
                break
            step *= 0.5
            q_try = q - step * gv
        else:
            raise NumericalError(
                "dense cell oracle cannot descend", gradient_norm=gn
            )
        if not np.any(q_try != q):
            raise NumericalError(
                "dense cell oracle stalled above tolerance", gradient_norm=gn
            )
        q_prev, gv_prev = q, gv
        q, e = q_try, e_try
        gv = gradient(q)
        gn = float(np.linalg.norm(gv))

    mass = mesh.lumped_mass()
    q = q - (mass @ q) / mass.sum()
    return CellSolution(
        q=q,
        delta=delta,
        kind=f"oracle_{kind}",
        residual=gn,
        iterations=it,
        eps_reg=eps_reg,
    )


def oracle_cell_flux(geom, n, solution: CellSolution, kind, params=None, quad=None):
    """Flux of an oracle cell solution via the oracle's own quadrature."""
    mesh = build_cell_mesh(geom, n)
    quad = quad or MobilityQuadrature()
    area, G = _dense_cell_operators(mesh)
    gf = solution.delta[None, :] + np.einsum("tdn,n->td", G, solution.q)
    t = np.linalg.norm(gf, axis=1)
    if kind == "linear":
        c = np.ones_like(t)
    elif kind == "powerlaw":
        eps = solution.eps_reg
        c = (t * t + eps * eps) ** (0.5 * (params.r_prime - 2.0))
    else:
        c = constitutive.mobility(t, params, quad)
    return (area[:, None] * c[:, None] * gf).sum(axis=0)


# ---------------------------------------------------------------------------
# finite-difference gradient check


def fd_gradient_check(energy, gradient, field, h_fd=1e-6, *, ndirs=20, rng=None):
    """Max relative deviation of assembled gradients from central differences.

    ``energy(q)`` returns a scalar, ``gradient(q)`` the assembled residual
    vector.  The check probes ``ndirs`` random mean-zero unit directions.
    """
    if not 1e-7 <= h_fd <= 1e-4:
        raise ParameterError(f"h_fd must lie in [1e-7, 1e-4], got {h_fd}")
    rng = np.random.default_rng(0) if rng is None else rng
    q = np.asarray(field, dtype=float)
    gvec = np.asarray(gradient(q), dtype=float)
    worst = 0.0
    for _ in range(ndirs):
        v = rng.standard_normal(len(q))
        v -= v.mean()
        v /= np.linalg.norm(v)
        fd = (energy(q + h_fd * v) - energy(q - h_fd * v)) / (2.0 * h_fd)
        an = float(gvec @ v)
        denom = max(abs(an), abs(fd), 1e-30)
        worst = max(worst, abs(fd - an) / denom)
    return worst
