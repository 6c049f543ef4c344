"""Carreau rheology: viscosity laws, the stress-viscosity inverse, mobility.

Everything here is a pure function of scalar (or array) shear quantities.
The central object is ``psi``, the inverse of the scalar stress map

    tau(zeta) = zeta * sqrt( (2/lam) * [ ((zeta - eta_inf)/(eta0 - eta_inf))**(2/(r-2)) - 1 ] ),

which converts a shear-stress magnitude into the effective viscosity of the
reduced through-thickness momentum balance.  Rather than inverting this
expression directly (the fractional power is numerically hostile near the
range endpoints), ``psi`` solves the equivalent strictly monotone problem
``eta_tilde(y) * y = tau`` in the shear-rate variable ``y`` and returns
``eta_tilde(y)``; the bracket ``[0, tau/eta_inf]`` is global for both flow
index branches.

``mobility`` integrates ``1/psi`` across the film thickness and reduces to
the Poiseuille value ``1/(6*eta0)`` at zero driving.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import NumericalError, ParameterError
from .params import FluidParams

__all__ = [
    "MobilityQuadrature",
    "carreau_viscosity",
    "reduced_viscosity_1d",
    "shear_stress_1d",
    "stress_from_viscosity",
    "psi",
    "shear_rate_from_stress",
    "mobility",
    "mobility_full_integrand",
    "carreau_energy_density",
    "powerlaw_prefactor",
]

_BISECT_WIDTH = 1e-14
_NEWTON_POLISH = 4


@dataclass(frozen=True)
class MobilityQuadrature:
    """Panel quadrature controls for the mobility integral.

    ``nodes_per_panel`` Gauss-Legendre nodes per panel; panels are halved
    until two successive estimates agree to ``rel_tol`` (at most
    ``max_levels`` halvings).
    """

    nodes_per_panel: int = 16
    rel_tol: float = 1e-10
    max_levels: int = 12

    def __post_init__(self):
        if self.nodes_per_panel < 2:
            raise ParameterError("nodes_per_panel must be >= 2")
        if not self.rel_tol > 0.0:
            raise ParameterError("rel_tol must be positive")
        if self.max_levels < 1:
            raise ParameterError("max_levels must be >= 1")


_DEFAULT_QUAD = MobilityQuadrature()


def _as_nonneg_array(x, name):
    arr = np.asarray(x, dtype=float)
    if np.any(arr < 0.0):
        raise ParameterError(f"{name} must be nonnegative")
    return arr


def _maybe_scalar(value, template):
    if np.ndim(template) == 0:
        return float(value)
    return value


def carreau_viscosity(s, params: FluidParams):
    """Carreau viscosity at symmetrized-gradient norm ``s >= 0``.

    Returns ``(eta0 - eta_inf) * (1 + lam*s^2)^(r/2 - 1) + eta_inf``; values
    lie in ``(eta_inf, eta0]`` for ``1 < r < 2`` and in ``[eta0, inf)`` for
    ``r > 2``.
    """
    s = _as_nonneg_array(s, "shear norm s")
    out = (params.eta0 - params.eta_inf) * (1.0 + params.lam * s * s) ** (
        0.5 * params.r - 1.0
    ) + params.eta_inf
    return _maybe_scalar(out, s)


def reduced_viscosity_1d(y, params: FluidParams):
    """Reduced 1D viscosity at shear rate ``y``: the Carreau law at ``s = y/sqrt(2)``.

    This is the coefficient seen by the through-thickness momentum balance,
    ``(eta0 - eta_inf) * (1 + (lam/2) y^2)^(r/2 - 1) + eta_inf``.
    """
    y = _as_nonneg_array(y, "shear rate y")
    out = (params.eta0 - params.eta_inf) * (1.0 + 0.5 * params.lam * y * y) ** (
        0.5 * params.r - 1.0
    ) + params.eta_inf
    return _maybe_scalar(out, y)


def shear_stress_1d(y, params: FluidParams):
    """Scalar stress map ``tau(y) = reduced_viscosity_1d(y) * y``.

    Strictly increasing in ``y`` for every admissible flow index, which is
    what makes the inversion in :func:`psi` unconditionally bracketable.
    """
    y = np.asarray(y, dtype=float)
    de = params.eta0 - params.eta_inf
    base = 1.0 + 0.5 * params.lam * y * y
    out = (de * base ** (0.5 * params.r - 1.0) + params.eta_inf) * y
    return _maybe_scalar(out, y)


def stress_from_viscosity(zeta, params: FluidParams):
    """Forward stress map tau(zeta) whose inverse is :func:`psi`.

    Evaluated with log1p/expm1 so that the round trip ``tau(psi(tau))``
    holds to near machine precision over many decades of ``tau``.  Tiny
    excursions of ``zeta`` outside the admissible branch (from roundoff in a
    preceding inversion) are clamped to the branch endpoint ``tau = 0``.
    """
    zeta = np.asarray(zeta, dtype=float)
    de = params.eta0 - params.eta_inf
    if np.any(zeta <= params.eta_inf):
        raise ParameterError("zeta must exceed eta_inf")
    t = (zeta - params.eta0) / de  # = (zeta - eta_inf)/de - 1
    expo = 2.0 / (params.r - 2.0)
    u = np.expm1(expo * np.log1p(t))
    u = np.maximum(u, 0.0)
    out = zeta * np.sqrt(2.0 * u / params.lam)
    return _maybe_scalar(out, zeta)


def _solve_shear_rate(tau, params: FluidParams, max_iter=200):
    """Vectorized solve of ``shear_stress_1d(y) = tau`` for ``y >= 0``.

    Bisection on the global bracket ``[0, tau/eta_inf]`` down to a width of
    ``1e-14 * max(1, bracket)``, then a fixed number of Newton polish steps
    kept inside the bracket.
    """
    tau = np.asarray(tau, dtype=float)
    de = params.eta0 - params.eta_inf
    lam, r, ei = params.lam, params.r, params.eta_inf

    lo = np.zeros_like(tau)
    hi = tau / ei
    width = hi - lo
    target = _BISECT_WIDTH * np.maximum(1.0, hi)

    def stress(y):
        return (de * (1.0 + 0.5 * lam * y * y) ** (0.5 * r - 1.0) + ei) * y

    n_bisect = 48  # 2^-48 * hi < 1e-14 * max(1, hi) for every bracket
    used = n_bisect + _NEWTON_POLISH
    if used > max_iter:
        raise ParameterError("iteration cap too small for the bisection schedule")
    for _ in range(n_bisect):
        if np.all(width <= target):
            break
        mid = 0.5 * (lo + hi)
        high_side = stress(mid) > tau
        hi = np.where(high_side, mid, hi)
        lo = np.where(high_side, lo, mid)
        width = hi - lo

    y = 0.5 * (lo + hi)
    for _ in range(_NEWTON_POLISH):
        base = 1.0 + 0.5 * lam * y * y
        nu = de * base ** (0.5 * r - 1.0) + ei
        dnu = de * (0.5 * r - 1.0) * base ** (0.5 * r - 2.0) * lam * y
        f = nu * y - tau
        fp = nu + dnu * y
        step = np.where(fp > 0.0, f / np.where(fp > 0.0, fp, 1.0), 0.0)
        y = np.clip(y - step, lo, hi)

    if not np.all(np.isfinite(y)):
        raise NumericalError(
            "shear-rate inversion produced non-finite values",
            bracket=(lo, hi),
        )
    return y


def shear_rate_from_stress(tau, params: FluidParams):
    """Shear rate ``y`` with ``shear_stress_1d(y) = tau`` (odd extension for tau < 0)."""
    tau = np.asarray(tau, dtype=float)
    y = _solve_shear_rate(np.abs(tau), params)
    out = np.where(tau < 0.0, -y, y)
    return _maybe_scalar(out, tau)


def psi(tau, params: FluidParams):
    """Effective viscosity at stress magnitude ``tau >= 0`` (inverse stress map).

    Returns the unique ``zeta`` with ``stress_from_viscosity(zeta) = tau``:
    monotone nonincreasing in ``tau`` with range ``(eta_inf, eta0]`` for
    ``1 < r < 2``, monotone nondecreasing with range ``[eta0, inf)`` for
    ``r > 2``.  ``psi(0) = eta0`` exactly.
    """
    tau = _as_nonneg_array(tau, "stress tau")
    y = _solve_shear_rate(tau, params)
    out = (params.eta0 - params.eta_inf) * (1.0 + 0.5 * params.lam * y * y) ** (
        0.5 * params.r - 1.0
    ) + params.eta_inf
    return _maybe_scalar(out, tau)


@lru_cache(maxsize=64)
def _panel_rule(nodes, panels, a, b):
    """Gauss-Legendre nodes/weights for ``panels`` equal panels on [a, b]."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    edges = np.linspace(a, b, panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    xs = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    ws = (half[:, None] * w[None, :]).ravel()
    return xs, ws


def _adaptive_panels(integrand, a, b, quad, context):
    """Refine equal Gauss-Legendre panels on [a, b] until batch convergence.

    ``integrand(xs)`` must return an array whose last axis matches ``xs``;
    the integral is taken along that axis.  Returns the converged values.
    """
    prev = None
    for level in range(quad.max_levels + 1):
        xs, ws = _panel_rule(quad.nodes_per_panel, 2**level, a, b)
        vals = integrand(xs) @ ws
        if prev is not None:
            err = np.abs(vals - prev)
            if np.all(err <= quad.rel_tol * np.maximum(np.abs(vals), 1e-300)):
                return vals
        prev = vals
    raise NumericalError(
        f"panel quadrature for {context} did not converge "
        f"within {quad.max_levels} refinement levels",
        last_value=prev,
    )


def mobility(s, params: FluidParams, quad: MobilityQuadrature | None = None):
    """Scalar mobility M(s) of the Carreau filtration law.

    M(s) = 2 * int_{-1/2}^{1/2} xi^2 / psi(2 s |xi|) dxi, evaluated on the
    even half-interval.  ``M(0) = 1/(6*eta0)`` and, for a shear-thinning
    fluid (``1 < r < 2``), M is nondecreasing in ``s`` with values in
    ``[1/(6*eta0), 1/(6*eta_inf))``; for ``r > 2`` the behaviour is mirrored.
    """
    quad = quad or _DEFAULT_QUAD
    s = _as_nonneg_array(s, "driving magnitude s")
    s_flat = np.atleast_1d(s).ravel()

    def integrand(xs):
        tau = 2.0 * s_flat[:, None] * xs[None, :]
        return 4.0 * xs[None, :] ** 2 / psi(tau, params)

    vals = _adaptive_panels(integrand, 0.0, 0.5, quad, "mobility")
    return _maybe_scalar(vals.reshape(np.shape(s)) if np.ndim(s) else vals[0], s)


def mobility_full_integrand(s, params: FluidParams, quad: MobilityQuadrature | None = None):
    """Mobility via the full signed integrand 2*int (1/2 + xi) xi / psi(2 s |xi|) dxi.

    Identical to :func:`mobility` up to quadrature tolerance: the odd part of
    the integrand cancels over the symmetric interval.  Kept as a cross-check.
    """
    quad = quad or _DEFAULT_QUAD
    s = _as_nonneg_array(s, "driving magnitude s")
    s_flat = np.atleast_1d(s).ravel()

    def integrand(xs):
        tau = 2.0 * s_flat[:, None] * np.abs(xs)[None, :]
        return 2.0 * ((0.5 + xs) * xs)[None, :] / psi(tau, params)

    vals = _adaptive_panels(integrand, -0.5, 0.5, quad, "mobility (full integrand)")
    return _maybe_scalar(vals.reshape(np.shape(s)) if np.ndim(s) else vals[0], s)


def carreau_energy_density(s, params: FluidParams, quad: MobilityQuadrature | None = None):
    """Convex energy density Phi(s) with Phi'(s) = M(s) * s / 2.

    Computed from the single smooth integral
    Phi(s) = (s/4) * int_0^1 y(s*x) (1 - x) dx with ``y`` the shear rate at
    stress ``s*x`` (an exact reordering of the double integral defining the
    antiderivative of the mobility flux).
    """
    quad = quad or _DEFAULT_QUAD
    s = _as_nonneg_array(s, "driving magnitude s")
    s_flat = np.atleast_1d(s).ravel()

    def integrand(xs):
        tau = s_flat[:, None] * xs[None, :]
        y = _solve_shear_rate(tau, params)
        return 0.25 * s_flat[:, None] * y * (1.0 - xs)[None, :]

    vals = _adaptive_panels(integrand, 0.0, 1.0, quad, "carreau energy density")
    return _maybe_scalar(vals.reshape(np.shape(s)) if np.ndim(s) else vals[0], s)


def powerlaw_prefactor(params: FluidParams):
    """Positive coefficient c_r of the dilatant (r > 2) power-law filtration flux.

    c_r = 2^(-r'/2) * (eta0 - eta_inf)^(1 - r') * lam^(-(r-2)/(2(r-1))) / (r' + 1),

    the constant such that the mean of the 1D power-law profile driven by a
    vector g equals ``-c_r |g|^(r'-2) g``.  The lambda exponent follows from
    re-deriving the profile from the reduced momentum balance with
    coefficient ``2^(-r/2) (eta0 - eta_inf) lam^((r-2)/2)``; the independent
    boundary-value oracle certifies the value.
    """
    if not params.r > 2.0:
        raise ParameterError(f"power-law prefactor requires r > 2, got r={params.r}")
    rp = params.r_prime
    de = params.eta0 - params.eta_inf
    return (
        2.0 ** (-0.5 * rp)
        * de ** (1.0 - rp)
        * params.lam ** (-(params.r - 2.0) / (2.0 * (params.r - 1.0)))
        / (rp + 1.0)
    )
