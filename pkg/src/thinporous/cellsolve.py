"""Periodic cell problems on the perforated unit cell and effective laws.

Three families of cell problems are solved with P1 elements on the periodic
mesh, all of the form

    div( c(|delta + grad q|) (delta + grad q) ) = 0   in the fluid part,

with natural (no-flux) conditions on the obstacle and mean-zero ``q``:

* linear (``c = 1``, driven by a basis vector), whose two solutions assemble
  the symmetric positive definite permeability tensor A;
* power law (``c(t) = t^(r'-2)``, regularized), whose flux defines the
  monotone coercive map U;
* Carreau (``c(t) = M(t)/2`` with the mobility of :mod:`.constitutive`),
  whose flux defines the nonlinear filtration map F.

Sign convention: all effective laws map the driving ``delta = f - grad p``
to the filtration flux directly, with positive mobility, so a linear law
evaluates to ``A @ delta / (6 eta)``.

The nonlinear solves are damped Picard iterations on the frozen secant
coefficient; each accepted step must decrease the discrete convex energy,
with the relaxation factor halved until it does.
"""

from __future__ import annotations

import weakref
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from . import constitutive
from .cellmesh import PeriodicMesh
from .constitutive import MobilityQuadrature
from .errors import NumericalError, ParameterError
from .linsolve import pcg_meanzero
from .params import FluidParams, LimitModelKind, limit_model_kind

__all__ = [
    "CellSolution",
    "PermeabilityTensor",
    "EffectiveLaw",
    "solve_linear_cell",
    "permeability_tensor",
    "solve_powerlaw_cell",
    "powerlaw_flux",
    "solve_carreau_cell",
    "carreau_flux",
    "effective_law",
    "solution_gradients",
    "linear_cell_residual",
    "powerlaw_cell_residual",
    "carreau_cell_residual",
    "default_regularization",
]

_P1_CACHE = weakref.WeakKeyDictionary()


def _p1_data(mesh: PeriodicMesh):
    """Per-fluid-triangle DOF triplets, areas and P1 basis gradients."""
    cached = _P1_CACHE.get(mesh)
    if cached is not None:
        return cached
    tri = mesh.fluid_triangles
    p = mesh.vertices[tri]
    x, y = p[..., 0], p[..., 1]
    area = 0.5 * (
        (x[:, 1] - x[:, 0]) * (y[:, 2] - y[:, 0])
        - (x[:, 2] - x[:, 0]) * (y[:, 1] - y[:, 0])
    )
    # grad(lambda_i) = (y_j - y_k, x_k - x_j) / (2 area), (i, j, k) cyclic
    grads = np.empty((len(tri), 3, 2))
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        grads[:, i, 0] = (y[:, j] - y[:, k]) / (2.0 * area)
        grads[:, i, 1] = (x[:, k] - x[:, j]) / (2.0 * area)
    dofs = mesh.dof[tri]
    cached = (dofs, area, grads)
    _P1_CACHE[mesh] = cached
    return cached


def _stiffness(mesh, coef):
    """Assemble sum_T coef_T area_T grad(v_i).grad(v_j) over fluid triangles."""
    dofs, area, grads = _p1_data(mesh)
    w = coef * area
    rows, cols, vals = [], [], []
    for i in range(3):
        for j in range(3):
            rows.append(dofs[:, i])
            cols.append(dofs[:, j])
            vals.append(w * np.einsum("td,td->t", grads[:, i], grads[:, j]))
    K = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(mesh.ndof, mesh.ndof),
    )
    return K.tocsr()


def _flux_rhs(mesh, vec):
    """Assemble b_v = sum_T area_T vec_T . grad(v) for a per-triangle vector field."""
    dofs, area, grads = _p1_data(mesh)
    b = np.zeros(mesh.ndof)
    contrib = area[:, None, None] * grads * vec[:, None, :]
    np.add.at(b, dofs.ravel(), contrib.sum(axis=2).ravel())
    return b


def solution_gradients(mesh, q):
    """Per-fluid-triangle gradient of the DOF field ``q``, shape (m, 2)."""
    dofs, _, grads = _p1_data(mesh)
    return np.einsum("ti,tid->td", q[dofs], grads)


def _lumped_mean_zero(mesh, q):
    m = mesh.lumped_mass()
    return q - (m @ q) / m.sum()


def default_regularization(delta):
    """Regularization scale for the degenerate power-law coefficient."""
    return 1e-8 * max(1.0, float(np.linalg.norm(delta)))


@dataclass(eq=False)
class CellSolution:
    """Mean-zero cell pressure with solver diagnostics.

    ``q`` lives on the periodic fluid DOFs; ``residual`` is the relative
    nonlinear (or linear) residual actually reached, ``energy_history`` the
    accepted-step energies of a nonlinear solve, and ``eps_reg`` the
    regularization actually used (power law only).
    """

    q: np.ndarray
    delta: np.ndarray | None
    kind: str
    residual: float
    iterations: int
    eps_reg: float | None = None
    energy_history: list = field(default_factory=list)


# ---------------------------------------------------------------------------
# linear cell problems and the permeability tensor


def solve_linear_cell(mesh: PeriodicMesh, axis: int, *, tol=1e-12) -> CellSolution:
    """Solve the linear periodic cell problem driven by the basis vector e_axis.

    Discrete weak form: int (grad q + e_axis) . grad v = 0 for all periodic
    P1 test functions; the returned field is lumped-mass mean-zero.
    """
    if axis not in (1, 2):
        raise ParameterError(f"axis must be 1 or 2, got {axis}")
    _, area, _ = _p1_data(mesh)
    e = np.zeros((len(area), 2))
    e[:, axis - 1] = 1.0
    b = -_flux_rhs(mesh, e)
    K = _stiffness(mesh, np.ones(len(area)))
    q, relres, iters = pcg_meanzero(K, b, rtol=tol)
    q = _lumped_mean_zero(mesh, q)
    return CellSolution(
        q=q, delta=e[0].copy(), kind=f"linear_{axis}", residual=relres, iterations=iters
    )


@dataclass(eq=False)
class PermeabilityTensor:
    """Symmetric positive definite 2x2 effective permeability.

    Invariants checked on construction: symmetry to 1e-10, eigenvalues in
    (0, fluid_area] (constant test fields bound the energy by the fluid
    area).
    """

    matrix: np.ndarray
    fluid_area: float

    def __post_init__(self):
        a = np.asarray(self.matrix, dtype=float)
        if abs(a[0, 1] - a[1, 0]) > 1e-10:
            raise NumericalError("permeability tensor not symmetric", matrix=a)
        eig = np.linalg.eigvalsh(0.5 * (a + a.T))
        if eig[0] <= 0.0 or eig[-1] > self.fluid_area * (1.0 + 1e-8) + 1e-12:
            raise NumericalError(
                "permeability eigenvalues outside (0, fluid_area]",
                eigenvalues=eig,
                fluid_area=self.fluid_area,
            )

    @property
    def eigenvalues(self):
        return np.linalg.eigvalsh(0.5 * (self.matrix + self.matrix.T))


def permeability_tensor(
    mesh: PeriodicMesh, *, form="flux", tol=1e-12, return_solutions=False
):
    """Assemble the permeability tensor from the two linear cell solutions.

    ``form="flux"`` uses A_ij = int (e_i + grad q_i) . e_j; ``form="energy"``
    uses the symmetric form int (e_i + grad q_i) . (e_j + grad q_j).  The two
    agree to solver tolerance (discrete weak-form identity).
    """
    if form not in ("flux", "energy"):
        raise ParameterError(f"unknown form {form!r}")
    _, area, _ = _p1_data(mesh)
    sols = [solve_linear_cell(mesh, axis, tol=tol) for axis in (1, 2)]
    fields = []
    for axis, sol in zip((1, 2), sols):
        g = solution_gradients(mesh, sol.q)
        g[:, axis - 1] += 1.0
        fields.append(g)
    A = np.empty((2, 2))
    for i in range(2):
        for j in range(2):
            if form == "flux":
                A[i, j] = float((area * fields[i][:, j]).sum())
            else:
                A[i, j] = float(
                    (area * np.einsum("td,td->t", fields[i], fields[j])).sum()
                )
    tensor = PermeabilityTensor(matrix=A, fluid_area=mesh.fluid_area)
    if return_solutions:
        return tensor, sols
    return tensor


# ---------------------------------------------------------------------------
# nonlinear cell problems (damped Picard on the secant coefficient)


def _picard_cell(
    mesh, delta, coef_fn, energy_fn, flux_scale, *, tol, max_iter, cg_tol, q0=None
):
    """Shared damped-Picard driver; returns a CellSolution skeleton."""
    delta = np.asarray(delta, dtype=float)
    _, area, _ = _p1_data(mesh)
    q = np.zeros(mesh.ndof) if q0 is None else np.array(q0, dtype=float)
    abs_floor = 1e-13 * max(flux_scale, 1e-300)

    def residual_vec(qv):
        g = delta[None, :] + solution_gradients(mesh, qv)
        c = coef_fn(np.linalg.norm(g, axis=1))
        return _flux_rhs(mesh, c[:, None] * g), c

    R, c = residual_vec(q)
    res = float(np.linalg.norm(R))
    if q0 is None or not np.any(q0):
        res_ref = res
    else:  # warm start: keep the cold-start residual as the reference scale
        R_cold, _ = residual_vec(np.zeros(mesh.ndof))
        res_ref = float(np.linalg.norm(R_cold))
    energy = float(energy_fn(q))
    history = [energy]
    omega = 1.0
    iters = 0
    if res <= abs_floor or res <= tol * res_ref:
        return _lumped_mean_zero(mesh, q), res / max(res_ref, 1e-300), 0, history

    for iters in range(1, max_iter + 1):
        K = _stiffness(mesh, c)
        step, _, _ = pcg_meanzero(K, -R, rtol=cg_tol)
        accepted = False
        w = omega
        for _ in range(40):
            q_try = q + w * step
            e_try = float(energy_fn(q_try))
            if e_try <= energy + 1e-12 * max(abs(energy), 1.0):
                accepted = True
                break
            w *= 0.5
        if not accepted:
            break  # at the minimizer within roundoff; let the check decide
        q, energy = q_try, e_try
        history.append(energy)
        omega = min(1.0, 2.0 * w)
        R, c = residual_vec(q)
        res = float(np.linalg.norm(R))
        if res <= tol * res_ref or res <= abs_floor:
            q = _lumped_mean_zero(mesh, q)
            return q, res / max(res_ref, 1e-300), iters, history

    if res <= 10.0 * tol * res_ref or res <= abs_floor:
        q = _lumped_mean_zero(mesh, q)
        return q, res / max(res_ref, 1e-300), iters, history
    raise NumericalError(
        "Picard iteration for the cell problem did not converge",
        relative_residual=res / max(res_ref, 1e-300),
        iterations=iters,
        energy_history=history,
    )


def solve_powerlaw_cell(
    mesh: PeriodicMesh,
    delta,
    r_prime: float,
    *,
    tol=1e-10,
    max_iter=200,
    cg_tol=1e-12,
    eps_reg=None,
) -> CellSolution:
    """Solve the power-law cell problem div(|delta+grad q|^(r'-2)(delta+grad q)) = 0.

    The modulus is regularized as sqrt(|g|^2 + eps^2) because r' < 2 makes
    the coefficient singular at g = 0; ``eps_reg`` defaults to
    ``1e-8 * max(1, |delta|)``.  Near-degenerate exponents (r' close to 1)
    are reached by continuation: the Picard iteration count of a cold start
    grows like 1/(r' - 1), so the solve warm-starts from a ladder of milder
    exponents.
    """
    if not 1.0 < r_prime < 2.0:
        raise ParameterError(f"need 1 < r' < 2 (flow index r > 2), got r'={r_prime}")
    delta = np.asarray(delta, dtype=float)
    if delta.shape != (2,) or not np.all(np.isfinite(delta)):
        raise ParameterError("delta must be a finite 2-vector")
    eps = default_regularization(delta) if eps_reg is None else float(eps_reg)
    _, area, _ = _p1_data(mesh)

    stages = []
    if r_prime < 1.2:
        gap = 0.5
        while gap > 2.0 * (r_prime - 1.0):
            stages.append(1.0 + gap)
            gap *= 0.5
    stages.append(r_prime)

    def solve_stage(rp, q0, stage_tol):
        def coef(t):
            return (t * t + eps * eps) ** (0.5 * (rp - 2.0))

        def energy(qv):
            g = delta[None, :] + solution_gradients(mesh, qv)
            t2 = np.einsum("td,td->t", g, g) + eps * eps
            return (area * t2 ** (0.5 * rp)).sum() / rp

        flux_scale = (delta @ delta + eps * eps) ** (0.5 * (rp - 1.0)) * mesh.fluid_area
        return _picard_cell(
            mesh, delta, coef, energy, flux_scale,
            tol=stage_tol, max_iter=max_iter, cg_tol=cg_tol, q0=q0,
        )

    q = None
    total_iters = 0
    for rp in stages[:-1]:
        q, _, iters, _ = solve_stage(rp, q, max(tol, 1e-6))
        total_iters += iters
    # the Picard contraction rate degrades like 1 - (r' - 1); give the
    # final stage a budget that scales with the degeneracy (bounded)
    if r_prime < 1.2:
        budget = min(40 * max_iter, int(np.ceil(max_iter * 0.4 / (r_prime - 1.0))))
        max_iter = max(max_iter, budget)
    q, res, iters, history = solve_stage(stages[-1], q, tol)
    total_iters += iters
    return CellSolution(
        q=q,
        delta=delta,
        kind="powerlaw",
        residual=res,
        iterations=total_iters,
        eps_reg=eps,
        energy_history=history,
    )


def powerlaw_flux(
    mesh: PeriodicMesh, delta, r_prime: float, *, solution=None, **solver_kw
):
    """Flux map U(delta) = int |delta + grad q|^(r'-2) (delta + grad q) over the fluid part."""
    if solution is None:
        solution = solve_powerlaw_cell(mesh, delta, r_prime, **solver_kw)
    _, area, _ = _p1_data(mesh)
    g = np.asarray(delta, dtype=float)[None, :] + solution_gradients(mesh, solution.q)
    eps = solution.eps_reg
    c = (np.einsum("td,td->t", g, g) + eps * eps) ** (0.5 * (r_prime - 2.0))
    return (area[:, None] * c[:, None] * g).sum(axis=0)


def solve_carreau_cell(
    mesh: PeriodicMesh,
    delta,
    params: FluidParams,
    quad: MobilityQuadrature | None = None,
    *,
    tol=1e-10,
    max_iter=200,
    cg_tol=1e-12,
) -> CellSolution:
    """Solve the Carreau cell problem div( (M(|g|)/2) g ) = 0 with g = delta + grad q.

    The coefficient is the half-mobility evaluated at triangle centroids;
    it is bounded between 1/(12 eta0) and 1/(12 eta_inf), so the damped
    Picard iteration is uniformly well conditioned.
    """
    delta = np.asarray(delta, dtype=float)
    if delta.shape != (2,) or not np.all(np.isfinite(delta)):
        raise ParameterError("delta must be a finite 2-vector")
    quad = quad or MobilityQuadrature()
    _, area, _ = _p1_data(mesh)

    def coef(t):
        return 0.5 * constitutive.mobility(t, params, quad)

    def energy(qv):
        g = delta[None, :] + solution_gradients(mesh, qv)
        phi = constitutive.carreau_energy_density(
            np.linalg.norm(g, axis=1), params, quad
        )
        return (area * phi).sum()

    m0 = constitutive.mobility(0.0, params, quad)
    flux_scale = m0 * float(np.linalg.norm(delta)) * mesh.fluid_area + 1e-300
    q, res, iters, history = _picard_cell(
        mesh, delta, coef, energy, flux_scale, tol=tol, max_iter=max_iter, cg_tol=cg_tol
    )
    return CellSolution(
        q=q,
        delta=delta,
        kind="carreau",
        residual=res,
        iterations=iters,
        energy_history=history,
    )


def carreau_flux(
    mesh: PeriodicMesh,
    delta,
    params: FluidParams,
    quad: MobilityQuadrature | None = None,
    *,
    solution=None,
    **solver_kw,
):
    """Flux map F(delta) = int M(|delta + grad q|) (delta + grad q) over the fluid part."""
    quad = quad or MobilityQuadrature()
    if solution is None:
        solution = solve_carreau_cell(mesh, delta, params, quad, **solver_kw)
    _, area, _ = _p1_data(mesh)
    g = np.asarray(delta, dtype=float)[None, :] + solution_gradients(mesh, solution.q)
    m = constitutive.mobility(np.linalg.norm(g, axis=1), params, quad)
    return (area[:, None] * m[:, None] * g).sum(axis=0)


# ---------------------------------------------------------------------------
# residual wrappers (used by the finite-difference gradient checks)


def linear_cell_residual(mesh, q, delta):
    """Weak-form residual of the linear cell energy at the DOF field ``q``."""
    g = np.asarray(delta, dtype=float)[None, :] + solution_gradients(mesh, q)
    return _flux_rhs(mesh, g)


def powerlaw_cell_residual(mesh, q, delta, r_prime, eps_reg=None):
    """Weak-form residual of the regularized power-law cell energy."""
    delta = np.asarray(delta, dtype=float)
    eps = default_regularization(delta) if eps_reg is None else float(eps_reg)
    g = delta[None, :] + solution_gradients(mesh, q)
    c = (np.einsum("td,td->t", g, g) + eps * eps) ** (0.5 * (r_prime - 2.0))
    return _flux_rhs(mesh, c[:, None] * g)


def carreau_cell_residual(mesh, q, delta, params, quad=None):
    """Weak-form residual of the Carreau cell energy."""
    quad = quad or MobilityQuadrature()
    g = np.asarray(delta, dtype=float)[None, :] + solution_gradients(mesh, q)
    c = 0.5 * constitutive.mobility(np.linalg.norm(g, axis=1), params, quad)
    return _flux_rhs(mesh, c[:, None] * g)


# ---------------------------------------------------------------------------
# effective laws


class EffectiveLaw:
    """Effective filtration law mapping a driving vector to a flux vector.

    The law evaluates ``delta = f - grad p`` to the filtration velocity with
    positive mobility.  Evaluation is odd in ``delta`` up to solver
    tolerance; linear laws evaluate exactly as ``A @ delta / (6 eta)``.
    Nonlinear evaluations are cached on the driving vector quantized to
    ``cache_quantum`` per component (plain dict; safe for concurrent use,
    concurrent misses may recompute).
    """

    def __init__(
        self,
        kind: LimitModelKind,
        *,
        mesh=None,
        params=None,
        quad=None,
        matrix=None,
        eta=None,
        linear_solutions=None,
        r_prime=None,
        prefactor=None,
        cell_tol=1e-10,
        max_iter=200,
        cache_quantum=1e-6,
    ):
        self.kind = kind
        self.mesh = mesh
        self.params = params
        self.quad = quad
        self.matrix = None if matrix is None else np.asarray(matrix, dtype=float)
        self.eta = eta
        self.linear_solutions = linear_solutions
        self.r_prime = r_prime
        self.prefactor = prefactor
        self.cell_tol = cell_tol
        self.max_iter = max_iter
        self.cache_quantum = cache_quantum
        self._flux_cache = {}
        self._solution_cache = {}
        self.last_iterations = 0
        self.last_residual = 0.0

    # -- constructors ------------------------------------------------------

    @classmethod
    def linear(cls, matrix, eta, *, mesh=None, solutions=None):
        kind = LimitModelKind.NEWTONIAN_ETA0
        return cls(kind, matrix=matrix, eta=float(eta), mesh=mesh, linear_solutions=solutions)

    # -- evaluation --------------------------------------------------------

    @property
    def is_linear(self):
        return self.matrix is not None

    def linear_matrix(self):
        """The exact element matrix A/(6 eta) for linear laws, else None."""
        if self.matrix is None:
            return None
        return self.matrix / (6.0 * self.eta)

    def _key(self, delta):
        q = self.cache_quantum
        return (int(round(delta[0] / q)), int(round(delta[1] / q)))

    def evaluate_with_diagnostics(self, delta):
        """Flux at ``delta`` plus the (iterations, residual) of the solve.

        Cache hits return the recorded diagnostics of the original solve;
        safe for concurrent callers (each gets its own triple).
        """
        delta = np.asarray(delta, dtype=float)
        if self.matrix is not None:
            return (self.matrix @ delta) / (6.0 * self.eta), 0, 0.0
        key = self._key(delta)
        hit = self._flux_cache.get(key)
        if hit is not None:
            flux, iters, residual = hit
            self.last_iterations, self.last_residual = iters, residual
            return flux.copy(), iters, residual
        if self.kind is LimitModelKind.POWER_LAW:
            sol = solve_powerlaw_cell(
                self.mesh, delta, self.r_prime, tol=self.cell_tol, max_iter=self.max_iter
            )
            flux = self.prefactor * powerlaw_flux(
                self.mesh, delta, self.r_prime, solution=sol
            )
        else:
            sol = solve_carreau_cell(
                self.mesh,
                delta,
                self.params,
                self.quad,
                tol=self.cell_tol,
                max_iter=self.max_iter,
            )
            flux = carreau_flux(self.mesh, delta, self.params, self.quad, solution=sol)
        self.last_iterations, self.last_residual = sol.iterations, sol.residual
        self._flux_cache[key] = (flux.copy(), sol.iterations, sol.residual)
        self._solution_cache[key] = sol
        return flux, sol.iterations, sol.residual

    def evaluate(self, delta):
        """Filtration flux at the driving vector ``delta`` (2-vector)."""
        return self.evaluate_with_diagnostics(delta)[0]

    def cell_solution(self, delta):
        """Cell corrector pressure at the driving ``delta`` (cached)."""
        delta = np.asarray(delta, dtype=float)
        if self.matrix is not None:
            if self.linear_solutions is None:
                raise ParameterError(
                    "linear law built without cell solutions; use effective_law()"
                )
            q1, q2 = self.linear_solutions
            q = delta[0] * q1.q + delta[1] * q2.q
            return CellSolution(
                q=q, delta=delta, kind="linear", residual=0.0, iterations=0
            )
        key = self._key(delta)
        sol = self._solution_cache.get(key)
        if sol is None:
            self.evaluate(delta)
            sol = self._solution_cache[key]
        return sol

    def secant_mobility(self, delta, flux):
        """Scalar secant (flux . delta)/|delta|^2 with a safe zero-driving fallback."""
        delta = np.asarray(delta, dtype=float)
        d2 = float(delta @ delta)
        if d2 > 0.0:
            m = float(np.asarray(flux) @ delta) / d2
            if m > 0.0:
                return m
        if self.matrix is not None:
            return float(np.trace(self.matrix)) / (12.0 * self.eta)
        if self.kind is LimitModelKind.CARREAU:
            m0 = constitutive.mobility(0.0, self.params, self.quad)
            return m0 * self.mesh.fluid_area
        return 1.0  # power law: zero driving carries zero flux anyway

    def table(self, deltas):
        """Evaluate the law on a sequence of drivings; rows for CSV export.

        Each row is (delta_x, delta_y, flux_x, flux_y, iterations, residual).
        """
        rows = []
        for d in deltas:
            f, iters, residual = self.evaluate_with_diagnostics(np.asarray(d, dtype=float))
            rows.append((d[0], d[1], f[0], f[1], iters, residual))
        return rows


def effective_law(
    mesh: PeriodicMesh,
    kind: LimitModelKind,
    params: FluidParams,
    quad: MobilityQuadrature | None = None,
    *,
    cell_tol=1e-10,
    max_iter=200,
    cache_quantum=1e-6,
) -> EffectiveLaw:
    """Build the effective law selected by ``kind`` on the given cell mesh.

    ``kind`` must agree with ``limit_model_kind(params.r, params.gamma)``.
    Newtonian kinds solve the two linear cell problems once and store the
    permeability tensor; the nonlinear kinds defer to per-driving cell
    solves with caching.
    """
    expected = limit_model_kind(params.r, params.gamma)
    if kind is not expected:
        raise ParameterError(
            f"law kind {kind} inconsistent with (r={params.r}, gamma={params.gamma}); "
            f"expected {expected}"
        )
    if kind in (LimitModelKind.NEWTONIAN_ETA0, LimitModelKind.NEWTONIAN_ETA_INF):
        tensor, sols = permeability_tensor(mesh, tol=cell_tol, return_solutions=True)
        eta = params.eta0 if kind is LimitModelKind.NEWTONIAN_ETA0 else params.eta_inf
        law = EffectiveLaw(
            kind,
            mesh=mesh,
            params=params,
            matrix=tensor.matrix,
            eta=eta,
            linear_solutions=tuple(sols),
            cache_quantum=cache_quantum,
        )
        return law
    if kind is LimitModelKind.POWER_LAW:
        return EffectiveLaw(
            kind,
            mesh=mesh,
            params=params,
            r_prime=params.r_prime,
            prefactor=constitutive.powerlaw_prefactor(params),
            cell_tol=cell_tol,
            max_iter=max_iter,
            cache_quantum=cache_quantum,
        )
    return EffectiveLaw(
        kind,
        mesh=mesh,
        params=params,
        quad=quad or MobilityQuadrature(),
        cell_tol=cell_tol,
        max_iter=max_iter,
        cache_quantum=cache_quantum,
    )
