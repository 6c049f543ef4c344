"""Effective Darcy-type flow of a Carreau fluid through a very thin porous medium.

The package decomposes the thin-film homogenized model into:

* :mod:`~thinporous.params` -- regime classification and scaling exponents;
* :mod:`~thinporous.constitutive` -- Carreau viscosity, its stress inverse,
  the through-thickness mobility and the power-law flux prefactor;
* :mod:`~thinporous.cellmesh` / :mod:`~thinporous.cellsolve` -- periodic
  cell problems on the perforated unit cell and the effective laws
  (permeability tensor, power-law and Carreau flux maps);
* :mod:`~thinporous.macro` -- the macroscale Darcy problem on a rectangle;
* :mod:`~thinporous.reconstruct` -- explicit through-thickness velocity
  profiles and 3D reconstruction;
* :mod:`~thinporous.oracle` -- independent brute-force reference solvers;
* :mod:`~thinporous.config` / :mod:`~thinporous.writers` /
  :mod:`~thinporous.cli` -- JSON configuration, CSV/VTK serialization and
  the command-line pipeline.
"""

from .cellmesh import CellGeometry, PeriodicMesh, build_cell_mesh, obstacle_indicator
from .cellsolve import (
    CellSolution,
    EffectiveLaw,
    PermeabilityTensor,
    carreau_flux,
    effective_law,
    permeability_tensor,
    powerlaw_flux,
    solve_carreau_cell,
    solve_linear_cell,
    solve_powerlaw_cell,
)
from .constitutive import (
    MobilityQuadrature,
    carreau_viscosity,
    mobility,
    powerlaw_prefactor,
    psi,
    reduced_viscosity_1d,
)
from .errors import (
    ConfigError,
    DomainError,
    GeometryError,
    NumericalError,
    ParameterError,
    ThinPorousError,
)
from .macro import (
    MacroProblem,
    MacroSolution,
    build_macro_mesh,
    flux_map_strategy,
    solve_linear_darcy,
    solve_nonlinear_darcy,
)
from .oracle import OracleReport, bvp_profile_oracle, dense_energy_cell_oracle, fd_gradient_check
from .params import (
    FluidParams,
    LimitModelKind,
    RegimeLabel,
    ScalingTable,
    classify_regime,
    limit_model_kind,
    scaling_table,
)
from .reconstruct import (
    Profile,
    carreau_profile,
    newtonian_profile,
    powerlaw_profile,
    reconstruct_velocity,
)

__version__ = "0.1.0"

__all__ = [
    "CellGeometry",
    "CellSolution",
    "ConfigError",
    "DomainError",
    "EffectiveLaw",
    "FluidParams",
    "GeometryError",
    "LimitModelKind",
    "MacroProblem",
    "MacroSolution",
    "MobilityQuadrature",
    "NumericalError",
    "OracleReport",
    "ParameterError",
    "PeriodicMesh",
    "PermeabilityTensor",
    "Profile",
    "RegimeLabel",
    "ScalingTable",
    "ThinPorousError",
    "build_cell_mesh",
    "build_macro_mesh",
    "bvp_profile_oracle",
    "carreau_flux",
    "carreau_profile",
    "carreau_viscosity",
    "classify_regime",
    "dense_energy_cell_oracle",
    "effective_law",
    "fd_gradient_check",
    "flux_map_strategy",
    "limit_model_kind",
    "mobility",
    "newtonian_profile",
    "obstacle_indicator",
    "permeability_tensor",
    "powerlaw_flux",
    "powerlaw_prefactor",
    "powerlaw_profile",
    "psi",
    "reconstruct_velocity",
    "reduced_viscosity_1d",
    "scaling_table",
    "solve_carreau_cell",
    "solve_linear_cell",
    "solve_linear_darcy",
    "solve_nonlinear_darcy",
    "solve_powerlaw_cell",
]
