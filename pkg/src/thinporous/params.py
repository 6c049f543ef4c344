"""Constitutive parameters, regime classification and a priori scaling exponents.

The thin-film flow of a Carreau fluid through a vertically perforated layer
is controlled by three numbers: the obstacle-spacing exponent ``ell`` (the
obstacle period scales like the film thickness raised to ``ell``), the
viscosity scaling exponent ``gamma`` and the flow index ``r``.  This module
classifies ``ell`` into the thin-porous-medium regimes, maps ``(r, gamma)``
to the family of effective law that survives the thin-film limit, and
tabulates the a priori energy scaling exponents as exact rationals so that
classification on the critical boundaries (``ell = 1``, ``gamma = 1``) never
depends on floating-point comparisons.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .errors import ParameterError

__all__ = [
    "FluidParams",
    "RegimeLabel",
    "LimitModelKind",
    "ScalingTable",
    "classify_regime",
    "limit_model_kind",
    "scaling_table",
]


class RegimeLabel(Enum):
    """Thin porous medium regime, determined solely by the spacing exponent."""

    HTPM = "HTPM"  # obstacle period much smaller than film thickness (ell > 1)
    PTPM = "PTPM"  # proportional: period comparable to thickness (ell = 1)
    VTPM = "VTPM"  # very thin: period much larger than thickness (0 < ell < 1)


class LimitModelKind(Enum):
    """Family of the effective filtration law in the thin-film limit."""

    NEWTONIAN_ETA0 = "newtonian_eta0"
    NEWTONIAN_ETA_INF = "newtonian_eta_inf"
    CARREAU = "carreau"
    POWER_LAW = "power_law"


def _as_fraction(x, name):
    """Convert ``x`` to an exact Fraction; floats convert by binary value."""
    try:
        return Fraction(x)
    except (TypeError, ValueError) as exc:
        raise ParameterError(f"{name} must be a rational number, got {x!r}") from exc


@dataclass(frozen=True)
class FluidParams:
    """Carreau constitutive constants plus the viscosity scaling exponent.

    Attributes
    ----------
    eta0 : float
        Zero-shear viscosity (Pa*s in dimensional terms).
    eta_inf : float
        Infinite-shear viscosity; must satisfy ``0 < eta_inf < eta0``.
    lam : float
        Relaxation constant (the lambda of the Carreau law), ``lam > 0``.
    r : float
        Flow index, ``r > 1`` and ``r != 2``; ``1 < r < 2`` is
        pseudoplastic (shear-thinning), ``r > 2`` dilatant.
    gamma : float
        Exponent of the viscosity scaling with the film thickness.
    """

    eta0: float
    eta_inf: float
    lam: float
    r: float
    gamma: float = 1.0

    def __post_init__(self):
        if not (self.eta0 > self.eta_inf > 0.0):
            raise ParameterError(
                f"need eta0 > eta_inf > 0, got eta0={self.eta0}, eta_inf={self.eta_inf}"
            )
        if not self.lam > 0.0:
            raise ParameterError(f"need lam > 0, got {self.lam}")
        if not (self.r > 1.0 and self.r != 2.0):
            raise ParameterError(f"need r > 1 and r != 2, got r={self.r}")

    @property
    def r_prime(self):
        """Conjugate exponent r/(r-1), so that 1/r + 1/r' = 1."""
        return self.r / (self.r - 1.0)

    def limit_model(self):
        """Effective-law family selected by (r, gamma)."""
        return limit_model_kind(self.r, self.gamma)


def classify_regime(ell):
    """Classify the spacing exponent ``ell`` into HTPM / PTPM / VTPM.

    The comparison against the critical value 1 is exact (rational
    arithmetic); ``ell`` may be an int, float, Fraction or numeric string.
    """
    ell = _as_fraction(ell, "ell")
    if ell <= 0:
        raise ParameterError(f"ell must be positive, got {ell}")
    if ell > 1:
        return RegimeLabel.HTPM
    if ell == 1:
        return RegimeLabel.PTPM
    return RegimeLabel.VTPM


def limit_model_kind(r, gamma):
    """Map the flow index and scaling exponent to the limit-model family.

    For every admissible ``r``, ``gamma < 1`` gives the zero-shear Newtonian
    law and ``gamma = 1`` the Carreau law.  For ``gamma > 1`` the high-shear
    behaviour takes over: infinite-shear Newtonian when ``1 < r < 2``,
    power law when ``r > 2``.
    """
    r = _as_fraction(r, "r")
    gamma = _as_fraction(gamma, "gamma")
    if r <= 1 or r == 2:
        raise ParameterError(f"need r > 1 and r != 2, got r={r}")
    if gamma < 1:
        return LimitModelKind.NEWTONIAN_ETA0
    if gamma == 1:
        return LimitModelKind.CARREAU
    return LimitModelKind.NEWTONIAN_ETA_INF if r < 2 else LimitModelKind.POWER_LAW


@dataclass(frozen=True)
class ScalingTable:
    """A priori scaling exponents of the velocity, stored as exact rationals.

    ``l2_thin`` / ``l2_unit`` hold the exponents of the L2 bounds of
    (velocity, full gradient, symmetrized gradient) in the physical thin
    domain and in the unit-height rescaled domain.  For ``r > 2`` the sharper
    Lr bounds are available in ``lr_thin`` / ``lr_unit`` (``None`` for
    ``1 < r < 2``).  ``normalization`` is the exponent nu such that the
    rescaled velocity, multiplied by thickness**nu, converges to the limit
    velocity.
    """

    r: Fraction
    gamma: Fraction
    l2_thin: tuple
    l2_unit: tuple
    lr_thin: tuple | None
    lr_unit: tuple | None
    normalization: Fraction

    def rows(self):
        """Yield (label, exponent-triple) pairs for display, in fixed order."""
        yield "l2_thin", self.l2_thin
        yield "l2_unit", self.l2_unit
        if self.lr_thin is not None:
            yield "lr_thin", self.lr_thin
            yield "lr_unit", self.lr_unit


def scaling_table(r, gamma):
    """Exact scaling exponents of the velocity bounds for given (r, gamma).

    All arithmetic is rational; recomputing any entry from the closed-form
    exponent formulas reproduces it bit for bit.
    """
    r = _as_fraction(r, "r")
    gamma = _as_fraction(gamma, "gamma")
    if r <= 1 or r == 2:
        raise ParameterError(f"need r > 1 and r != 2, got r={r}")

    l2_thin = (Fraction(5, 2) - gamma, Fraction(3, 2) - gamma, Fraction(3, 2) - gamma)
    l2_unit = (2 - gamma, 1 - gamma, 1 - gamma)

    lr_thin = lr_unit = None
    if r > 2:
        if gamma < 1:
            base = -Fraction(2, 1) / r * (gamma - 1)
        elif gamma > 1:
            base = -(gamma - 1) / (r - 1)
        else:
            base = Fraction(0)
        lr_thin = (base + (r + 1) / r, base + 1 / r, base + 1 / r)
        lr_unit = (base + 1, base, base)

    if r > 2 and gamma >= 1:
        normalization = (gamma - r) / (r - 1)  # equals -1 at gamma = 1
    else:
        normalization = gamma - 2

    return ScalingTable(
        r=r,
        gamma=gamma,
        l2_thin=l2_thin,
        l2_unit=l2_unit,
        lr_thin=lr_thin,
        lr_unit=lr_unit,
        normalization=normalization,
    )
