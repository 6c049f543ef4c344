"""
Carreau rheology, the stress inverse and the film mobility
==========================================================

The scalar ingredients of the effective laws: the Carreau viscosity curve,
the inverse function psi that converts shear stress into an effective
viscosity, and the mobility M(s) obtained by averaging 1/psi across the film
thickness.  The shear-thinning branch (1 < r < 2) gains mobility with
driving strength; the shear-thickening branch (r > 2) loses it.
"""

import numpy as np

from thinporous import FluidParams, carreau_viscosity, mobility, psi
from thinporous.constitutive import shear_rate_from_stress, shear_stress_1d

thinning = FluidParams(eta0=2.0, eta_inf=1.0, lam=2.0, r=1.5)
thickening = FluidParams(eta0=2.0, eta_inf=1.0, lam=2.0, r=3.0)

print("Carreau viscosity eta(s):")
s = np.array([0.0, 0.5, 1.0, 5.0, 50.0])
print("  s        :", "  ".join(f"{v:8.3f}" for v in s))
print("  r = 1.5  :", "  ".join(f"{v:8.4f}" for v in carreau_viscosity(s, thinning)))
print("  r = 3.0  :", "  ".join(f"{v:8.4f}" for v in carreau_viscosity(s, thickening)))

print("\npsi inverts the stress map tau(zeta) (round trip at machine precision):")
for tau in (1e-3, 1.0, 1e3):
    for params, label in ((thinning, "r=1.5"), (thickening, "r=3.0")):
        zeta = psi(tau, params)
        y = shear_rate_from_stress(tau, params)
        back = shear_stress_1d(y, params)
        print(
            f"  tau = {tau:8.1e} ({label}): psi = {zeta: .6f},"
            f"  |tau(psi(tau)) - tau| = {abs(back - tau):.2e}"
        )

print("\nMobility M(s), anchored at the Poiseuille value 1/(6 eta0):")
s = np.array([0.0, 1.0, 5.0, 20.0])
print("  s        :", "  ".join(f"{v:9.3f}" for v in s))
print("  r = 1.5  :", "  ".join(f"{v:9.6f}" for v in mobility(s, thinning)))
print("  r = 3.0  :", "  ".join(f"{v:9.6f}" for v in mobility(s, thickening)))
print(f"  bounds   : 1/(6 eta0) = {1/12:.6f}, 1/(6 eta_inf) = {1/6:.6f}")
