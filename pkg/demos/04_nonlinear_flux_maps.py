"""
Nonlinear effective laws: power-law and Carreau flux maps
=========================================================

Outside the Newtonian limits, the cell problem itself is nonlinear and the
effective law becomes a flux map: driving vector in, filtration flux out.
The power-law map is homogeneous of degree r' - 1 and monotone; the Carreau
map interpolates between the two Newtonian permeabilities as the driving
strength grows.
"""

import numpy as np

from thinporous import (
    CellGeometry,
    FluidParams,
    LimitModelKind,
    build_cell_mesh,
    effective_law,
    permeability_tensor,
)

mesh = build_cell_mesh(CellGeometry.disk(0.25), 32)

print("Power-law flux map U (r = 3, so r' = 1.5):")
pow_params = FluidParams(eta0=2.0, eta_inf=1.0, lam=2.0, r=3.0, gamma=2.0)
law = effective_law(mesh, LimitModelKind.POWER_LAW, pow_params)
d = np.array([1.0, 0.0])
f1 = law.evaluate(d)
print(f"  law({d}) = {f1}")
for t in (0.5, 2.0, 10.0):
    ft = law.evaluate(t * d)
    print(
        f"  law({t:4.1f} * delta) = {ft},  homogeneity deviation ="
        f" {np.linalg.norm(ft - t**0.5 * f1):.2e}"
    )

print("\nCarreau flux map F compared against the Newtonian envelopes:")
car_params = FluidParams(eta0=2.0, eta_inf=1.0, lam=2.0, r=1.5, gamma=1.0)
car = effective_law(mesh, LimitModelKind.CARREAU, car_params)
A = permeability_tensor(mesh).matrix
for mag in (0.01, 1.0, 10.0, 100.0):
    d = np.array([mag, 0.0])
    F = car.evaluate(d)
    lo = (A @ d)[0] / (6.0 * car_params.eta0)  # zero-shear envelope
    hi = (A @ d)[0] / (6.0 * car_params.eta_inf)  # infinite-shear envelope
    print(
        f"  |delta| = {mag:6.2f}: F_x = {F[0]:10.5f}"
        f"   (Newtonian bounds [{lo:10.5f}, {hi:10.5f}])"
    )

print("\nOddness and square-symmetry equivariance of the maps:")
d = np.array([0.8, 0.3])
rot = np.array([[0.0, -1.0], [1.0, 0.0]])
print(f"  |F(-d) + F(d)|        = {np.abs(car.evaluate(-d) + car.evaluate(d)).max():.2e}")
print(
    "  |F(R d) - R F(d)|     ="
    f" {np.abs(car.evaluate(rot @ d) - rot @ car.evaluate(d)).max():.2e}"
)
