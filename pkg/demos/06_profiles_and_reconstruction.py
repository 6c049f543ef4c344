"""
Through-thickness profiles and 3D reconstruction
================================================

The homogenized model keeps an explicit description of how the velocity
varies across the film: a parabola for Newtonian limits, a flattened plug
for the shear-thinning Carreau fluid, a sharpened profile for the power
law.  The independent boundary-value oracle reproduces the closed forms to
machine precision, and the limit 3D velocity can be sampled at any
(macro point, cell point, height) triple.
"""

from pathlib import Path

import numpy as np

from thinporous import (
    CellGeometry,
    FluidParams,
    LimitModelKind,
    MacroProblem,
    build_cell_mesh,
    build_macro_mesh,
    bvp_profile_oracle,
    carreau_profile,
    effective_law,
    newtonian_profile,
    powerlaw_profile,
    reconstruct_velocity,
    solve_linear_darcy,
    writers,
)
from thinporous.macro import force_rotational

out = Path(__file__).resolve().parent / "out"
out.mkdir(exist_ok=True)

g = np.array([1.0, 0.0])
z3 = np.linspace(0.0, 1.0, 9)
thinning = FluidParams(2.0, 1.0, 2.0, 1.5, 1.0)
thickening = FluidParams(2.0, 1.0, 2.0, 3.0, 1.0)

print("Profile of the x-velocity across the thickness (driving g = e1):")
newt = newtonian_profile(g, thinning.eta0, z3)[:, 0]
carr = carreau_profile(g, thinning, z3)[:, 0]
powr = powerlaw_profile(g, FluidParams(2.0, 1.0, 2.0, 3.0, 2.0), z3)[:, 0]
print("  z3       :", "  ".join(f"{v:7.3f}" for v in z3))
print("  newtonian:", "  ".join(f"{v:7.4f}" for v in newt))
print("  carreau  :", "  ".join(f"{v:7.4f}" for v in carr))
print("  power law:", "  ".join(f"{v:7.4f}" for v in powr))

print("\nOracle agreement (independent two-point boundary-value solve):")
for kind, params in (
    (LimitModelKind.CARREAU, thinning),
    (LimitModelKind.CARREAU, thickening),
):
    oracle = bvp_profile_oracle(g, params, kind, n=129)
    cand = carreau_profile(g, params, oracle.z3)
    print(
        f"  carreau (r = {params.r}): sup distance ="
        f" {oracle.sup_distance(cand):.2e}"
    )

print("\nReconstructing the limit 3D velocity above one macro point:")
cell = build_cell_mesh(CellGeometry.disk(0.25), 16)
law = effective_law(
    cell, LimitModelKind.NEWTONIAN_ETA0, FluidParams(2.0, 1.0, 2.0, 1.5, 0.0)
)
mesh = build_macro_mesh(1.0, 1.0, 8, 8)
sol = solve_linear_darcy(
    MacroProblem(mesh=mesh, force=force_rotational(mesh), law=law)
)
x = (0.31, 0.62)
for z in ((0.3, 0.1, 0.5), (0.0, 0.0, 0.5), (0.3, 0.1, 1.0)):
    u = reconstruct_velocity(sol, cell, law, x, z)
    tag = "obstacle" if z[:2] == (0.0, 0.0) else ("top wall" if z[2] == 1.0 else "mid-film")
    print(f"  u(x={x}, z={z}) = [{u[0]:+.5f} {u[1]:+.5f} {u[2]:+.1f}]   ({tag})")

# sample a vertical stack of horizontal slices on a small lattice and dump VTK
nz, nc = 9, 17
zs = np.linspace(0.0, 1.0, nz)
cs = np.linspace(-0.5, 0.5, nc)
vectors = np.array(
    [
        reconstruct_velocity(sol, cell, law, x, (c1, c2, z))
        for z in zs
        for c2 in cs
        for c1 in cs
    ]
)
writers.write_structured_points_vtk(
    out / "reconstruction.vtk",
    origin=(-0.5, -0.5, 0.0),
    spacing=(1.0 / (nc - 1), 1.0 / (nc - 1), 1.0 / (nz - 1)),
    dims=(nc, nc, nz),
    vectors=vectors,
)
print(f"\n  wrote {out / 'reconstruction.vtk'} ({nc}x{nc}x{nz} lattice)")

# optional figure when matplotlib is around
try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    pass
else:
    zf = np.linspace(0.0, 1.0, 201)
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.plot(newtonian_profile(g, thinning.eta0, zf)[:, 0], zf, label="newtonian (eta0)")
    ax.plot(carreau_profile(g, thinning, zf)[:, 0], zf, label="carreau, r = 1.5")
    ax.plot(
        powerlaw_profile(g, FluidParams(2.0, 1.0, 2.0, 3.0, 2.0), zf)[:, 0],
        zf,
        label="power law, r = 3",
    )
    ax.set_xlabel("horizontal velocity")
    ax.set_ylabel("height across the film")
    ax.legend(frameon=False)
    fig.tight_layout()
    fig.savefig(out / "profiles.png", dpi=150)
    print(f"  wrote {out / 'profiles.png'}")
