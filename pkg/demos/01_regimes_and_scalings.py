"""
Flow regimes and a priori scalings
==================================

A thin film of thickness eps is perforated by vertical cylinders of period
eps**ell.  The spacing exponent ell decides which homogenized description
survives as eps -> 0, and the pair (r, gamma) -- flow index and viscosity
scaling exponent -- decides whether the effective filtration law is linear,
Carreau, or a power law.  Everything here is exact rational arithmetic.
"""

from fractions import Fraction

from thinporous import classify_regime, limit_model_kind, scaling_table

print("Regime as a function of the spacing exponent ell:")
for ell in (Fraction(1, 4), Fraction(1, 2), Fraction(9, 10), 1, Fraction(3, 2), 2):
    print(f"  ell = {str(ell):>4}  ->  {classify_regime(ell).value}")

print("\nLimit-model family over the (r, gamma) plane:")
print(f"  {'':>10} " + " ".join(f"{g:>18}" for g in ("gamma=0", "gamma=1", "gamma=2")))
for r in (Fraction(3, 2), Fraction(5, 2), 3):
    row = [limit_model_kind(r, g).value for g in (0, 1, 2)]
    print(f"  r = {str(r):>6} " + " ".join(f"{v:>18}" for v in row))

print("\nVelocity scaling exponents (thin domain / unit-height domain):")
for r, gamma in ((Fraction(3, 2), 1), (3, 1), (3, 2)):
    table = scaling_table(r, gamma)
    print(f"  r = {r}, gamma = {gamma}:")
    for label, (vel, grad, sym) in table.rows():
        print(f"    {label:8}  velocity {str(vel):>5}  gradient {str(grad):>5}  sym-gradient {str(sym):>5}")
    print(f"    normalization exponent: {table.normalization}")
