"""
A tour of the algebra kernel
============================

Parsing, Groebner bases, membership, radicals and elimination.
"""

from levicore.groebner import (
    Ideal,
    eliminate,
    ideal_dimension,
    ideal_membership,
    radical,
    radical_membership,
    saturate,
)
from levicore.polycalc import Ring

R = Ring(("x", "y", "z"))
p = R.parse("(x + y)^2 - 3/2*z")
print("p =", p, "| dp/dx =", p.diff("x"))

# twisted cubic
I = Ideal.parse(R, ["y - x^2", "z - x^3"])
print("basis:", [str(g) for g in I.gb()])
print("dimension:", ideal_dimension(I))
print("x*z - y^2 in I:", ideal_membership(R.parse("x*z - y^2"), I))

# a nonreduced ideal and its radical
J = Ideal.parse(R, ["x^2*y", "y^3*z"])
rad, status = radical(J)
print("radical:", [str(g) for g in rad.gb()], f"[{status}]")
print("x*y in sqrt(J):", radical_membership(R.parse("x*y"), J), "| in J:", ideal_membership(R.parse("x*y"), J))

# projecting the cubic to the (y, z) plane
print("cusp:", [str(g) for g in eliminate(I, ["x"]).gb()])

# removing a component
K = Ideal.parse(R, ["x*y", "x*z"])
print("(xy, xz) : (x)^inf =", [str(g) for g in saturate(K, Ideal.parse(R, ["x"])).gb()])
