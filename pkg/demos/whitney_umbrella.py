"""
The Whitney umbrella as the support of a distribution
=====================================================

Three 1-forms on Q^3 whose kernel is nonzero exactly on x^2 = y*z^2.
"""

from levicore.distcore import core_iterate, fiber_dimension, support_ideal
from levicore.forms import FormModule
from levicore.groebner import Ideal, variety_equal
from levicore.polycalc import Ring

R = Ring(("x", "y", "z"))
W = FormModule.parse(R, "x*dx - y*dz, z*dx + dy, z*dy + x*dz")
print("module:", W)

# the support is cut out by the 3x3 minors of the coefficient matrix
S = support_ideal(W)
print("support:", [str(g) for g in S.generators])
print("is the umbrella:", variety_equal(S.ideal, Ideal.parse(R, ["x^2 - y*z^2"])))

# same set, computed by saturating away the zero section and eliminating the fiber
T = support_ideal(W, "saturation")
print("saturation support agrees:", variety_equal(S.ideal, T.ideal))

# fibers jump along the handle and at the origin
for p in [(1, 0, 0), (2, 4, 1), (0, 5, 0), (0, 0, 0)]:
    print(f"fiber dimension at {p}: {fiber_dimension(W, p)}")

# derive until the kernel stops shrinking
trace = core_iterate(W, max_steps=10)
for k, step in enumerate(trace.steps):
    sup = ", ".join(str(g) for g in step.support.ideal.gb()) or "0"
    print(f"step {k} [{step.status}]: {len(step.module)} generators, support ({sup})")
print("stabilized at", trace.stabilized_at, "- core trivial:", trace.verdict)
