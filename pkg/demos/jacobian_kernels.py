"""
Kernels of Jacobians
====================

ker Jac F as a distribution, for F = z^2 on the line and F = z1*z2 on the plane.
"""

from levicore.distcore import core_iterate, jacobian_module, maximal_minors, support_ideal
from levicore.groebner import Ideal
from levicore.polycalc import Ring

Z = Ring(("z",))
M = jacobian_module([Z.parse("z^2")])
print("dF =", M)

# 2z dz kills nothing away from 0; at 0 the fiber is the whole line
trace = core_iterate(M)
for k, step in enumerate(trace.steps):
    print(f"step {k}: support ({', '.join(str(g) for g in step.support.generators) or '0'})")
print("stabilized at", trace.stabilized_at, "- trivial core:", trace.verdict)

C = Ring(("z1", "z2"))
N = jacobian_module([C.parse("z1*z2")])
# one form in two variables never has full rank, so the support is everything
print("support of", N, "=", support_ideal(N).ideal.gb() or "(0)")
# the rank drops where the Jacobian's 1x1 minors vanish
drop = Ideal(C, maximal_minors(N.matrix(), 2, C, size=1))
print("rank-drop locus:", [str(g) for g in drop.gb()])
t2 = core_iterate(N, max_steps=4)
print("stabilized at", t2.stabilized_at, "- trivial core:", t2.verdict)
