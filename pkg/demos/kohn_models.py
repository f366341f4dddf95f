"""
Kohn's algorithm on three rigid models
======================================

Re w + h(z) for h = |z|^2, |z|^4 and 0, then the containment check
against the Levi core chain.
"""

from levicore.kohn import build_rigid, check_core_containment, kohn_run
from levicore.polycalc import Ring
from levicore.traceio import emit_trace

C1 = Ring.complex(1)
models = {
    "strictly pseudoconvex": build_rigid(C1.parse("z1*zbar1")),
    "finite type": build_rigid(C1.parse("z1^2*zbar1^2"), [C1.parse("z1^2")]),
    "Levi-flat": build_rigid(C1.zero()),
}

for name, g in models.items():
    print(f"--- {name}: r = {g.r}")
    print(emit_trace(kohn_run(g), "text"), end="")

# |z|^4: the hermitian-square rule turns z1*zbar1 into its real and imaginary parts
t = kohn_run(models["finite type"])
print("added at step 1:", [str(q) for q in t.steps[1].hermitian])

# every Kohn generator vanishes where the Levi core chain says it should
for name, g in models.items():
    rep = check_core_containment(g, 2)
    print(f"containment for {name}: {'passed' if rep.passed else 'FAILED'} ({len(rep.entries)} checks)")
