"""Kohn's multiplier-ideal algorithm for polynomial defining functions.

The ambient space is ``Ring.complex(N)``; a defining function ``r`` is a
hermitian polynomial (fixed by the conjugation).  Ideals are formed
globally in the complexified ring, and termination means 1 lies in I_k.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Sequence

from .distcore import DerivationTrace, core_iterate
from .forms import (
    FormModule,
    KForm,
    antiholomorphic_derivative,
    holomorphic_derivative,
    top_coefficient,
    wedge,
)
from .groebner import (
    EXACT,
    FALLBACK,
    BudgetExceeded,
    Ideal,
    current_budget,
    hermitian_square_parts,
    radical,
    radical_membership,
)
from .polycalc import Polynomial, Ring, RingMismatch

__all__ = [
    "DefiningGerm",
    "Determinant",
    "KohnStep",
    "KohnTrace",
    "ContainmentEntry",
    "ContainmentReport",
    "build_rigid",
    "levi_module",
    "kohn_initial",
    "allowable_determinants",
    "kohn_step",
    "kohn_run",
    "check_core_containment",
]


@dataclass(frozen=True)
class DefiningGerm:
    """A hermitian defining polynomial, with the rigid data it came from, if any."""

    ring: Ring
    r: Polynomial
    h: Polynomial | None = None
    F: tuple[Polynomial, ...] | None = None

    def __post_init__(self):
        if not self.ring.is_complexified:
            raise ValueError("a defining germ needs a complexified ring")
        if self.r.ring != self.ring:
            raise RingMismatch("r lives in a different ring")
        if self.r.bar() != self.r:
            raise ValueError(f"defining function {self.r} is not hermitian")
        if self.F is not None:
            if self.h is None:
                raise ValueError("F given without h")
            total = self.ring.zero()
            for f in self.F:
                total = total + f * f.bar()
            if total != self.h:
                raise ValueError("h differs from the sum of |F_i|^2")

    @property
    def dimension(self) -> int:
        """Ambient complex dimension."""
        return len(self.ring.holomorphic)

    @property
    def squares(self) -> tuple:
        """Recorded sums of hermitian squares, for the hermitian-square rule."""
        if self.F is None:
            return ()
        return ((self.h, tuple(self.F)),)


def build_rigid(h: Polynomial, F: Sequence[Polynomial] | None = None) -> DefiningGerm:
    """r = (z_{n+1} + zbar_{n+1})/2 + h(z', zbar') for h in ``Ring.complex(n)``."""
    src = h.ring
    if not src.is_complexified:
        raise ValueError("h must live in a complexified ring")
    n = len(src.holomorphic)
    ring = Ring.complex(n + 1)
    try:
        hh = h.to_ring(ring)
        FF = None if F is None else tuple(f.to_ring(ring) for f in F)
    except RingMismatch as exc:
        raise ValueError(f"h must use the variables of {Ring.complex(n)}: {exc}") from None
    if hh.bar() != hh:
        raise ValueError(f"h = {h} is not hermitian")
    last = ring.var(f"z{n + 1}") + ring.var(f"zbar{n + 1}")
    r = last * Fraction(1, 2) + hh
    return DefiningGerm(ring, r, hh, FF)


def _levi_form(r: Polynomial) -> KForm:
    return holomorphic_derivative(antiholomorphic_derivative(r))


def levi_module(g: DefiningGerm) -> FormModule:
    """Module of 1-forms whose kernel is the Levi-null distribution.

    Generators: del r, delbar r, the contractions sum_k r_{z_k zbar_j} dz_k and
    their conjugates sum_k r_{z_j zbar_k} dzbar_k, and r dz_j, r dzbar_j.
    """
    ring, r = g.ring, g.r
    hol, anti = ring.holomorphic, ring.antiholomorphic
    gens = [holomorphic_derivative(r), antiholomorphic_derivative(r)]
    for j, jb in zip(hol, anti):
        rj = r._diff_index(jb)
        gens.append(KForm(ring, 1, {(k,): rj._diff_index(k) for k in hol}))
    for j, jb in zip(hol, anti):
        rj = r._diff_index(j)
        gens.append(KForm(ring, 1, {(kb,): rj._diff_index(kb) for kb in anti}))
    for i in range(ring.nvars):
        gens.append(KForm(ring, 1, {(i,): r}))
    return FormModule(ring, gens)


def _wedge_power(a: KForm, k: int, ring: Ring) -> KForm:
    out = KForm.function(ring.one())
    for _ in range(k):
        out = wedge(out, a)
    return out


def _base_form(g: DefiningGerm, j: int) -> KForm:
    n = g.dimension
    r = g.r
    b = wedge(holomorphic_derivative(r), antiholomorphic_derivative(r))
    return wedge(b, _wedge_power(_levi_form(r), n - 1 - j, g.ring))


def kohn_initial(g: DefiningGerm) -> Ideal:
    """(r, coefficient of del r ^ delbar r ^ (del delbar r)^(n-1))."""
    return Ideal(g.ring, [g.r, top_coefficient(_base_form(g, 0))])


@dataclass(frozen=True)
class Determinant:
    value: Polynomial
    j: int
    tuple: tuple[str, ...]


def _with_products(gens: Sequence[Polynomial], depth: int) -> list[tuple[Polynomial, str]]:
    out = [(f, str(f)) for f in gens]
    if depth >= 2:
        for a, b in combinations_with_replacement(range(len(gens)), 2):
            out.append((gens[a] * gens[b], f"({gens[a]})*({gens[b]})"))
    return out


def allowable_determinants(
    g: DefiningGerm,
    gens: Sequence[Polynomial],
    j: int,
    product_depth: int = 1,
    with_provenance: bool = False,
):
    """Top coefficients of del f_1 ^ delbar f_1 ^ ... ^ del f_j ^ delbar f_j ^ del r ^ delbar r ^ (del delbar r)^(n-1-j).

    The f_i range over j-tuples (with repetition) of ``gens``; with
    ``product_depth`` 2 the pairwise products of generators join the pool.
    Zero determinants are dropped.
    """
    n = g.dimension
    if not 1 <= j <= n - 1:
        raise ValueError(f"j must lie in 1..{n - 1}, got {j}")
    pool = _with_products(list(gens), product_depth)
    base = _base_form(g, j)
    pieces = [wedge(holomorphic_derivative(f), antiholomorphic_derivative(f)) for f, _ in pool]
    cap = current_budget().max_tuples
    out = []
    count = 0
    for combo in combinations_with_replacement(range(len(pool)), j):
        count += 1
        if count > cap:
            raise BudgetExceeded("determinant tuples", cap)
        w = base
        for i in combo:
            w = wedge(pieces[i], w)
            if not w:
                break
        if not w:
            continue
        c = top_coefficient(w)
        if c:
            out.append(Determinant(c, j, tuple(pool[i][1] for i in combo)))
    return out if with_provenance else [d.value for d in out]


@dataclass(frozen=True)
class KohnStep:
    ideal: Ideal
    determinants: tuple[Determinant, ...] = ()
    status: str = EXACT
    hermitian: tuple[Polynomial, ...] = ()


@dataclass
class KohnTrace:
    germ: DefiningGerm
    steps: list[KohnStep] = field(default_factory=list)
    terminated: bool = False
    step_of_termination: int | None = None
    stalled_at: int | None = None
    cap_hit: bool = False
    product_depth: int = 1

    @property
    def verdict(self) -> str:
        if self.terminated:
            return "terminated"
        if self.stalled_at is not None:
            return "stalled"
        return "unknown"


def _dedupe(polys) -> list[Polynomial]:
    out, seen = [], set()
    for p in polys:
        if not p:
            continue
        q = p.primitive()
        if q not in seen:
            seen.add(q)
            out.append(q)
    return out


def kohn_step(g: DefiningGerm, I: Ideal, product_depth: int = 1) -> tuple[Ideal, str]:
    """One step: radical of I plus the allowable determinants, with the hermitian-square rule."""
    step = _kohn_step(g, I, product_depth)
    return step.ideal, step.status


def _kohn_step(g: DefiningGerm, I: Ideal, product_depth: int) -> KohnStep:
    ring = g.ring
    gens = list(I.generators)
    dets: list[Determinant] = []
    for j in range(1, g.dimension):
        dets.extend(allowable_determinants(g, gens, j, product_depth, with_provenance=True))
    J = Ideal(ring, gens + [d.value for d in dets])
    V, status = radical(J)
    if status == FALLBACK:
        V = Ideal(ring, V.gb())
    parts: list[Polynomial] = []
    for f in tuple(J.generators) + tuple(V.gb()):
        for q in hermitian_square_parts(f, g.squares):
            if q not in parts:
                parts.append(q)
    base = Ideal(ring, _dedupe(gens + parts))
    if parts:
        V2, st2 = radical(V + parts)
        if st2 == EXACT:
            V, status = V2, EXACT
        else:
            V = Ideal(ring, (V + parts).gb())
    extra = [v for v in V.gb() if not base.contains(v)]
    if any(v.is_constant() for v in V.gb()):
        extra = [ring.one()]
    nxt = Ideal(ring, _dedupe(gens + parts + extra))
    return KohnStep(nxt, tuple(dets), status, tuple(p for p in parts if not I.contains(p)))


def kohn_run(g: DefiningGerm, max_steps: int = 16, product_depth: int = 1) -> KohnTrace:
    """Iterate Kohn steps from I_0 until 1 in I_k, a fixed point, or the cap.

    A fixed point is a step whose ideal has the same zero set and the same
    stored generators as its predecessor, so every later step would repeat it.
    """
    trace = KohnTrace(g, product_depth=product_depth)
    try:
        I0 = kohn_initial(g)
        det0 = I0.generators[1:] if len(I0.generators) > 1 else ()
        trace.steps.append(
            KohnStep(I0, tuple(Determinant(d, 0, ("r",)) for d in det0), EXACT, ())
        )
        if I0.is_unit():
            trace.terminated, trace.step_of_termination = True, 0
            return trace
        cur = I0
        for k in range(1, max_steps + 1):
            step = _kohn_step(g, cur, product_depth)
            trace.steps.append(step)
            nxt = step.ideal
            if nxt.is_unit():
                trace.terminated, trace.step_of_termination = True, k
                return trace
            if {f.primitive() for f in nxt.generators} == {f.primitive() for f in cur.generators}:
                trace.stalled_at = k
                return trace
            cur = nxt
        trace.cap_hit = True
        return trace
    except BudgetExceeded as exc:
        exc.partial = trace
        raise


@dataclass(frozen=True)
class ContainmentEntry:
    k: int
    generator: Polynomial
    passed: bool


@dataclass
class ContainmentReport:
    depth: int
    kohn: KohnTrace
    core: DerivationTrace
    entries: list[ContainmentEntry] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(e.passed for e in self.entries)

    @property
    def failures(self) -> list[ContainmentEntry]:
        return [e for e in self.entries if not e.passed]


def check_core_containment(g: DefiningGerm, depth: int, product_depth: int = 1) -> ContainmentReport:
    """Check I_k inside the ideal of the step-k support of the Levi core chain, for k <= depth.

    The core chain runs on :func:`levi_module` with the hermitian-square rule
    (vanishing at real points).  Each generator f of I_k is tested for
    membership in the radical of (vanishing ideal of the step-k support, r).
    Past the end of either chain its last step is reused.
    """
    kt = kohn_run(g, max_steps=depth, product_depth=product_depth)
    ct = core_iterate(levi_module(g), max_steps=depth, hermitian=True, squares=g.squares)
    report = ContainmentReport(depth, kt, ct)
    for k in range(depth + 1):
        I = kt.steps[min(k, len(kt.steps) - 1)].ideal
        Z = ct.steps[min(k, len(ct.steps) - 1)].vanishing + [g.r]
        for f in I.generators:
            report.entries.append(ContainmentEntry(k, f, radical_membership(f, Z)))
    return report
