"""Supports, derived modules and the core iteration for modules of 1-forms.

A module R of 1-forms over a polynomial ring presents the distribution
D = ker R.  Its support is cut out by the maximal minors of the coefficient
matrix; the derived module adds the differentials of the functions that
vanish on the support; iterating until the kernel variety stops shrinking
yields the core.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Mapping, Sequence

from . import _linalg
from .forms import FormModule, KForm, exterior_derivative, pullback
from .groebner import (
    EXACT,
    FALLBACK,
    BudgetExceeded,
    Ideal,
    current_budget,
    eliminate,
    exact_divide,
    hermitian_square_parts,
    intersect,
    normal_form,
    radical,
    radical_membership,
    saturate,
)
from .polycalc import Polynomial, Ring, RingMismatch

__all__ = [
    "SupportIdeal",
    "DistributionVariety",
    "DerivationStep",
    "DerivationTrace",
    "maximal_minors",
    "support_ideal",
    "tangent_module",
    "derived_module",
    "kernel_variety",
    "fiber_dimension",
    "core_iterate",
    "is_core_trivial",
    "change_coordinates",
    "jacobian_module",
    "UNKNOWN",
]

UNKNOWN = "unknown"
MINORS, SATURATION = "minors", "saturation"


@dataclass(frozen=True)
class SupportIdeal:
    """Ideal of the support of a module, tagged with how it was computed."""

    ideal: Ideal
    provenance: str = MINORS

    @property
    def generators(self) -> tuple[Polynomial, ...]:
        return self.ideal.generators

    def is_empty(self) -> bool:
        """True when the support is the empty set (the ideal is the unit ideal)."""
        return self.ideal.is_unit()


# ----------------------------------------------------------------------
# minors


def _is_multiple(a: list[Polynomial], b: list[Polynomial]) -> bool:
    """True if row ``a`` is a polynomial multiple of row ``b``."""
    j = next(i for i, x in enumerate(b) if x)
    if not a[j]:
        return False
    try:
        q = exact_divide(a[j], b[j])
    except ValueError:
        return False
    return all(x == q * y for x, y in zip(a, b))


def _row_weight(row):
    return (sum(p.total_degree() for p in row if p), sum(len(p.terms) for p in row), [str(p) for p in row])


def _minors_by_expansion(rows: list[list[Polynomial]], k: int, ring: Ring, red=None) -> list[Polynomial]:
    """All k x k minors of a (m x k) matrix, by Laplace expansion along columns."""
    m = len(rows)
    cap = current_budget().max_minors
    table: dict[tuple[int, ...], Polynomial] = {(): ring.one()}
    for t in range(1, k + 1):
        col = t - 1
        count = 0
        nxt: dict[tuple[int, ...], Polynomial] = {}
        for S in combinations(range(m), t):
            acc = ring.zero()
            for pos, i in enumerate(S):
                entry = rows[i][col]
                if not entry:
                    continue
                sub = table.get(S[:pos] + S[pos + 1 :])
                if not sub:
                    continue
                term = entry * sub
                acc = acc - term if (pos + t - 1) % 2 else acc + term
            if red is not None and acc:
                acc = red(acc)
            if acc:
                nxt[S] = acc
            count += 1
            if count > cap:
                raise BudgetExceeded("minor count", cap)
        table = nxt
    return list(table.values())


def maximal_minors(
    rows: Sequence[Sequence[Polynomial]],
    ncols: int,
    ring: Ring,
    size: int | None = None,
    modulo: Ideal | None = None,
) -> list[Polynomial]:
    """Generators of the ideal of ``size`` x ``size`` minors (default: ``ncols``).

    The ideal is computed up to equality, not minor by minor.  Rows with a
    single nonzero entry are grouped by column: with C_j the ideal of their
    entries in column j and M the remaining rows, the ideal of maximal minors
    is the sum over column sets T of prod_{j in T} C_j times the maximal
    minors of M restricted to the columns outside T.  For the rest, a nonzero
    constant entry is used as a pivot (the ideal is invariant under
    invertible row and column operations) and rows that are polynomial
    multiples of other rows are dropped.

    With ``modulo`` = W the result generates the minors ideal only up to W:
    entries and intermediate minors are reduced modulo W, which leaves
    W + (minors) unchanged because minors are polynomial in the entries.
    """
    k = ncols if size is None else size
    red = None
    if modulo is not None and modulo.generators:
        # no rescaling here: entries and partial minors feed into sums
        red = lambda p: normal_form(p, modulo) if p else p  # noqa: E731
        rows = [[red(a) for a in r] for r in rows]
    rows = [list(r) for r in rows if any(r)]
    if k == 0:
        return [ring.one()]
    if k > ncols or len(rows) < k:
        return []
    if k < ncols:
        out: list[Polynomial] = []
        for cols in combinations(range(ncols), k):
            out.extend(_full_minors([[r[c] for c in cols] for r in rows], k, ring, {}, red))
        return _dedupe(out)
    return _dedupe(_full_minors(rows, k, ring, {}, red))


def _full_minors(rows: list[list[Polynomial]], k: int, ring: Ring, memo: dict, red=None) -> list[Polynomial]:
    rows = [r for r in rows if any(r)]
    if k == 0:
        return [ring.one()]
    if len(rows) < k:
        return []
    cols_of: dict[int, list[Polynomial]] = {}
    general = []
    for r in rows:
        nz = [j for j, x in enumerate(r) if x]
        if len(nz) == 1:
            cols_of.setdefault(nz[0], []).append(r[nz[0]])
        else:
            general.append(r)
    if not cols_of:
        return _pivot_minors(general, k, ring, red)
    unit_cols = sorted(cols_of)
    coeff = {j: _compress(cols_of[j], ring) for j in unit_cols}
    out: list[Polynomial] = []
    for t in range(0, len(unit_cols) + 1):
        for T in combinations(unit_cols, t):
            rest = [c for c in range(k) if c not in T]
            sub = [[r[c] for c in rest] for r in general]
            minors = _full_minors(sub, k - t, ring, memo, red) if rest else [ring.one()]
            if not minors:
                continue
            prod = _ideal_product([coeff[j] for j in T], ring, memo)
            out.extend(a * b if red is None else red(a * b) for a in prod for b in minors)
    return _dedupe(out)


def _compress(polys: list[Polynomial], ring: Ring) -> tuple[Polynomial, ...]:
    polys = _dedupe(polys)
    if any(p.is_constant() for p in polys):
        return (ring.one(),)
    if len(polys) <= 1:
        return tuple(polys)
    return Ideal(ring, polys).gb()


def _ideal_product(ideals: list[tuple[Polynomial, ...]], ring: Ring, memo: dict) -> tuple[Polynomial, ...]:
    key = tuple(ideals)
    if key in memo:
        return memo[key]
    acc: tuple[Polynomial, ...] = (ring.one(),)
    for gens in ideals:
        if len(gens) == 1 and gens[0].is_constant():
            continue
        acc = _compress([a * b for a in acc for b in gens], ring)
    memo[key] = acc
    return acc


def _pivot_minors(rows: list[list[Polynomial]], k: int, ring: Ring, red=None) -> list[Polynomial]:
    while k:
        piv = None
        for i, r in enumerate(rows):
            for j, x in enumerate(r):
                if x and x.is_constant():
                    piv = (i, j)
                    break
            if piv:
                break
        if piv is None:
            break
        i, j = piv
        prow = rows.pop(i)
        pc = Fraction(prow[j].constant_value())
        new = []
        for r in rows:
            if r[j]:
                f = r[j] * (1 / pc)
                r = [a - f * b for a, b in zip(r, prow)]
                if red is not None:
                    r = [red(a) for a in r]
            r = r[:j] + r[j + 1 :]
            if any(r):
                new.append(r)
        rows = new
        k -= 1
        if len(rows) < k:
            return []
        if k and any(sum(1 for x in r if x) == 1 for r in rows):
            return _full_minors(rows, k, ring, {}, red)
    if k == 0:
        return [ring.one()]
    rows.sort(key=_row_weight)
    kept: list[list[Polynomial]] = []
    for r in rows:
        if not any(_is_multiple(r, b) for b in kept):
            kept.append(r)
    if len(kept) < k:
        return []
    return _minors_by_expansion(kept, k, ring, red)


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


def support_ideal(R: FormModule, method: str = MINORS) -> SupportIdeal:
    """Ideal of the points where the fiber of ker R is nonzero.

    ``minors``: the n x n minors of the coefficient matrix (zero ideal when
    there are fewer generators than covectors).  ``saturation``: the
    projection of the kernel variety with the zero section removed.
    """
    if method == SATURATION:
        return kernel_variety(R).projected_support()
    if method != MINORS:
        raise ValueError(f"unknown support method {method!r}")
    ring = R.ring
    n = ring.nvars
    if len(R.generators) < n:
        return SupportIdeal(Ideal(ring), MINORS)
    return SupportIdeal(Ideal(ring, maximal_minors(R.matrix(), n, ring)), MINORS)


# ----------------------------------------------------------------------
# tangent and derived modules


def tangent_module(I: Ideal) -> FormModule:
    """Module generated by df_i and f_i dx_j over the generators f_i of I."""
    ring = I.ring
    gens: list[KForm] = []
    for f in I.generators:
        gens.append(exterior_derivative(f))
    for f in I.generators:
        for j in range(ring.nvars):
            gens.append(KForm(ring, 1, {(j,): f}))
    return FormModule(ring, gens)


@dataclass(frozen=True)
class _Derivation:
    module: FormModule
    support: SupportIdeal
    vanishing: Ideal
    status: str
    hermitian: tuple[Polynomial, ...]


def _derive(R: FormModule, hints=None, hermitian: bool = False, squares=(), support=None) -> _Derivation:
    S = support if support is not None else support_ideal(R)
    V, status = radical(S.ideal, hints)
    if status == FALLBACK:
        V = Ideal(R.ring, V.gb())
    added: list[Polynomial] = []
    if hermitian and R.ring.is_complexified:
        for f in tuple(V.gb()) + S.generators:
            for q in hermitian_square_parts(f, squares):
                if q not in added and not V.contains(q):
                    added.append(q)
        if added:
            V2, st2 = radical(V + added)
            # an exact radical of the enlarged ideal contains the radical of
            # the support, so the step no longer counts as a fallback
            if st2 == EXACT:
                V, status = V2, EXACT
            else:
                V = Ideal(R.ring, (V + added).gb())
    return _Derivation(R.union(tangent_module(V)), S, V, status, tuple(added))


def derived_module(R: FormModule, radical_hints=None, hermitian: bool = False, squares=()) -> tuple[FormModule, str]:
    """R together with the tangent module of the (radical of the) support of R.

    The status is the one reported by :func:`radical`.  With ``hermitian`` set
    (complexified rings only) the vanishing ideal is enlarged by the real and
    imaginary parts of hermitian squares among its generators, which encodes
    vanishing at the real points of the support.
    """
    d = _derive(R, radical_hints, hermitian, squares)
    return d.module, d.status


# ----------------------------------------------------------------------
# kernel varieties


def _fiber_names(ring: Ring, n: int) -> tuple[str, ...]:
    taken = set(ring.variables)
    for stem in ("v", "w", "u", "fv"):
        names = tuple(f"{stem}{i + 1}" for i in range(n))
        if not taken & set(names):
            return names
    k = 0
    while True:
        names = tuple(f"fv{k}_{i + 1}" for i in range(n))
        if not taken & set(names):
            return names
        k += 1


@dataclass(frozen=True)
class DistributionVariety:
    """The distribution as the subvariety {sum_i a_ji(x) v_i = 0} of the tangent bundle."""

    base_ring: Ring
    fiber: tuple[str, ...]
    ring: Ring
    ideal: Ideal

    def fiber_vars(self) -> list[Polynomial]:
        return [self.ring.var(v) for v in self.fiber]

    def is_v_linear(self) -> bool:
        idx = [self.ring.index(v) for v in self.fiber]
        return all(sum(e[i] for i in idx) == 1 for g in self.ideal.generators for e in g.terms)

    def saturated(self, method: str = "rabinowitsch") -> Ideal:
        """J : (v_1, ..., v_n)^infinity, the closure of D minus the zero section."""
        return saturate(self.ideal, Ideal(self.ring, self.fiber_vars()), method)

    def projected_support(self) -> SupportIdeal:
        """Elimination of the fiber variables from the saturated ideal.

        Elimination commutes with intersection, so the saturation by each v_i
        is projected separately and the projections are intersected in the
        base ring.
        """
        base = self.base_ring
        if self.ideal.is_zero():
            return SupportIdeal(Ideal(base), SATURATION)
        out = None
        for v in self.fiber_vars():
            S = saturate(self.ideal, Ideal(self.ring, [v]))
            E = eliminate(S, self.fiber)
            P = Ideal(base, [g.to_ring(base) for g in E.generators])
            out = P if out is None else intersect(out, P)
        return SupportIdeal(Ideal(base, out.gb()), SATURATION)


def kernel_variety(R: FormModule) -> DistributionVariety:
    ring = R.ring
    fiber = _fiber_names(ring, ring.nvars)
    big = Ring(ring.variables + fiber, ring.involution)
    vs = [big.var(v) for v in fiber]
    gens = []
    for g in R.generators:
        acc = big.zero()
        for a, v in zip(g.coefficients(), vs):
            if a:
                acc = acc + a.to_ring(big) * v
        gens.append(acc)
    return DistributionVariety(ring, fiber, big, Ideal(big, gens))


def fiber_dimension(R: FormModule, point: Sequence) -> int:
    """Dimension of the fiber of ker R at a rational point."""
    ring = R.ring
    n = ring.nvars
    if len(point) != n:
        raise ValueError(f"point has {len(point)} coordinates, ring has {n} variables")
    rows = [[Fraction(a(point)) for a in g.coefficients()] for g in R.generators]
    return n - (_linalg.rank(rows) if rows else 0)


# ----------------------------------------------------------------------
# core iteration


@dataclass(frozen=True)
class DerivationStep:
    module: FormModule
    support: SupportIdeal
    vanishing: Ideal
    status: str
    variety: DistributionVariety
    hermitian: tuple[Polynomial, ...] = ()


@dataclass
class DerivationTrace:
    ring: Ring
    steps: list[DerivationStep] = field(default_factory=list)
    stabilized_at: int | None = None
    cap_hit: bool = False

    @property
    def final(self) -> DerivationStep:
        return self.steps[-1]

    @property
    def core_module(self) -> FormModule:
        return self.final.module

    @property
    def verdict(self):
        return is_core_trivial(self)


def _step_of(R: FormModule, d: _Derivation) -> DerivationStep:
    return DerivationStep(R, d.support, d.vanishing, d.status, kernel_variety(R), d.hermitian)


def _derived_support(R: FormModule, W: Ideal) -> SupportIdeal:
    """Support of R + T(W), as W + (maximal minors of R + dW).

    Every column of R + T(W) carries the rows W*dx_j, so the minors ideal is
    the sum over t of W^t times the (n-t)-minors of R + dW; its zero set is
    that of W plus the n-minors.  The ideal returned lies between the minors
    ideal and its radical, so radicals and zero sets agree with the literal
    minors ideal.
    """
    ring = R.ring
    gb = Ideal(ring, W.gb()).generators
    if not gb:
        return support_ideal(R)
    if any(g.is_constant() for g in gb):
        return SupportIdeal(Ideal(ring, [1]), MINORS)
    gb = tuple(g.primitive() for g in gb)
    rows = R.matrix() + [exterior_derivative(g).coefficients() for g in gb]
    n = ring.nvars
    minors = maximal_minors(rows, n, ring, modulo=Ideal(ring, gb)) if len(rows) >= n else []
    return SupportIdeal(Ideal(ring, Ideal(ring, list(gb) + minors).gb()), MINORS)


def _rank_loci(R: FormModule, W: Ideal | None, support: SupportIdeal) -> list[Ideal]:
    """Ideals L_1..L_n with V(L_r) = {x : rank of R + T(W) at x is < r}."""
    ring = R.ring
    n = ring.nvars
    gb = Ideal(ring, W.gb()).generators if W is not None else ()
    if any(g.is_constant() for g in gb):
        return [Ideal(ring, [1])] * n
    gb = tuple(g.primitive() for g in gb)
    rows = R.matrix() + [exterior_derivative(g).coefficients() for g in gb]
    W = Ideal(ring, gb) if gb else None
    out = []
    for r in range(1, n):
        minors = maximal_minors(rows, n, ring, size=r, modulo=W)
        out.append(Ideal(ring, Ideal(ring, list(gb) + minors).gb()))
    out.append(support.ideal)
    return out


def _loci_stable(prev: list[Ideal], cur: list[Ideal]) -> bool:
    # the kernel varieties are linear in the fiber, so they coincide iff the
    # pointwise ranks do; prev[r] is contained in cur[r] by construction
    return all(
        all(radical_membership(g, P) for g in C.gb())
        for P, C in zip(prev, cur)
    )


def _hints_for(hints, k: int):
    if hints is None:
        return None
    if isinstance(hints, Mapping):
        return hints.get(k)
    return hints if k == 0 else None


def core_iterate(
    R: FormModule,
    max_steps: int = 32,
    radical_hints=None,
    hermitian: bool = False,
    squares=(),
) -> DerivationTrace:
    """Iterate the derived module until the kernel variety stabilizes.

    Step 0 records R itself.  Step k+1 records the derived module of step k.
    ``stabilized_at`` is the first step whose kernel variety equals that of
    its predecessor; when no such step occurs within ``max_steps``
    derivations, ``cap_hit`` is set.  ``radical_hints`` is a hint list for
    step 0 or a mapping from step index to hint list.  A budget failure
    re-raises with the trace so far in ``partial``.
    """
    trace = DerivationTrace(R.ring)
    try:
        cur = R
        d = _derive(cur, _hints_for(radical_hints, 0), hermitian, squares)
        trace.steps.append(_step_of(cur, d))
        # R^(k) = R + T(V_0) + ... + T(V_{k-1}) = R + T(V_0 + ... + V_{k-1}),
        # so supports and rank loci are computed from that compact form
        loci = _rank_loci(R, None, d.support)
        acc = d.vanishing
        for k in range(max_steps):
            nxt = d.module
            S = _derived_support(R, acc)
            d = _derive(nxt, _hints_for(radical_hints, k + 1), hermitian, squares, S)
            trace.steps.append(_step_of(nxt, d))
            new_loci = _rank_loci(R, acc, S)
            if _loci_stable(loci, new_loci):
                trace.stabilized_at = k + 1
                return trace
            loci = new_loci
            acc = acc + d.vanishing
        trace.cap_hit = True
        return trace
    except BudgetExceeded as exc:
        exc.partial = trace
        raise


def is_core_trivial(trace: DerivationTrace):
    """True, False or ``"unknown"`` (cap hit, or a step fell back on the unradicalized support)."""
    if trace.cap_hit or not trace.steps or trace.stabilized_at is None:
        return UNKNOWN
    if any(s.status == FALLBACK for s in trace.steps):
        return UNKNOWN
    return trace.final.support.is_empty()


# ----------------------------------------------------------------------
# coordinates and examples


def change_coordinates(R: FormModule, A: Sequence[Sequence]) -> FormModule:
    """Pull every generator back along x -> A x."""
    return FormModule(R.ring, [pullback(g, A) for g in R.generators])


def jacobian_module(F: Sequence[Polynomial]) -> FormModule:
    """The module of the rows dF_i; its kernel is ker Jac F."""
    if not F:
        raise ValueError("need at least one component")
    ring = F[0].ring
    if any(f.ring != ring for f in F):
        raise RingMismatch("components live in different rings")
    return FormModule(ring, [exterior_derivative(f) for f in F])
