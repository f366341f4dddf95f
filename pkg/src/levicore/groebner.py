"""Ideals, Groebner bases and the ideal operations built on them.

Buchberger's algorithm with the Gebauer-Moeller installation of the product
and chain criteria.  Reduction is fraction-free over the integers; stored
bases are reduced and monic.  Every computation runs under a :class:`Budget`
(pair count, basis degree, reduction work) and raises :class:`BudgetExceeded` instead of
returning a truncated answer.
"""

from __future__ import annotations

import contextvars
import heapq
import itertools
from contextlib import contextmanager
from dataclasses import dataclass, replace
from fractions import Fraction
from math import gcd
from typing import Callable, Iterable, Sequence

from .polycalc import Polynomial, Ring, RingMismatch, _lift, degrevlex_key

__all__ = [
    "Budget",
    "BudgetExceeded",
    "HintRejected",
    "TermOrder",
    "DEGREVLEX",
    "Ideal",
    "budget",
    "current_budget",
    "groebner_basis",
    "normal_form",
    "ideal_membership",
    "radical_membership",
    "variety_equal",
    "ideal_contains",
    "eliminate",
    "intersect",
    "quotient",
    "saturate",
    "ideal_dimension",
    "radical",
    "squarefree_part",
    "poly_gcd",
    "exact_divide",
    "hermitian_square_parts",
    "EXACT",
    "HINTED",
    "FALLBACK",
]

EXACT, HINTED, FALLBACK = "exact", "hinted", "fallback"


@dataclass(frozen=True)
class Budget:
    max_pairs: int = 50_000
    max_degree: int = 60
    max_minors: int = 20_000
    max_tuples: int = 20_000
    max_work: int | None = 300_000_000


_BUDGET: contextvars.ContextVar[Budget] = contextvars.ContextVar("levicore_budget", default=Budget())
# [terms processed, limit] for the basis computation in progress
_WORK: contextvars.ContextVar[list | None] = contextvars.ContextVar("levicore_work", default=None)


def current_budget() -> Budget:
    return _BUDGET.get()


@contextmanager
def budget(b: Budget):
    """Run the enclosed computations under budget ``b``."""
    token = _BUDGET.set(b)
    try:
        yield b
    finally:
        _BUDGET.reset(token)


class BudgetExceeded(RuntimeError):
    """A resource cap was hit; the result is unknown, not wrong.

    ``partial`` may be set by callers that can report work done so far.
    """

    def __init__(self, what: str, limit: int):
        self.what = what
        self.limit = limit
        self.partial = None
        super().__init__(f"budget exceeded: {what} > {limit}")


class HintRejected(ValueError):
    def __init__(self, hint: Polynomial):
        self.hint = hint
        super().__init__(f"radical hint {hint} is not in the radical of the ideal")


# ----------------------------------------------------------------------
# term orders


@dataclass(frozen=True)
class TermOrder:
    """Monomial order.

    ``kind`` is ``degrevlex``, ``lex`` or ``block``.  ``variables`` lists the
    ring variables from most to least significant (default: ring order).  A
    block order compares the first ``split`` variables by degrevlex, then the
    rest by degrevlex, so it eliminates the first block.
    """

    kind: str = "degrevlex"
    variables: tuple[str, ...] | None = None
    split: int = 0

    def __post_init__(self):
        if self.kind not in ("degrevlex", "lex", "block"):
            raise ValueError(f"unknown term order {self.kind!r}")
        if self.variables is not None:
            object.__setattr__(self, "variables", tuple(self.variables))

    @classmethod
    def eliminating(cls, ring: Ring, drop: Iterable[str]) -> "TermOrder":
        drop = [v for v in ring.variables if v in set(drop)]
        keep = [v for v in ring.variables if v not in set(drop)]
        return cls("block", tuple(drop + keep), len(drop))

    def keyfunc(self, ring: Ring) -> Callable:
        n = ring.nvars
        if self.variables is None:
            perm = tuple(range(n))
        else:
            perm = tuple(ring.index(v) for v in self.variables)
            if sorted(perm) != list(range(n)):
                raise ValueError("term order variables must be a permutation of the ring variables")
        ident = perm == tuple(range(n))
        if self.kind == "lex":
            if ident:
                return lambda e: e
            return lambda e: tuple(e[i] for i in perm)
        if self.kind == "degrevlex":
            if ident:
                return degrevlex_key
            return lambda e: degrevlex_key([e[i] for i in perm])
        s = self.split
        first, second = perm[:s], perm[s:]
        return lambda e: (
            degrevlex_key([e[i] for i in first]),
            degrevlex_key([e[i] for i in second]),
        )


DEGREVLEX = TermOrder()


class _KeyCache(dict):
    __slots__ = ("fn",)

    def __init__(self, fn):
        super().__init__()
        self.fn = fn

    def __missing__(self, e):
        v = self[e] = self.fn(e)
        return v

    __call__ = dict.__getitem__


# ----------------------------------------------------------------------
# integer-coefficient kernels


def _int_terms(p: Polynomial) -> dict:
    return dict(p.primitive().terms)


def _content_free(f: dict) -> dict:
    if not f:
        return f
    g = gcd(*f.values())
    if g == 1:
        return f
    return {k: v // g for k, v in f.items()}


def _divides(a, b) -> bool:
    for x, y in zip(a, b):
        if x > y:
            return False
    return True


def _reduce_int(f: dict, basis: Sequence[tuple], K) -> dict:
    """Full fraction-free reduction of ``f`` by ``basis`` (pairs (lm, poly)).

    Returns a primitive scalar multiple of the remainder, positive leading coefficient.
    """
    f = dict(f)
    r: dict = {}
    meter = _WORK.get()
    scaled = 0
    while f:
        m = max(f, key=K)
        c = f[m]
        for lm, g in basis:
            if _divides(lm, m):
                break
        else:
            r[m] = f.pop(m)
            continue
        if meter is not None:
            # weighted by coefficient size in machine words
            meter[0] += (len(f) + len(g)) * (1 + (abs(c).bit_length() >> 6))
            if meter[0] > meter[1]:
                raise BudgetExceeded("reduction work", meter[1])
        gc = g[lm]
        d = gcd(gc, c)
        a, b = gc // d, c // d
        if a < 0:
            a, b = -a, -b
        if a != 1:
            f = {k: v * a for k, v in f.items()}
            r = {k: v * a for k, v in r.items()}
        q = tuple(y - x for x, y in zip(lm, m))
        for k, v in g.items():
            kk = tuple(x + y for x, y in zip(k, q))
            nv = f.get(kk, 0) - b * v
            if nv:
                f[kk] = nv
            else:
                del f[kk]
        if a != 1:
            scaled += 1
        if scaled >= 4 or (scaled and abs(c).bit_length() > 256):
            # content removal is costly, so it is batched over a few scalings
            scaled = 0
            vals = list(f.values()) + list(r.values())
            if vals:
                h = gcd(*vals)
                if h > 1:
                    f = {k: v // h for k, v in f.items()}
                    r = {k: v // h for k, v in r.items()}
    if not r:
        return r
    r = _content_free(r)
    if r[max(r, key=K)] < 0:
        r = {k: -v for k, v in r.items()}
    return r


def _spoly(f: dict, lf, g: dict, lg) -> dict:
    lcm = tuple(max(a, b) for a, b in zip(lf, lg))
    cf, cg = f[lf], g[lg]
    d = gcd(cf, cg)
    a, b = cg // d, cf // d
    qf = tuple(x - y for x, y in zip(lcm, lf))
    qg = tuple(x - y for x, y in zip(lcm, lg))
    out: dict = {}
    for k, v in f.items():
        kk = tuple(x + y for x, y in zip(k, qf))
        out[kk] = out.get(kk, 0) + a * v
    for k, v in g.items():
        kk = tuple(x + y for x, y in zip(k, qg))
        nv = out.get(kk, 0) - b * v
        if nv:
            out[kk] = nv
        else:
            out.pop(kk, None)
    return {k: v for k, v in out.items() if v}


def _buchberger(F: list[dict], K, nvars: int, bud: Budget) -> list[dict]:
    """Reduced Groebner basis (integer primitive polys) of the nonzero inputs ``F``."""
    G: list[dict] = []
    LM: list[tuple] = []
    active: list[int] = []
    pairs: list = []
    queued = 0
    counter = itertools.count()

    def lcm(a, b):
        return tuple(max(x, y) for x, y in zip(a, b))

    def coprime(a, b):
        return all(not (x and y) for x, y in zip(a, b))

    def add(h: dict):
        nonlocal pairs, queued
        lh = max(h, key=K)
        if max(sum(e) for e in h) > bud.max_degree:
            raise BudgetExceeded("basis degree", bud.max_degree)
        hi = len(G)
        G.append(h)
        LM.append(lh)
        C = list(active)
        D: list[int] = []
        while C:
            i = C.pop()
            lih = lcm(LM[i], lh)
            if coprime(LM[i], lh):
                D.append(i)
                continue
            if any(_divides(lcm(LM[k], lh), lih) for k in C) or any(
                _divides(lcm(LM[k], lh), lih) for k in D
            ):
                continue
            D.append(i)
        kept = []
        for item in pairs:
            _, _, i, j = item
            lij = lcm(LM[i], LM[j])
            if _divides(lh, lij) and lcm(LM[i], lh) != lij and lcm(LM[j], lh) != lij:
                continue
            kept.append(item)
        for i in D:
            if coprime(LM[i], lh):
                continue
            kept.append((K[lcm(LM[i], lh)], next(counter), i, hi))
            queued += 1
        if queued > bud.max_pairs:
            raise BudgetExceeded("S-pairs", bud.max_pairs)
        heapq.heapify(kept)
        pairs = kept
        active[:] = [i for i in active if not _divides(lh, LM[i])] + [hi]

    def basis():
        return [(LM[i], G[i]) for i in active]

    one = (0,) * nvars
    # inputs enter one at a time, smallest first, each followed by a full
    # pass over the pairs; on large generating sets (many minors) this finds
    # the basis, and in particular a unit, long before the big inputs matter
    for f in sorted(F, key=lambda f: (len(f), K[max(f, key=K)])):
        h = _reduce_int(f, basis(), K)
        if not h:
            continue
        if one in h and len(h) == 1:
            return [{one: 1}]
        add(h)
        while pairs:
            _, _, i, j = heapq.heappop(pairs)
            s = _spoly(G[i], LM[i], G[j], LM[j])
            if not s:
                continue
            h = _reduce_int(s, basis(), K)
            if h:
                if one in h and len(h) == 1:
                    return [{one: 1}]
                add(h)
    # minimal then reduced
    idx = sorted(active, key=lambda i: K[LM[i]])
    minimal = []
    for i in idx:
        if not any(_divides(LM[j], LM[i]) for j in minimal):
            minimal.append(i)
    out = []
    for i in minimal:
        others = [(LM[j], G[j]) for j in minimal if j != i]
        out.append(_reduce_int(G[i], others, K))
    return out


def _to_monic_poly(ring: Ring, f: dict, K) -> Polynomial:
    lc = f[max(f, key=K)]
    return Polynomial(ring, {e: Fraction(c, lc) for e, c in f.items()})


def _reduce_monic(f: dict, basis: Sequence[tuple], K) -> dict:
    """Exact remainder of ``f`` modulo monic ``basis`` (pairs (lm, terms))."""
    f = dict(f)
    r: dict = {}
    while f:
        m = max(f, key=K)
        c = f[m]
        for lm, g in basis:
            if _divides(lm, m):
                break
        else:
            r[m] = f.pop(m)
            continue
        q = tuple(y - x for x, y in zip(lm, m))
        for k, v in g.items():
            kk = tuple(x + y for x, y in zip(k, q))
            nv = f.get(kk, 0) - c * v
            if nv:
                f[kk] = nv
            else:
                del f[kk]
    return r


# ----------------------------------------------------------------------
# ideals


class Ideal:
    """Finitely generated ideal; zero generators are dropped.

    The Groebner basis cache is keyed by term order and never changes the
    value of any operation.
    """

    __slots__ = ("ring", "generators", "_gb")

    def __init__(self, ring: Ring, generators: Iterable = ()):
        gens = []
        for g in generators:
            g = _lift(ring, g)
            if g:
                gens.append(g)
        self.ring = ring
        self.generators = tuple(gens)
        self._gb: dict = {}

    @classmethod
    def parse(cls, ring: Ring, texts: Iterable[str]) -> "Ideal":
        return cls(ring, [ring.parse(t) for t in texts])

    def __eq__(self, other):
        return (
            isinstance(other, Ideal)
            and self.ring == other.ring
            and self.generators == other.generators
        )

    def __hash__(self):
        return hash((self.ring, self.generators))

    def __repr__(self):
        return f"Ideal({', '.join(str(g) for g in self.generators) or '0'})"

    def __add__(self, other):
        if isinstance(other, Ideal):
            if other.ring != self.ring:
                raise RingMismatch("ideals live in different rings")
            return Ideal(self.ring, self.generators + other.generators)
        return Ideal(self.ring, self.generators + tuple(other))

    def is_zero(self) -> bool:
        return not self.generators

    def gb(self, order: TermOrder = DEGREVLEX) -> tuple[Polynomial, ...]:
        cached = self._gb.get(order)
        if cached is None:
            cached = _compute_gb(self, order)
            self._gb[order] = cached
        return cached

    def is_unit(self) -> bool:
        gb = self.gb()
        return len(gb) == 1 and gb[0].is_constant()

    def contains(self, p) -> bool:
        return ideal_membership(_lift(self.ring, p), self)

    __contains__ = contains

    def to_ring(self, ring: Ring) -> "Ideal":
        return Ideal(ring, [g.to_ring(ring) for g in self.generators])


def _compute_gb(I: Ideal, order: TermOrder) -> tuple[Polynomial, ...]:
    if not I.generators:
        return ()
    K = _KeyCache(order.keyfunc(I.ring))
    F = [_int_terms(g) for g in I.generators]
    bud = current_budget()
    token = _WORK.set([0, bud.max_work]) if bud.max_work is not None else None
    try:
        G = _buchberger(F, K, I.ring.nvars, bud)
    finally:
        if token is not None:
            _WORK.reset(token)
    polys = [_to_monic_poly(I.ring, g, K) for g in G]
    polys.sort(key=lambda p: K[max(p.terms, key=K)])
    return tuple(polys)


def groebner_basis(I: Ideal, order: TermOrder = DEGREVLEX) -> list[Polynomial]:
    """Reduced monic Groebner basis, sorted by increasing leading monomial."""
    return list(I.gb(order))


def _check_ring(p: Polynomial, I: Ideal):
    if p.ring != I.ring:
        raise RingMismatch(f"polynomial in {p.ring} but ideal in {I.ring}")


def normal_form(p: Polynomial, I: Ideal, order: TermOrder = DEGREVLEX) -> Polynomial:
    _check_ring(p, I)
    gb = I.gb(order)
    if not gb or not p:
        return p
    K = _KeyCache(order.keyfunc(I.ring))
    basis = [(max(g.terms, key=K), g.terms) for g in gb]
    return Polynomial(I.ring, _reduce_monic(p.terms, basis, K))


def ideal_membership(p: Polynomial, I: Ideal) -> bool:
    _check_ring(p, I)
    if not p:
        return True
    gb = I.gb()
    if not gb:
        return False
    if len(gb) == 1 and gb[0].is_constant():
        return True
    K = _KeyCache(degrevlex_key)
    basis = [(max(g.terms, key=K), _int_terms(g)) for g in gb]
    return not _reduce_int(_int_terms(p), basis, K)


def ideal_contains(I: Ideal, J: Ideal) -> bool:
    """True iff J is contained in I."""
    return all(ideal_membership(g, I) for g in J.generators)


def radical_membership(p: Polynomial, I: Ideal) -> bool:
    """p in sqrt(I), decided by 1 in I + (1 - t p) over a fresh variable t."""
    _check_ring(p, I)
    if not p or ideal_membership(p, I):
        return True
    if I.is_zero():
        return False
    ring = I.ring
    t = ring.fresh_name("t")
    big = ring.extend([t])
    tp = big.var(t) * p.to_ring(big)
    J = Ideal(big, [g.to_ring(big) for g in I.generators] + [1 - tp])
    return J.is_unit()


def variety_equal(I: Ideal, J: Ideal) -> bool:
    """sqrt(I) == sqrt(J), by mutual radical membership of generators."""
    if I.ring != J.ring:
        raise RingMismatch("ideals live in different rings")
    return all(radical_membership(g, I) for g in J.generators) and all(
        radical_membership(g, J) for g in I.generators
    )


def eliminate(I: Ideal, drop: Iterable[str]) -> Ideal:
    """Generators of I intersected with the subring free of ``drop`` (same ring object)."""
    drop = list(drop)
    for v in drop:
        I.ring.index(v)
    if not drop:
        return I
    order = TermOrder.eliminating(I.ring, drop)
    idx = [I.ring.index(v) for v in drop]
    kept = [g for g in I.gb(order) if all(e[i] == 0 for e in g.terms for i in idx)]
    return Ideal(I.ring, kept)


def intersect(I: Ideal, J: Ideal) -> Ideal:
    if I.ring != J.ring:
        raise RingMismatch("ideals live in different rings")
    if I.is_zero() or J.is_zero():
        return Ideal(I.ring)
    ring = I.ring
    t = ring.fresh_name("t")
    big = ring.extend([t])
    tv = big.var(t)
    gens = [tv * g.to_ring(big) for g in I.generators] + [
        (1 - tv) * g.to_ring(big) for g in J.generators
    ]
    E = eliminate(Ideal(big, gens), [t])
    return Ideal(ring, [g.to_ring(ring) for g in E.generators])


def exact_divide(f: Polynomial, g: Polynomial) -> Polynomial:
    """f / g, raising ValueError when g does not divide f."""
    if not g:
        raise ZeroDivisionError("division by the zero polynomial")
    if f.ring != g.ring:
        raise RingMismatch("operands live in different rings")
    K = _KeyCache(degrevlex_key)
    lg = max(g.terms, key=K)
    cg = g.terms[lg]
    rem = dict(f.terms)
    q: dict = {}
    while rem:
        m = max(rem, key=K)
        if not _divides(lg, m):
            raise ValueError(f"{g} does not divide {f}")
        c = Fraction(rem[m]) / cg
        s = tuple(y - x for x, y in zip(lg, m))
        q[s] = c
        for k, v in g.terms.items():
            kk = tuple(x + y for x, y in zip(k, s))
            nv = rem.get(kk, 0) - c * v
            if nv:
                rem[kk] = nv
            else:
                del rem[kk]
    return Polynomial(f.ring, q)


def quotient(I: Ideal, J: Ideal) -> Ideal:
    """I : J."""
    if J.is_zero():
        return Ideal(I.ring, [1])
    out = None
    for g in J.generators:
        inter = intersect(I, Ideal(I.ring, [g]))
        Q = Ideal(I.ring, [exact_divide(h, g) for h in inter.gb()])
        out = Q if out is None else intersect(out, Q)
    return out


def _saturate_one(I: Ideal, g: Polynomial) -> Ideal:
    ring = I.ring
    t = ring.fresh_name("t")
    big = ring.extend([t])
    gens = [h.to_ring(big) for h in I.generators] + [1 - big.var(t) * g.to_ring(big)]
    E = eliminate(Ideal(big, gens), [t])
    return Ideal(ring, [h.to_ring(ring) for h in E.generators])


def saturate(I: Ideal, J: Ideal, method: str = "rabinowitsch") -> Ideal:
    """I : J^infinity.

    ``rabinowitsch`` intersects the saturations by each generator of J;
    ``quotient`` iterates I : J until the ideal stops growing.
    """
    if I.ring != J.ring:
        raise RingMismatch("ideals live in different rings")
    if J.is_zero():
        return Ideal(I.ring, [1])
    if method == "quotient":
        cur = I
        while True:
            nxt = quotient(cur, J)
            if ideal_contains(cur, nxt):
                return Ideal(I.ring, cur.gb())
            cur = nxt
    if method != "rabinowitsch":
        raise ValueError(f"unknown saturation method {method!r}")
    out = None
    for g in J.generators:
        if g.is_constant():
            S = I
        else:
            S = _saturate_one(I, g)
        out = S if out is None else intersect(out, S)
    return Ideal(I.ring, out.gb())


def ideal_dimension(I: Ideal) -> int | None:
    """Krull dimension of Q[x]/I; ``None`` marks the empty variety (1 in I)."""
    gb = I.gb()
    n = I.ring.nvars
    if not gb:
        return n
    if len(gb) == 1 and gb[0].is_constant():
        return None
    K = _KeyCache(degrevlex_key)
    supports = [frozenset(i for i, x in enumerate(max(g.terms, key=K)) if x) for g in gb]
    for size in range(n, -1, -1):
        for U in itertools.combinations(range(n), size):
            Us = frozenset(U)
            if not any(s <= Us for s in supports):
                return size
    return 0


# ----------------------------------------------------------------------
# gcd, squarefree parts, radicals


def _univariate_index(p: Polynomial) -> int | None:
    used = p.variables_used()
    if len(used) == 1:
        return p.ring.index(used[0])
    return None


def _uni_gcd(f: Polynomial, g: Polynomial, i: int) -> Polynomial:
    ring = f.ring

    def coeffs(p):
        d = {}
        for e, c in p.terms.items():
            d[e[i]] = Fraction(c)
        return d

    def rem(a, b):
        a = dict(a)
        db = max(b)
        lb = b[db]
        while a and max(a) >= db:
            da = max(a)
            c = a[da] / lb
            for k, v in b.items():
                kk = k + da - db
                nv = a.get(kk, 0) - c * v
                if nv:
                    a[kk] = nv
                else:
                    a.pop(kk, None)
        return a

    a, b = coeffs(f), coeffs(g)
    while b:
        a, b = b, rem(a, b)
    if not a:
        return ring.zero()
    lc = a[max(a)]
    out = {}
    for k, v in a.items():
        e = [0] * ring.nvars
        e[i] = k
        out[tuple(e)] = v / lc
    return Polynomial(ring, out)


def poly_gcd(f: Polynomial, g: Polynomial) -> Polynomial:
    """Monic (degrevlex) greatest common divisor."""
    ring = f.ring
    if not f:
        return g.scale_to_monic() if g else ring.zero()
    if not g:
        return f.scale_to_monic()
    if f.is_constant() or g.is_constant():
        return ring.one()
    if not set(f.variables_used()) & set(g.variables_used()):
        return ring.one()
    i, j = _univariate_index(f), _univariate_index(g)
    if i is not None and i == j:
        return _uni_gcd(f, g, i)
    for a, b in ((f, g), (g, f)):
        try:
            exact_divide(b, a)
            return a.scale_to_monic()
        except ValueError:
            pass
    L = intersect(Ideal(ring, [f]), Ideal(ring, [g])).gb()
    lcm = L[0]
    return exact_divide(f * g, lcm).scale_to_monic()


def squarefree_part(p: Polynomial) -> Polynomial:
    """p / gcd(p, dp/dx_1, ..., dp/dx_n), made monic."""
    if p.is_constant():
        return p.ring.one() if p else p
    g = p
    for v in p.variables_used():
        dp = p.diff(v)
        g = poly_gcd(g, dp)
        if g.is_constant():
            return p.scale_to_monic()
    return exact_divide(p, g).scale_to_monic()


def _minimal_polynomial(I: Ideal, var: str) -> Polynomial:
    """Generator of I intersected with Q[var] for zero-dimensional I."""
    ring = I.ring
    x = ring.var(var)
    # echelon rows: pivot monomial -> (reduced vector, combination of powers)
    rows: dict = {}
    power = ring.one()
    k = 0
    while True:
        # NF(x^k) = NF(x * NF(x^(k-1))), much cheaper than reducing x^k
        power = normal_form(power, I)
        vec = {e: Fraction(c) for e, c in power.terms.items()}
        comb = {k: Fraction(1)}
        while vec:
            m = max(vec)
            if m not in rows:
                break
            pv, pc = rows[m]
            a = vec[m]
            for e, c in pv.items():
                nv = vec.get(e, 0) - a * c
                if nv:
                    vec[e] = nv
                else:
                    vec.pop(e, None)
            for e, c in pc.items():
                nv = comb.get(e, 0) - a * c
                if nv:
                    comb[e] = nv
                else:
                    comb.pop(e, None)
        if not vec:
            out = ring.zero()
            for e, c in comb.items():
                out = out + x ** e * c
            return out.scale_to_monic()
        m = max(vec)
        a = vec[m]
        rows[m] = ({e: c / a for e, c in vec.items()}, {e: c / a for e, c in comb.items()})
        power = power * x
        k += 1
        if k > current_budget().max_degree:
            raise BudgetExceeded("eliminant degree", current_budget().max_degree)


def radical(I: Ideal, hints: Sequence[Polynomial] | None = None) -> tuple[Ideal, str]:
    """Radical of I where it is computable.

    Principal and zero-dimensional ideals give ``exact``, as do ideals that
    become one of those after the linear basis elements are solved for
    their leading variables.  Other ideals go through a reduction to
    dimension zero over a field of rational functions, capped at a fixed
    amount of reduction work; within the cap the result is ``exact`` too.
    Otherwise valid hints give ``hinted`` (I plus the hints, radicalized
    exactly when that succeeds for the sum), and without hints the ideal
    comes back unchanged with status ``fallback``.
    """
    hints = [_lift(I.ring, h) for h in hints or ()]
    for h in hints:
        if not radical_membership(h, I):
            raise HintRejected(h)
    exact = _exact_radical(I)
    if exact is not None:
        return exact, EXACT
    if hints:
        J = I + hints
        rj = _exact_radical(J)
        return (rj if rj is not None else Ideal(I.ring, J.gb())), HINTED
    return I, FALLBACK


def _exact_radical(I: Ideal) -> Ideal | None:
    gb = I.gb()
    if len(gb) <= 1:
        if not gb or gb[0].is_constant():
            return Ideal(I.ring, gb)
        return Ideal(I.ring, [squarefree_part(gb[0])])
    linear = [g for g in gb if g.total_degree() == 1]
    if linear:
        # In a reduced basis the leading variable of a linear element occurs
        # nowhere else, so the rest lives in the subring of the other
        # variables and Q[x]/I is isomorphic to that subring modulo the rest.
        K = _KeyCache(degrevlex_key)
        pivots = {I.ring.variables[max(g.terms, key=K).index(1)] for g in linear}
        rest = [g for g in gb if g.total_degree() > 1]
        if not rest:
            return Ideal(I.ring, gb)
        sub = Ring(tuple(v for v in I.ring.variables if v not in pivots))
        r = _exact_radical(Ideal(sub, [g.to_ring(sub) for g in rest]))
        if r is None:
            return None
        return Ideal(I.ring, Ideal(I.ring, linear + [g.to_ring(I.ring) for g in r.generators]).gb())
    d = ideal_dimension(I)
    if d == 0:
        extra = []
        for v in I.ring.variables:
            m = _minimal_polynomial(I, v)
            sq = squarefree_part(m)
            if sq != m.scale_to_monic():
                # reduced against the basis first; adding the raw
                # univariate polynomials makes the final basis much dearer
                extra.append(normal_form(sq, I))
        if not extra:
            return Ideal(I.ring, I.gb())
        return Ideal(I.ring, Ideal(I.ring, I.gb() + tuple(extra)).gb())
    bud = current_budget()
    cap = _RADICAL_WORK if bud.max_work is None else min(bud.max_work, _RADICAL_WORK)
    try:
        with budget(replace(bud, max_work=cap)):
            return _radical_by_reduction(I)
    except BudgetExceeded:
        return None


def _independent_sets(I: Ideal) -> list[tuple[str, ...]]:
    """All largest sets of variables containing no leading monomial of the basis."""
    gb = I.gb()
    n = I.ring.nvars
    K = _KeyCache(degrevlex_key)
    supports = [frozenset(i for i, x in enumerate(max(g.terms, key=K)) if x) for g in gb]
    for size in range(n, -1, -1):
        found = [
            tuple(I.ring.variables[i] for i in U)
            for U in itertools.combinations(range(n), size)
            if not any(s <= frozenset(U) for s in supports)
        ]
        if found:
            return found
    return [()]


def _eliminants(I: Ideal, X: Sequence[str]) -> list[Polynomial]:
    """For each x in X an element of I involving x and no other variable of X."""
    out = []
    for x in X:
        others = [v for v in X if v != x]
        E = eliminate(I, others)
        cands = [g for g in E.generators if g.degree_in(x) > 0 and all(g.degree_in(v) == 0 for v in others)]
        out.append(min(cands, key=lambda g: (g.degree_in(x), g.total_degree(), len(g.terms))))
    return out


# without an explicit work budget the reduction attempt is still bounded;
# past this it is cheaper to report a fallback radical
_RADICAL_WORK = 10**7


def _cheapest_eliminants(I: Ideal) -> tuple[tuple[str, ...], list[Polynomial]]:
    # the cost of projecting V(I) to the coordinate planes varies a lot with
    # the choice of independent set, so all choices are tried under growing
    # work caps before the full budget is spent on one of them
    bud = current_budget()
    sets = _independent_sets(I)
    last = _RADICAL_WORK if bud.max_work is None else min(bud.max_work, _RADICAL_WORK)
    caps = [c for c in (10**5, 10**6) if c < last] + [last]
    if len(sets) == 1:
        caps = [last]
    for cap in caps:
        for U in sets:
            X = [v for v in I.ring.variables if v not in U]
            try:
                with budget(replace(bud, max_work=cap)):
                    return U, _eliminants(I, X)
            except BudgetExceeded:
                if cap == last and U == sets[-1]:
                    raise
    raise AssertionError("unreachable")


def _leading_coefficients(I: Ideal, order: TermOrder, X: Sequence[str]) -> list[Polynomial]:
    """For each basis element, the Q[U]-coefficient of its leading X-monomial."""
    ring = I.ring
    xi = [ring.index(v) for v in X]
    K = _KeyCache(order.keyfunc(ring))
    out = []
    for g in I.gb(order):
        lead = max(g.terms, key=K)
        xpart = tuple(lead[i] for i in xi)
        c = {}
        for e, a in g.terms.items():
            if tuple(e[i] for i in xi) == xpart:
                c[tuple(0 if i in xi else x for i, x in enumerate(e))] = a
        out.append(Polynomial(ring, c))
    return out


def _lc_product(lcs: Sequence[Polynomial]) -> Polynomial | None:
    h = None
    for c in _unique_primitive(lcs):
        if c.is_constant():
            continue
        c = squarefree_part(c)
        h = c if h is None else h * c
    return None if h is None else squarefree_part(h)


def _unique_primitive(polys) -> list[Polynomial]:
    out = []
    for p in polys:
        q = p.primitive()
        if q not in out:
            out.append(q)
    return out


def _radical_by_reduction(I: Ideal) -> Ideal:
    """Radical of a positive-dimensional ideal by reduction to dimension zero.

    With U a maximal independent set and X the other variables, I is
    zero-dimensional over Q(U).  Adjoining the X-squarefree parts of
    elements of I in Q[U, x] (x in X) gives the radical there, and saturating
    by the product h of the leading coefficients of a basis in an order
    eliminating X contracts it back to Q[U, X].  The part of V(I) on which h
    vanishes is handled recursively, so sqrt(I) = sqrt(I : h^oo) meets
    sqrt(I + (h)).  Since h is a nonzero polynomial in U and U is independent
    modulo I, h is not in sqrt(I) and the recursion terminates.
    """
    ring = I.ring
    U, elim = _cheapest_eliminants(I)
    X = [v for v in ring.variables if v not in U]
    order = TermOrder.eliminating(ring, X)
    h = _lc_product(_leading_coefficients(I, order, X))
    extra = [exact_divide(f, poly_gcd(f, f.diff(x))) for x, f in zip(X, elim)]
    J = Ideal(ring, I.generators + tuple(extra))
    h2 = _lc_product(_leading_coefficients(J, order, X))
    P = saturate(J, Ideal(ring, [h2])) if h2 is not None else Ideal(ring, J.gb())
    if h is None:
        return P
    rest = _exact_radical(Ideal(ring, I.generators + (h,)))
    if rest is None:
        raise BudgetExceeded("radical recursion", 0)
    if rest.is_unit():
        return P
    return Ideal(ring, intersect(P, rest).gb())


def hermitian_square_parts(
    f: Polynomial, squares: Sequence[tuple[Polynomial, Sequence[Polynomial]]] = ()
) -> list[Polynomial]:
    """Real and imaginary parts forced to vanish where ``f`` vanishes at real points.

    ``f`` qualifies when it is a nonzero rational multiple of a recorded sum
    of hermitian squares ``h = sum p_i * bar(p_i)`` (``squares`` holds
    ``(h, [p_i])``), or a single term whose monomial is fixed by the
    involution.  Each square ``p`` contributes ``p + bar(p)`` and
    ``p - bar(p)``; the second is the imaginary part up to the unit ``i``.
    """
    ring = f.ring
    if not ring.is_complexified or not f or f.is_constant():
        return []
    pieces: list[Polynomial] = []
    for h, ps in squares:
        if not h:
            continue
        e, c = h.leading_term()
        fe = f.terms.get(e)
        if fe is not None and f * Fraction(c) == h * Fraction(fe):
            pieces.extend(ps)
    if len(f.terms) == 1:
        (e,) = f.terms
        perm = ring.conjugation
        fixed = all(e[i] == e[perm[i]] for i in range(len(e)))
        real_even = all(e[i] % 2 == 0 for i in range(len(e)) if perm[i] == i)
        if fixed and real_even:
            q = ring.one()
            for i in ring.holomorphic:
                if e[i]:
                    q = q * ring.var(ring.variables[i])
            for i in range(len(e)):
                if perm[i] == i and e[i]:
                    q = q * ring.var(ring.variables[i])
            pieces.append(q)
    out: list[Polynomial] = []
    for p in pieces:
        for part in (p + p.bar(), p - p.bar()):
            if part and not part.is_constant():
                part = part.primitive()
                if part not in out:
                    out.append(part)
    return out
