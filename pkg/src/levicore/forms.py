"""Differential forms with polynomial coefficients.

The frame is one covector ``d<var>`` per ring variable, in ring order; for
``Ring.complex(n)`` this is ``dz1, dzbar1, ..., dzn, dzbarn``.  A k-form maps
strictly increasing index tuples to nonzero polynomial coefficients.  The
volume covector used by :func:`top_coefficient` is the frame in that order.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from .polycalc import ParseError, Polynomial, Ring, RingMismatch, linear_substitute, parse_polynomial

__all__ = [
    "KForm",
    "FormModule",
    "wedge",
    "exterior_derivative",
    "holomorphic_derivative",
    "antiholomorphic_derivative",
    "del_delbar",
    "top_coefficient",
    "parse_form",
    "pullback",
]


def _merge_sign(a: tuple[int, ...], b: tuple[int, ...]) -> int:
    """Sign of sorting a + b, or 0 when they share an index."""
    if set(a) & set(b):
        return 0
    inversions = sum(1 for i in a for j in b if j < i)
    return -1 if inversions % 2 else 1


class KForm:
    __slots__ = ("ring", "degree", "components")

    def __init__(self, ring: Ring, degree: int, components=None):
        n = ring.nvars
        if not 0 <= degree:
            raise ValueError("negative form degree")
        comps = {}
        for idx, c in (components or {}).items():
            idx = tuple(idx)
            if len(idx) != degree or list(idx) != sorted(set(idx)) or any(not 0 <= i < n for i in idx):
                raise ValueError(f"index tuple {idx} is not strictly increasing in range")
            if not isinstance(c, Polynomial):
                c = ring.const(c)
            elif c.ring != ring:
                raise RingMismatch("coefficient in a different ring")
            if c:
                comps[idx] = c
        self.ring = ring
        self.degree = degree
        self.components = comps

    @classmethod
    def zero(cls, ring: Ring, degree: int) -> "KForm":
        return cls(ring, degree)

    @classmethod
    def function(cls, p: Polynomial) -> "KForm":
        return cls(p.ring, 0, {(): p})

    @classmethod
    def covector(cls, ring: Ring, var: str | int) -> "KForm":
        i = var if isinstance(var, int) else ring.index(var)
        return cls(ring, 1, {(i,): ring.one()})

    @classmethod
    def from_coefficients(cls, ring: Ring, coeffs: Sequence[Polynomial]) -> "KForm":
        if len(coeffs) != ring.nvars:
            raise ValueError("one coefficient per frame covector is required")
        return cls(ring, 1, {(i,): c for i, c in enumerate(coeffs)})

    def coefficients(self) -> list[Polynomial]:
        """Coefficient vector of a 1-form in frame order."""
        if self.degree != 1:
            raise ValueError("coefficient vectors are defined for 1-forms")
        z = self.ring.zero()
        return [self.components.get((i,), z) for i in range(self.ring.nvars)]

    def is_zero(self) -> bool:
        return not self.components

    def __bool__(self):
        return bool(self.components)

    def __eq__(self, other):
        return (
            isinstance(other, KForm)
            and self.ring == other.ring
            and self.degree == other.degree
            and self.components == other.components
        )

    def __hash__(self):
        return hash((self.ring, self.degree, frozenset(self.components.items())))

    def _check(self, other: "KForm"):
        if not isinstance(other, KForm):
            raise TypeError("expected a KForm")
        if other.ring != self.ring:
            raise RingMismatch("forms live over different rings")
        if other.degree != self.degree:
            raise ValueError("cannot add forms of different degree")

    def __add__(self, other):
        self._check(other)
        out = dict(self.components)
        for k, c in other.components.items():
            out[k] = out[k] + c if k in out else c
        return KForm(self.ring, self.degree, out)

    def __neg__(self):
        return KForm(self.ring, self.degree, {k: -c for k, c in self.components.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, scalar):
        if isinstance(scalar, KForm):
            raise TypeError("use wedge() for products of forms")
        return KForm(self.ring, self.degree, {k: c * scalar for k, c in self.components.items()})

    __rmul__ = __mul__

    def wedge(self, other: "KForm") -> "KForm":
        return wedge(self, other)

    def __str__(self):
        if not self.components:
            return "0"
        names = self.ring.variables
        parts = []
        for idx in sorted(self.components):
            c = self.components[idx]
            cov = "/\\".join("d" + names[i] for i in idx)
            if not cov:
                parts.append(str(c))
                continue
            if len(c.terms) == 1:
                cs = str(c)
                neg = cs.startswith("-")
                body = cs[1:] if neg else cs
                body = cov if body == "1" else f"{body}*{cov}"
                parts.append(("-" if neg else "+", body))
            else:
                parts.append(("+", f"({c})*{cov}"))
        if isinstance(parts[0], str):
            return parts[0]
        s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            s += f" {sign} {body}"
        return s

    def __repr__(self):
        return f"KForm({str(self)!r})"


def wedge(a: KForm, b: KForm) -> KForm:
    """a ^ b; exceeding the top degree gives the zero form."""
    if a.ring != b.ring:
        raise RingMismatch("forms live over different rings")
    deg = a.degree + b.degree
    out: dict = {}
    for ia, ca in a.components.items():
        for ib, cb in b.components.items():
            s = _merge_sign(ia, ib)
            if not s:
                continue
            idx = tuple(sorted(ia + ib))
            term = ca * cb
            if s < 0:
                term = -term
            out[idx] = out[idx] + term if idx in out else term
    return KForm(a.ring, deg, out)


def _derivative(a, indices: Iterable[int]) -> KForm:
    if isinstance(a, Polynomial):
        a = KForm.function(a)
    indices = list(indices)
    out: dict = {}
    for idx, c in a.components.items():
        for i in indices:
            if i in idx:
                continue
            dc = c._diff_index(i)
            if not dc:
                continue
            s = _merge_sign((i,), idx)
            new = tuple(sorted((i,) + idx))
            term = dc if s > 0 else -dc
            out[new] = out[new] + term if new in out else term
    return KForm(a.ring, a.degree + 1, out)


def exterior_derivative(a) -> KForm:
    """d of a polynomial (0-form) or of a KForm."""
    ring = a.ring
    return _derivative(a, range(ring.nvars))


def _require_involution(ring: Ring):
    if not ring.is_complexified:
        raise ValueError(f"{ring} has no involution; del/delbar need a complexified ring")
    paired = set(ring.holomorphic) | set(ring.antiholomorphic)
    if len(paired) != ring.nvars:
        raise ValueError("del/delbar need every variable paired by the involution")


def holomorphic_derivative(a) -> KForm:
    """The del operator: differentiate in z_i and wedge dz_i."""
    _require_involution(a.ring)
    return _derivative(a, a.ring.holomorphic)


def antiholomorphic_derivative(a) -> KForm:
    """The delbar operator: differentiate in zbar_i and wedge dzbar_i."""
    _require_involution(a.ring)
    return _derivative(a, a.ring.antiholomorphic)


def del_delbar(p: Polynomial) -> tuple[KForm, KForm]:
    return holomorphic_derivative(p), antiholomorphic_derivative(p)


def top_coefficient(a: KForm) -> Polynomial:
    """Coefficient of the frame volume covector of a top-degree form."""
    n = a.ring.nvars
    if a.degree != n:
        raise ValueError(f"form has degree {a.degree}, top degree is {n}")
    return a.components.get(tuple(range(n)), a.ring.zero())


def _covector_ring(ring: Ring) -> Ring:
    names = tuple("d" + v for v in ring.variables)
    clash = set(names) & set(ring.variables)
    if clash:
        raise ValueError(f"covector names {sorted(clash)} collide with ring variables")
    return Ring(ring.variables + names)


def parse_form(text: str, ring: Ring) -> KForm:
    """Parse a 1-form such as ``"x*dx - y*dz"``; the literal ``0`` is the zero form."""
    big = _covector_ring(ring)
    n = ring.nvars
    p = parse_polynomial(text, big)
    comps: dict = {}
    for e, c in p.terms.items():
        cov = e[n:]
        if sum(cov) != 1:
            raise ParseError("every term must contain exactly one covector d<var>", 0, text)
        i = cov.index(1)
        mono = Polynomial(ring, {e[:n]: c})
        comps[(i,)] = comps[(i,)] + mono if (i,) in comps else mono
    return KForm(ring, 1, comps)


def pullback(a: KForm, matrix: Sequence[Sequence]) -> KForm:
    """Pull a 1-form back along x -> A x."""
    ring = a.ring
    n = ring.nvars
    A = [[Fraction(x) for x in row] for row in matrix]
    coeffs = [linear_substitute(c, A) for c in a.coefficients()]
    new = []
    for j in range(n):
        acc = ring.zero()
        for i in range(n):
            if A[i][j] and coeffs[i]:
                acc = acc + coeffs[i] * A[i][j]
        new.append(acc)
    return KForm.from_coefficients(ring, new)


class FormModule:
    """Module generated by finitely many 1-forms (zero generators dropped, duplicates removed)."""

    __slots__ = ("ring", "generators")

    def __init__(self, ring: Ring, generators: Iterable[KForm] = ()):
        gens: list[KForm] = []
        seen = set()
        for g in generators:
            if not isinstance(g, KForm):
                raise TypeError("module generators must be KForms")
            if g.ring != ring:
                raise RingMismatch("generator over a different ring")
            if g.degree != 1:
                raise ValueError("module generators must be 1-forms")
            if g and g not in seen:
                seen.add(g)
                gens.append(g)
        self.ring = ring
        self.generators = tuple(gens)

    @classmethod
    def parse(cls, ring: Ring, texts: Iterable[str] | str) -> "FormModule":
        if isinstance(texts, str):
            texts = _split_top_level(texts)
        return cls(ring, [parse_form(t, ring) for t in texts])

    @classmethod
    def from_rows(cls, ring: Ring, rows: Iterable[Sequence[Polynomial]]) -> "FormModule":
        return cls(ring, [KForm.from_coefficients(ring, list(r)) for r in rows])

    @classmethod
    def full(cls, ring: Ring) -> "FormModule":
        return cls(ring, [KForm.covector(ring, i) for i in range(ring.nvars)])

    def matrix(self) -> list[list[Polynomial]]:
        return [g.coefficients() for g in self.generators]

    def union(self, other: Iterable[KForm] | "FormModule") -> "FormModule":
        extra = other.generators if isinstance(other, FormModule) else tuple(other)
        return FormModule(self.ring, self.generators + tuple(extra))

    def __len__(self):
        return len(self.generators)

    def __eq__(self, other):
        return isinstance(other, FormModule) and self.ring == other.ring and self.generators == other.generators

    def __hash__(self):
        return hash((self.ring, self.generators))

    def __repr__(self):
        return f"FormModule<{', '.join(str(g) for g in self.generators)}>"

    def strings(self) -> list[str]:
        return [str(g) for g in self.generators]


def _split_top_level(text: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    tail = "".join(cur)
    if tail.strip() or parts:
        parts.append(tail)
    return [p for p in (s.strip() for s in parts) if p]
