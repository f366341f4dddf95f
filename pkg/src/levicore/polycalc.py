"""Exact multivariate polynomials over the rationals.

Polynomials live in a :class:`Ring`, an ordered tuple of variable names with an
optional involution pairing ``z_i <-> zbar_i``.  Terms are stored densely by
exponent vector with rational coefficients (``int`` when integral, otherwise
``fractions.Fraction``).  Values are immutable.

>>> R = Ring(("x", "y", "z"))
>>> p = R.parse("x^2 - y*z^2")
>>> str(p.diff("x"))
'2*x'
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from ._linalg import det as _det

__all__ = [
    "Ring",
    "Polynomial",
    "ParseError",
    "UnknownVariable",
    "RingMismatch",
    "parse_polynomial",
    "ring_arithmetic",
    "differentiate",
    "bar_involution",
    "evaluate",
    "linear_substitute",
    "degrevlex_key",
]

_NAME = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")


class ParseError(ValueError):
    """Syntax error in polynomial or form text; ``position`` is a 0-based offset."""

    def __init__(self, message: str, position: int, text: str = ""):
        self.position = position
        self.text = text
        super().__init__(f"{message} at position {position}")


class UnknownVariable(ParseError):
    pass


class RingMismatch(ValueError):
    pass


def _coerce(c):
    if isinstance(c, bool):
        raise TypeError("booleans are not coefficients")
    if isinstance(c, int):
        return c
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else c
    raise TypeError(f"coefficient must be int or Fraction, got {type(c).__name__}")


def degrevlex_key(e: Sequence[int]):
    return (sum(e), tuple(-x for x in reversed(e)))


@dataclass(frozen=True)
class Ring:
    """Polynomial ring Q[variables].

    ``involution`` is a tuple of ``(z, zbar)`` name pairs; a ring with an
    involution is a complexified ring and ``Polynomial.bar`` swaps each pair.
    Unpaired variables are fixed by the involution.
    """

    variables: tuple[str, ...]
    involution: tuple[tuple[str, str], ...] | None = None

    def __post_init__(self):
        vs = tuple(self.variables)
        object.__setattr__(self, "variables", vs)
        if not vs:
            raise ValueError("a ring needs at least one variable")
        for v in vs:
            if not isinstance(v, str) or not _NAME.match(v):
                raise ValueError(f"invalid variable name {v!r}")
        if len(set(vs)) != len(vs):
            raise ValueError("variable names must be distinct")
        if self.involution is not None:
            pairs = tuple((str(a), str(b)) for a, b in self.involution)
            seen = set()
            for a, b in pairs:
                if a == b or a not in vs or b not in vs or a in seen or b in seen:
                    raise ValueError(f"involution pair ({a}, {b}) is not a matching on ring variables")
                seen.update((a, b))
            object.__setattr__(self, "involution", pairs or None)

    @classmethod
    def complex(cls, n: int, stem: str = "z") -> "Ring":
        """Complexified ring in z1, zbar1, ..., zn, zbarn (interleaved)."""
        if n < 1:
            raise ValueError("complex dimension must be positive")
        names, pairs = [], []
        for i in range(1, n + 1):
            z, zb = f"{stem}{i}", f"{stem}bar{i}"
            names += [z, zb]
            pairs.append((z, zb))
        return cls(tuple(names), tuple(pairs))

    @property
    def nvars(self) -> int:
        return len(self.variables)

    @cached_property
    def _index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.variables)}

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise ValueError(f"{name!r} is not a variable of {self}") from None

    @property
    def is_complexified(self) -> bool:
        return self.involution is not None

    @cached_property
    def conjugation(self) -> tuple[int, ...]:
        perm = list(range(self.nvars))
        for a, b in self.involution or ():
            i, j = self.index(a), self.index(b)
            perm[i], perm[j] = j, i
        return tuple(perm)

    @cached_property
    def holomorphic(self) -> tuple[int, ...]:
        return tuple(self.index(a) for a, _ in self.involution or ())

    @cached_property
    def antiholomorphic(self) -> tuple[int, ...]:
        return tuple(self.index(b) for _, b in self.involution or ())

    def fresh_name(self, stem: str) -> str:
        if stem not in self._index:
            return stem
        k = 1
        while f"{stem}{k}" in self._index:
            k += 1
        return f"{stem}{k}"

    def extend(self, names: Iterable[str]) -> "Ring":
        return Ring(self.variables + tuple(names), self.involution)

    def var(self, name: str) -> "Polynomial":
        e = [0] * self.nvars
        e[self.index(name)] = 1
        return Polynomial(self, {tuple(e): 1})

    def gens(self) -> tuple["Polynomial", ...]:
        return tuple(self.var(v) for v in self.variables)

    def const(self, c) -> "Polynomial":
        c = _coerce(c)
        return Polynomial(self, {(0,) * self.nvars: c} if c else {})

    def zero(self) -> "Polynomial":
        return Polynomial(self, {})

    def one(self) -> "Polynomial":
        return self.const(1)

    def parse(self, text: str) -> "Polynomial":
        return parse_polynomial(text, self)

    def __str__(self):
        return f"Q[{', '.join(self.variables)}]"


def _lift(ring: Ring, other) -> "Polynomial":
    if isinstance(other, Polynomial):
        if other.ring != ring:
            raise RingMismatch(f"operands live in different rings: {ring} vs {other.ring}")
        return other
    return ring.const(other)


class Polynomial:
    """Immutable polynomial: a map from exponent tuples to nonzero rationals."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: Ring, terms: Mapping[tuple[int, ...], object] | None = None):
        clean = {}
        n = ring.nvars
        for e, c in (terms or {}).items():
            e = tuple(e)
            if len(e) != n or any(x < 0 for x in e):
                raise ValueError(f"bad exponent vector {e} for {ring}")
            c = _coerce(c)
            if c:
                clean[e] = c
        self.ring = ring
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, ring: Ring, terms: dict) -> "Polynomial":
        p = object.__new__(cls)
        p.ring = ring
        p.terms = terms
        p._hash = None
        return p

    # -- basic queries -------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self) -> bool:
        z = (0,) * self.ring.nvars
        return all(e == z for e in self.terms)

    def constant_value(self):
        return self.terms.get((0,) * self.ring.nvars, 0)

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, name: str) -> int:
        i = self.ring.index(name)
        return max((e[i] for e in self.terms), default=-1)

    def variables_used(self) -> tuple[str, ...]:
        used = set()
        for e in self.terms:
            used.update(i for i, x in enumerate(e) if x)
        return tuple(self.ring.variables[i] for i in sorted(used))

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def leading_term(self, key=degrevlex_key):
        e = max(self.terms, key=key)
        return e, self.terms[e]

    # -- arithmetic ----------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.ring == other.ring and self.terms == other.terms
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return self.terms == ({(0,) * self.ring.nvars: other} if other else {})
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self.terms.items())))
        return self._hash

    def __neg__(self):
        return Polynomial._raw(self.ring, {e: -c for e, c in self.terms.items()})

    def __pos__(self):
        return self

    def __add__(self, other):
        other = _lift(self.ring, other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = _coerce(v) if isinstance(v, Fraction) else v
            else:
                out.pop(e, None)
        return Polynomial._raw(self.ring, out)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-_lift(self.ring, other))

    def __rsub__(self, other):
        return _lift(self.ring, other) - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            c = _coerce(other)
            if not c:
                return self.ring.zero()
            return Polynomial._raw(self.ring, {e: _coerce(v * c) for e, v in self.terms.items()})
        other = _lift(self.ring, other)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0) + c1 * c2
        return Polynomial._raw(
            self.ring, {e: _coerce(c) for e, c in out.items() if c}
        )

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a non-negative integer")
        result, base = self.ring.one(), self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def scale_to_monic(self, key=degrevlex_key) -> "Polynomial":
        if not self.terms:
            return self
        _, c = self.leading_term(key)
        return self * (Fraction(1) / c)

    def primitive(self) -> "Polynomial":
        """Scale to integer coefficients with content 1 and positive leading coefficient."""
        if not self.terms:
            return self
        from math import gcd, lcm

        den = 1
        for c in self.terms.values():
            if isinstance(c, Fraction):
                den = lcm(den, c.denominator)
        ints = {e: int(c * den) for e, c in self.terms.items()}
        g = 0
        for c in ints.values():
            g = gcd(g, c)
        _, lc = max(ints.items(), key=lambda t: degrevlex_key(t[0]))
        if lc < 0:
            g = -g
        return Polynomial._raw(self.ring, {e: c // g for e, c in ints.items()})

    # -- calculus and maps ---------------------------------------------
    def diff(self, name: str) -> "Polynomial":
        i = self.ring.index(name)
        return self._diff_index(i)

    def _diff_index(self, i: int) -> "Polynomial":
        out = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                e2 = e[:i] + (k - 1,) + e[i + 1:]
                out[e2] = c * k
        return Polynomial._raw(self.ring, out)

    def bar(self) -> "Polynomial":
        if not self.ring.is_complexified:
            raise ValueError(f"{self.ring} has no involution")
        perm = self.ring.conjugation
        return Polynomial._raw(
            self.ring, {tuple(e[perm[i]] for i in range(len(e))): c for e, c in self.terms.items()}
        )

    def __call__(self, *point):
        if len(point) == 1 and isinstance(point[0], (list, tuple)):
            point = tuple(point[0])
        return evaluate(self, point)

    def to_ring(self, ring: Ring) -> "Polynomial":
        """Re-express in another ring, matching variables by name."""
        if ring == self.ring:
            return self
        idx = []
        for i, v in enumerate(self.ring.variables):
            idx.append(ring._index.get(v))
        out = {}
        for e, c in self.terms.items():
            e2 = [0] * ring.nvars
            for i, k in enumerate(e):
                if k:
                    j = idx[i]
                    if j is None:
                        raise RingMismatch(
                            f"variable {self.ring.variables[i]!r} is not in {ring}"
                        )
                    e2[j] = k
            out[tuple(e2)] = c
        return Polynomial._raw(ring, out)

    # -- printing ------------------------------------------------------
    def __str__(self):
        if not self.terms:
            return "0"
        names = self.ring.variables
        parts = []
        for e in sorted(self.terms, key=degrevlex_key, reverse=True):
            c = self.terms[e]
            mono = "*".join(
                (n if k == 1 else f"{n}^{k}") for n, k in zip(names, e) if k
            )
            neg = c < 0
            a = -c if neg else c
            if not mono:
                body = str(a)
            elif a == 1:
                body = mono
            else:
                body = f"{a}*{mono}"
            parts.append(("-" if neg else "+", body))
        s = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            s += f" {sign} {body}"
        return s

    def __repr__(self):
        return f"Polynomial({str(self)!r})"


# ----------------------------------------------------------------------
# parsing

_TOKEN = re.compile(r"\s*(?:(\d+(?:/\d+)?)|([A-Za-z][A-Za-z0-9_]*)|(.))")


def _tokenize(text: str):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            break
        start = m.start(m.lastindex) if m.lastindex else pos
        if m.group(1) is not None:
            out.append(("num", m.group(1), start))
        elif m.group(2) is not None:
            out.append(("name", m.group(2), start))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch.isspace():
                pos = m.end()
                continue
            if ch not in "+-*^()":
                raise ParseError(f"unexpected character {ch!r}", start, text)
            out.append(("op", ch, start))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str, ring: Ring):
        self.text = text
        self.ring = ring
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, value):
        t = self.take()
        if t[1] != value or t[0] == "num":
            raise ParseError(f"expected {value!r}, found {t[1] or 'end of input'!r}", t[2], self.text)

    def parse(self) -> Polynomial:
        p = self.expr()
        t = self.peek()
        if t[0] != "end":
            raise ParseError(f"unexpected {t[1]!r}", t[2], self.text)
        return p

    def expr(self) -> Polynomial:
        sign = 1
        t = self.peek()
        if t[0] == "op" and t[1] in "+-":
            self.take()
            sign = -1 if t[1] == "-" else 1
        acc = self.term() * sign
        while True:
            t = self.peek()
            if t[0] == "op" and t[1] in "+-":
                self.take()
                rhs = self.term()
                acc = acc + rhs if t[1] == "+" else acc - rhs
            else:
                return acc

    def term(self) -> Polynomial:
        acc = self.factor()
        while True:
            t = self.peek()
            if t[0] == "op" and t[1] == "*":
                self.take()
                acc = acc * self.factor()
            else:
                return acc

    def factor(self) -> Polynomial:
        base = self.atom()
        t = self.peek()
        if t[0] == "op" and t[1] == "^":
            self.take()
            n = self.take()
            if n[0] != "num" or "/" in n[1]:
                raise ParseError("exponent must be a natural number", n[2], self.text)
            return base ** int(n[1])
        return base

    def atom(self) -> Polynomial:
        t = self.take()
        kind, val, pos = t
        if kind == "num":
            num, _, den = val.partition("/")
            if den and int(den) == 0:
                raise ParseError("zero denominator", pos, self.text)
            return self.ring.const(Fraction(int(num), int(den) if den else 1))
        if kind == "name":
            if val not in self.ring._index:
                raise UnknownVariable(f"unknown variable {val!r}", pos, self.text)
            return self.ring.var(val)
        if kind == "op" and val == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        raise ParseError(f"unexpected {val or 'end of input'!r}", pos, self.text)


def parse_polynomial(text: str, ring: Ring) -> Polynomial:
    """Parse ASCII polynomial text such as ``"3/2*x^2 - y*(z + 1)"``."""
    return _Parser(text, ring).parse()


# ----------------------------------------------------------------------
# operations named in the module contract


def ring_arithmetic(op: str, a: Polynomial, b) -> Polynomial:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "pow":
        return a ** b
    raise ValueError(f"unknown operation {op!r}")


def differentiate(p: Polynomial, var: str) -> Polynomial:
    return p.diff(var)


def bar_involution(p: Polynomial) -> Polynomial:
    return p.bar()


def evaluate(p: Polynomial, point: Sequence) -> Fraction | int:
    """Exact value at a rational point given in ring variable order."""
    point = tuple(point)
    if len(point) != p.ring.nvars:
        raise ValueError(f"point has {len(point)} coordinates, ring has {p.ring.nvars}")
    point = tuple(_coerce(Fraction(x) if isinstance(x, str) else x) for x in point)
    total = 0
    for e, c in p.terms.items():
        v = c
        for x, k in zip(point, e):
            if k:
                v *= x ** k
        total += v
    return _coerce(total) if isinstance(total, Fraction) else total


def linear_substitute(p: Polynomial, matrix: Sequence[Sequence]) -> Polynomial:
    """Return ``p(A x)``: variable i is replaced by ``sum_j A[i][j] * x_j``."""
    ring = p.ring
    n = ring.nvars
    A = [[_coerce(Fraction(a)) for a in row] for row in matrix]
    if len(A) != n or any(len(row) != n for row in A):
        raise ValueError(f"matrix must be {n}x{n}")
    if _det(A) == 0:
        raise ValueError("singular matrix")
    gens = ring.gens()
    images = [sum((gens[j] * A[i][j] for j in range(n) if A[i][j]), ring.zero()) for i in range(n)]
    powers: dict[tuple[int, int], Polynomial] = {}

    def power(i, k):
        if (i, k) not in powers:
            powers[(i, k)] = images[i] ** k
        return powers[(i, k)]

    out = ring.zero()
    for e, c in p.terms.items():
        t = ring.const(c)
        for i, k in enumerate(e):
            if k:
                t = t * power(i, k)
        out = out + t
    return out
