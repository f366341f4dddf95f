"""Hypothesis strategies for small polynomials and forms."""

from __future__ import annotations

from fractions import Fraction

from hypothesis import strategies as st

from levicore.polycalc import Polynomial, Ring

XYZ = Ring(("x", "y", "z"))
C2 = Ring.complex(2)

coefficients = st.one_of(
    st.integers(-5, 5),
    st.builds(Fraction, st.integers(-5, 5), st.integers(1, 4)),
)


def exponents(ring: Ring, max_degree: int):
    """Exponent tuples of total degree at most ``max_degree``, drawn without rejection."""

    @st.composite
    def build(draw):
        budget = draw(st.integers(0, max_degree))
        e = [0] * ring.nvars
        for _ in range(budget):
            e[draw(st.integers(0, ring.nvars - 1))] += 1
        return tuple(e)

    return build()


def polynomials(ring: Ring = XYZ, max_degree: int = 3, max_terms: int = 4):
    return st.dictionaries(exponents(ring, max_degree), coefficients, max_size=max_terms).map(
        lambda d: Polynomial(ring, d)
    )


def nonzero_polynomials(ring: Ring = XYZ, max_degree: int = 3, max_terms: int = 4):
    return polynomials(ring, max_degree, max_terms).filter(bool)
