from fractions import Fraction
from itertools import combinations

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from levicore.forms import (
    FormModule,
    KForm,
    antiholomorphic_derivative,
    del_delbar,
    exterior_derivative,
    holomorphic_derivative,
    parse_form,
    pullback,
    top_coefficient,
    wedge,
)
from levicore.polycalc import ParseError, Ring, RingMismatch

from strategies import C2, XYZ, polynomials

R = XYZ


def form(text, ring=R):
    return parse_form(text, ring)


def P(text, ring=R):
    return ring.parse(text)


@st.composite
def kforms(draw, ring=R, degree=None):
    k = draw(st.integers(0, ring.nvars)) if degree is None else degree
    comps = {}
    for idx in combinations(range(ring.nvars), k):
        if draw(st.booleans()):
            comps[idx] = draw(polynomials(ring, max_degree=2, max_terms=2))
    return KForm(ring, k, comps)


class TestWedge:
    def test_dx_dx_vanishes(self):
        dx = KForm.covector(R, "x")
        assert wedge(dx, dx).is_zero()

    def test_anticommuting_covectors(self):
        dx, dy = KForm.covector(R, "x"), KForm.covector(R, "y")
        assert wedge(dx, dy) == -wedge(dy, dx)

    def test_whitney_triple(self):
        a, b, c = form("x*dx - y*dz"), form("z*dx + dy"), form("z*dy + x*dz")
        vol = wedge(wedge(a, b), c)
        assert vol.degree == 3
        assert top_coefficient(vol) == P("x^2 - y*z^2")
        # oracle: the wedge of three 1-forms is the determinant of their rows
        x, y, z = sympy.symbols("x y z")
        M = sympy.Matrix([[x, 0, -y], [z, 1, 0], [0, z, x]])
        assert sympy.expand(M.det() - (x**2 - y * z**2)) == 0

    def test_overflow_is_zero(self):
        vol = wedge(wedge(form("dx"), form("dy")), form("dz"))
        assert wedge(vol, form("dx")).is_zero()

    def test_ring_mismatch(self):
        with pytest.raises(RingMismatch):
            wedge(form("dx"), KForm.covector(Ring(("x",)), "x"))

    @settings(max_examples=60, deadline=None)
    @given(kforms(), kforms())
    def test_graded_antisymmetry(self, a, b):
        sign = -1 if (a.degree * b.degree) % 2 else 1
        assert wedge(a, b) == wedge(b, a) * sign

    @settings(max_examples=60, deadline=None)
    @given(kforms(degree=1), kforms(degree=1), kforms(degree=1))
    def test_associativity(self, a, b, c):
        assert wedge(wedge(a, b), c) == wedge(a, wedge(b, c))

    @settings(max_examples=40, deadline=None)
    @given(
        st.lists(polynomials(max_degree=1, max_terms=2), min_size=3, max_size=3),
        st.lists(polynomials(max_degree=1, max_terms=2), min_size=3, max_size=3),
        polynomials(max_degree=1, max_terms=2),
    )
    def test_top_coefficient_multilinear(self, u, v, lam):
        a = KForm.from_coefficients(R, u)
        b = KForm.from_coefficients(R, v)
        w = form("z*dy + x*dz")
        lhs = top_coefficient(wedge(wedge(a * lam + b, form("dx + y*dz")), w))
        rhs = top_coefficient(wedge(wedge(a, form("dx + y*dz")), w)) * lam + top_coefficient(
            wedge(wedge(b, form("dx + y*dz")), w)
        )
        assert lhs == rhs


class TestExteriorDerivative:
    def test_whitney_differential(self):
        assert exterior_derivative(P("x^2 - y*z^2")) == form("2*x*dx - z^2*dy - 2*y*z*dz")

    def test_constant(self):
        assert exterior_derivative(P("5/2")).is_zero()

    @settings(max_examples=100, deadline=None)
    @given(polynomials(max_degree=4))
    def test_dd_is_zero(self, p):
        assert exterior_derivative(exterior_derivative(p)).is_zero()

    @settings(max_examples=50, deadline=None)
    @given(kforms(), kforms())
    def test_leibniz(self, a, b):
        sign = -1 if a.degree % 2 else 1
        lhs = exterior_derivative(wedge(a, b))
        rhs = wedge(exterior_derivative(a), b) + wedge(a, exterior_derivative(b)) * sign
        assert lhs == rhs


class TestDelDelbar:
    def test_hermitian_square(self):
        C1 = Ring.complex(1)
        d, db = del_delbar(P("z1*zbar1", C1))
        assert d == form("zbar1*dz1", C1)
        assert db == form("z1*dzbar1", C1)

    def test_antiholomorphic_is_killed_by_del(self):
        C1 = Ring.complex(1)
        assert holomorphic_derivative(P("zbar1", C1)).is_zero()

    def test_levi_form_of_hermitian_square(self):
        C1 = Ring.complex(1)
        ddb = holomorphic_derivative(antiholomorphic_derivative(P("z1*zbar1", C1)))
        assert ddb == wedge(form("dz1", C1), form("dzbar1", C1))

    def test_strictly_pseudoconvex_top_coefficient(self):
        r = P("z1*zbar1 + 1/2*z2 + 1/2*zbar2", C2)
        d, db = del_delbar(r)
        levi = holomorphic_derivative(db)
        c = top_coefficient(wedge(wedge(d, db), levi))
        assert c.is_constant() and c.constant_value() != 0

    def test_needs_involution(self):
        with pytest.raises(ValueError):
            holomorphic_derivative(P("x"))

    @settings(max_examples=100, deadline=None)
    @given(polynomials(C2, max_degree=4))
    def test_del_identities(self, p):
        d, db = del_delbar(p)
        assert d + db == exterior_derivative(p)
        assert holomorphic_derivative(d).is_zero()
        assert antiholomorphic_derivative(db).is_zero()
        assert holomorphic_derivative(db) == -antiholomorphic_derivative(d)


class TestParsingAndPullback:
    def test_print_parse(self):
        a = form("(x - y)*dx + 3/2*dz")
        assert form(str(a)) == a

    def test_zero_form_literal(self):
        assert form("0").is_zero()

    @pytest.mark.parametrize("text", ["x", "dx*dy", "x*dx +", "dw"])
    def test_malformed(self, text):
        with pytest.raises(ParseError):
            form(text)

    def test_module_split(self):
        M = FormModule.parse(R, "x*dx - y*dz, z*dx + dy, (x + 1)*dy")
        assert len(M) == 3
        assert M.matrix()[2] == [R.zero(), P("x + 1"), R.zero()]

    def test_pullback_of_exact_form(self):
        # d commutes with pullback
        A = [[1, 2, 0], [0, 1, -1], [1, 0, 1]]
        from levicore.polycalc import linear_substitute

        p = P("x^2 - y*z^2")
        assert pullback(exterior_derivative(p), A) == exterior_derivative(linear_substitute(p, A))

    def test_pullback_identity(self):
        a = form("x*dx - y*dz")
        one = [[Fraction(int(i == j)) for j in range(3)] for i in range(3)]
        assert pullback(a, one) == a
