import random
from fractions import Fraction

import pytest

from levicore.distcore import core_iterate, is_core_trivial
from levicore.forms import parse_form
from levicore.groebner import EXACT, Ideal, hermitian_square_parts, ideal_membership, variety_equal
from levicore.kohn import (
    DefiningGerm,
    allowable_determinants,
    build_rigid,
    check_core_containment,
    kohn_initial,
    kohn_run,
    kohn_step,
    levi_module,
)
from levicore.polycalc import Ring

C1 = Ring.complex(1)
C2 = Ring.complex(2)


def h(text, ring=C1):
    return ring.parse(text)


def spc():
    return build_rigid(h("z1*zbar1"))


def finite_type():
    return build_rigid(h("z1^2*zbar1^2"), [h("z1^2")])


def flat():
    return build_rigid(C1.zero())


class TestBuildRigid:
    def test_strictly_pseudoconvex(self):
        g = spc()
        assert g.ring == C2
        assert g.r == C2.parse("1/2*z2 + 1/2*zbar2 + z1*zbar1")
        assert g.dimension == 2

    def test_recorded_components(self):
        C3 = Ring.complex(2)
        g = build_rigid(C3.parse("z1*z2*zbar1*zbar2"), [C3.parse("z1*z2")])
        assert g.F == (Ring.complex(3).parse("z1*z2"),)
        assert g.squares

    def test_non_hermitian(self):
        with pytest.raises(ValueError):
            build_rigid(h("z1^2"))

    def test_component_mismatch(self):
        with pytest.raises(ValueError):
            build_rigid(h("z1*zbar1"), [h("z1^2")])

    def test_needs_complexified_ring(self):
        with pytest.raises(ValueError):
            build_rigid(Ring(("x",)).parse("x^2"))

    def test_direct_germ_checks(self):
        with pytest.raises(ValueError):
            DefiningGerm(C2, C2.parse("z1"))


class TestLeviModule:
    def test_strictly_pseudoconvex(self):
        L = levi_module(spc())
        gens = set(L.generators)
        assert parse_form("zbar1*dz1 + 1/2*dz2", C2) in gens
        assert parse_form("dz1", C2) in gens
        tr = core_iterate(L, max_steps=4, hermitian=True)
        assert is_core_trivial(tr) is True

    def test_flat(self):
        L = levi_module(flat())
        # del r, delbar r and r times the frame; the Hessian rows vanish
        assert len(L) == 2 + 4
        tr = core_iterate(L, max_steps=4, hermitian=True)
        assert is_core_trivial(tr) is False

    def test_square_hessian(self):
        L = levi_module(finite_type())
        assert parse_form("4*z1*zbar1*dz1", C2) in set(L.generators)


class TestInitialIdeal:
    def test_strictly_pseudoconvex_is_unit(self):
        assert kohn_initial(spc()).is_unit()

    def test_finite_type_determinant(self):
        g = finite_type()
        I0 = kohn_initial(g)
        assert variety_equal(I0, Ideal(g.ring, [g.r, g.ring.parse("z1*zbar1")]))

    def test_flat_is_r(self):
        g = flat()
        assert kohn_initial(g).gb() == Ideal(g.ring, [g.r]).gb()


class TestDeterminants:
    def test_real_part_gives_constant(self):
        g = finite_type()
        dets = allowable_determinants(g, [g.ring.parse("z1 + zbar1")], 1)
        assert any(d.is_constant() for d in dets)

    def test_empty_generators(self):
        assert allowable_determinants(finite_type(), [], 1) == []

    def test_j_range(self):
        with pytest.raises(ValueError):
            allowable_determinants(finite_type(), [], 0)
        with pytest.raises(ValueError):
            allowable_determinants(finite_type(), [], 2)

    def test_r_alone(self):
        g = finite_type()
        I0 = kohn_initial(g)
        for d in allowable_determinants(g, [g.r], 1):
            assert ideal_membership(d, I0)

    def test_provenance_and_products(self):
        g = finite_type()
        gens = [g.ring.parse("z1 + zbar1"), g.ring.parse("z1 - zbar1")]
        plain = allowable_determinants(g, gens, 1, with_provenance=True)
        deep = allowable_determinants(g, gens, 1, product_depth=2, with_provenance=True)
        assert {d.tuple for d in plain} <= {d.tuple for d in deep}
        assert all(len(d.tuple) == 1 and d.j == 1 for d in deep)


class TestKohnRun:
    def test_strictly_pseudoconvex_terminates_at_zero(self):
        t = kohn_run(spc())
        assert (t.terminated, t.step_of_termination, len(t.steps)) == (True, 0, 1)

    def test_finite_type_terminates_at_two(self):
        t = kohn_run(finite_type())
        assert (t.terminated, t.step_of_termination, len(t.steps)) == (True, 2, 3)
        assert t.steps[1].hermitian
        assert all(s.status == EXACT for s in t.steps)

    def test_finite_type_without_recorded_components(self):
        # the single-term z1*zbar1 pattern is detected on its own
        t = kohn_run(build_rigid(h("z1^2*zbar1^2")))
        assert (t.terminated, t.step_of_termination) == (True, 2)

    def test_flat_stalls_at_r(self):
        g = flat()
        t = kohn_run(g)
        assert not t.terminated and t.verdict == "stalled"
        assert t.stalled_at == 1
        assert t.steps[-1].ideal.gb() == Ideal(g.ring, [g.r]).gb()

    def test_chain_grows(self):
        t = kohn_run(finite_type())
        for a, b in zip(t.steps, t.steps[1:]):
            assert all(ideal_membership(f, b.ideal) for f in a.ideal.generators)
            for d in b.determinants:
                assert ideal_membership(d.value, b.ideal)

    def test_kohn_step_matches_run(self):
        g = finite_type()
        t = kohn_run(g)
        I1, status = kohn_step(g, t.steps[0].ideal)
        assert I1.gb() == t.steps[1].ideal.gb() and status == EXACT

    def test_cap(self):
        t = kohn_run(finite_type(), max_steps=1)
        assert t.cap_hit and t.verdict == "unknown"


class TestContainment:
    @pytest.mark.parametrize("germ", [spc, finite_type, flat], ids=["spc", "z4", "flat"])
    def test_golden_models(self, germ):
        report = check_core_containment(germ(), 2)
        assert report.passed, report.failures
        assert {e.k for e in report.entries} == {0, 1, 2}

    def test_square_jacobian_domain(self):
        g = build_rigid(h("z1^2*zbar1^2"), [h("z1^2")])
        assert check_core_containment(g, 2).passed

    def test_strictly_pseudoconvex_depth_zero(self):
        report = check_core_containment(spc(), 0)
        assert report.passed and {e.k for e in report.entries} == {0}


def test_hermitian_parts_vanish_on_real_points():
    # sample involution-fixed rational points on the zero set of |p|^2 + |q|^2
    # sums: the real and imaginary parts of p must vanish there
    C = Ring.complex(2)
    rng = random.Random(4)
    cases = [("z1*zbar1", ()), ("z1^2*zbar1^2", ()), ("z1*z2*zbar1*zbar2", ((C.parse("z1*z2*zbar1*zbar2"), (C.parse("z1*z2"),)),))]
    for text, squares in cases:
        f = C.parse(text)
        parts = hermitian_square_parts(f, squares)
        assert parts
        for _ in range(30):
            # real points: zbar_j is the conjugate of z_j; take z_j = a_j + i b_j
            # on the zero set, where some z_j = 0
            vals = [Fraction(rng.randint(-3, 3)) for _ in range(4)]
            j = rng.randrange(2)
            vals[2 * j] = vals[2 * j + 1] = 0
            a = {f"z{k + 1}": (vals[2 * k], vals[2 * k + 1]) for k in range(2)}
            pt = _real_point(C, a)
            if _complex_eval(f, pt) != 0:
                continue
            for q in parts:
                assert _complex_eval(q, pt) == 0


def _real_point(C, parts):
    """Map z_j = a + ib to values of (z_j, zbar_j) as Gaussian rationals."""
    pt = []
    for name in C.variables:
        if name.startswith("zbar"):
            a, b = parts["z" + name[4:]]
            pt.append((a, -b))
        else:
            pt.append(parts[name])
    return pt


def _complex_eval(p, pt):
    total = (Fraction(0), Fraction(0))
    for e, c in p.terms.items():
        term = (Fraction(c), Fraction(0))
        for (re, im), k in zip(pt, e):
            for _ in range(k):
                term = (term[0] * re - term[1] * im, term[0] * im + term[1] * re)
        total = (total[0] + term[0], total[1] + term[1])
    return total if total != (0, 0) else 0
