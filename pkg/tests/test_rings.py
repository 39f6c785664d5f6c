from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from dchern.rings import (GF, QQ, ZZ, DifferentialForm, DividedPowerSeries, LaurentPoly, PolyAlgebra,
                          TruncatedPolyAlgebra, Zmod, dlog, dp_invert, dp_mul, make_ring, parse_laurent)

NAMES = ["x", "y"]


def lp(text, ring=QQ, names=NAMES):
    return parse_laurent(text, names, ring)


def test_scalar_rings():
    assert GF(5)(7) == 2
    assert GF(5).inv(2) == 3
    assert QQ(Fraction(2, 4)) == Fraction(1, 2)
    assert ZZ.characteristic == 0 and GF(3).characteristic == 3
    with pytest.raises(ZeroDivisionError):
        GF(5).inv(0)
    with pytest.raises(ZeroDivisionError):
        ZZ.inv(2)
    assert ZZ.inv(-1) == -1
    assert Zmod(9).is_nilpotent(3) and not Zmod(9).is_nilpotent(2)


def test_make_ring():
    assert make_ring("Z") is ZZ and make_ring("Q") is QQ
    assert make_ring("Fp:7").characteristic == 7
    assert make_ring({"Fp": 3}).characteristic == 3
    with pytest.raises(ValueError):
        make_ring("Fp:4")
    with pytest.raises(ValueError):
        make_ring("R")


def test_parse_and_print():
    f = lp("3*x^-1*y^2 - 1")
    assert f.terms == {(-1, 2): 3, (0, 0): -1}
    assert lp(f.to_string(NAMES)) == f
    assert lp("(x + 1)^2") == lp("x^2 + 2*x + 1")
    assert lp("1/2*x") * 2 == lp("x")
    with pytest.raises(ValueError):
        lp("x +")
    with pytest.raises(ValueError):
        lp("q")


def test_units_and_inverse():
    assert lp("x^-2*y").unit_inverse() == lp("x^2*y^-1")
    with pytest.raises(ZeroDivisionError):
        lp("x + 1").unit_inverse()
    R = Zmod(9)
    u = parse_laurent("1 + 3*x", NAMES, R)
    assert (u * u.unit_inverse()) == LaurentPoly.one(R, 2)


def test_subs_and_frobenius():
    f = lp("x^2*y^-1 + 3")
    g = f.subs([lp("y^-1"), lp("x*y^-1")])
    assert g == lp("y^-1*x^-1 + 3")
    h = parse_laurent("2*x + y^-1", NAMES, GF(3))
    assert h.frobenius(3) == parse_laurent("2*x^3 + y^-3", NAMES, GF(3))


def test_forms_basic():
    x, y = lp("x"), lp("y")
    dx, dy = DifferentialForm.from_poly(x).d(), DifferentialForm.from_poly(y).d()
    assert dx.wedge(dy) == -dy.wedge(dx)
    assert dx.wedge(dx).is_zero()
    assert dlog(lp("x^3*y^-1")) == dx * lp("3*x^-1") - dy * lp("y^-1")
    w = DifferentialForm.from_poly(lp("x^2*y")).d()
    assert w.d().is_zero()


small_poly = st.dictionaries(
    st.tuples(st.integers(-2, 2), st.integers(-2, 2)), st.integers(-3, 3), max_size=3
).map(lambda t: LaurentPoly(QQ, 2, t))


@given(small_poly, small_poly, small_poly)
def test_laurent_ring_axioms(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a


@given(small_poly, small_poly)
def test_d_is_derivation(f, g):
    F, G = DifferentialForm.from_poly(f), DifferentialForm.from_poly(g)
    lhs = DifferentialForm.from_poly(f * g).d()
    assert lhs == F.d() * g + G.d() * f


@given(small_poly, small_poly)
def test_d_squared_and_wedge_leibniz(f, g):
    a = DifferentialForm.from_poly(f).d() * g  # a 1-form
    b = DifferentialForm.from_poly(g).d() * f
    assert a.d().d().is_zero()
    assert a.wedge(b).d() == a.d().wedge(b) - a.wedge(b.d())


@given(small_poly)
def test_pullback_commutes_with_d(f):
    images = [lp("y^-1"), lp("x*y^-1")]
    dimages = [DifferentialForm.from_poly(i).d() for i in images]
    F = DifferentialForm.from_poly(f)
    assert F.d().pullback(images, dimages) == F.pullback(images, dimages).d()


def test_divided_power_product():
    A = PolyAlgebra(ZZ, 2)
    a, b = A.gens()
    s = dp_mul(DividedPowerSeries.linear(A, a, 2), DividedPowerSeries.linear(A, b, 2))
    # (1 + a t)(1 + b t) = 1 + (a + b) t + 2ab t^2/2!
    assert s[1] == a + b
    assert s[2] == (a * b).scale(2)


@given(st.lists(st.integers(-5, 5), min_size=1, max_size=4), st.sampled_from([QQ, GF(3), GF(5)]))
def test_dp_invert(coeffs, ring):
    A = TruncatedPolyAlgebra(ring, 3)
    s = DividedPowerSeries(A, [A.one] + [A(ring(c)) for c in coeffs])
    inv = dp_invert(s)
    assert dp_mul(s, inv) == DividedPowerSeries.one(A, s.order)


def test_dp_invert_needs_unit():
    A = PolyAlgebra(ZZ, 1)
    with pytest.raises(ValueError):
        dp_invert(DividedPowerSeries(A, [A.gen(0), A.one]))
