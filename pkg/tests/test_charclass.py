import random

import pytest
from hypothesis import given, settings, strategies as st

from dchern.cech import (VectorBundle, bundle_algebra, bundle_from_spec, class_equal, cech_cohomology,
                         is_cocycle, line_bundle, parse_bundle,
                         projective_space, trivial_bundle, twisted)
from dchern.charclass import (DivisionObstruction, FreeComplex, atiyah_cocycle, char_poly, det_minor_oracle,
                              newton_char_coefficient, newton_elementary, newton_from_matrix, power_sum,
                              pull_to_original_frame, retrivialize, whitney_check)
from dchern.rings import GF, QQ, ZZ, LaurentPoly, dlog, parse_laurent
from dchern.selftest import random_chart_units, trivialization_independence


def tangent_bundle(X):
    """Frames d/du^a_i; e^a_i = sum_j (du^b_j / du^a_i) e^b_j."""
    n = X.dim
    trans = {}
    for a in range(X.nchart):
        for b in range(a + 1, X.nchart):
            imgs = X.images(b, a)
            trans[(a, b)] = [[X.move(imgs[j].derivative(i), a, b) for j in range(n)] for i in range(n)]
    return VectorBundle(X, n, trans, name="T")


def coords(E, **kw):
    return char_poly(E, **kw).in_hyperplane_basis()


# ---------------------------------------------------------------- Atiyah cocycles

@pytest.mark.parametrize("d", [-2, 1, 3])
def test_atiyah_of_line_bundle_on_p1(d):
    X = projective_space(1, QQ)
    A = atiyah_cocycle(line_bundle(X, d)).cochain
    w = X.parse("w", 1)
    # g_01 = z^-d = w^d, so g^-1 dg = d dw/w = -d dz/z
    assert A.values == {(0, 1): ((dlog(w) * d,),)}


def test_atiyah_of_trivial_and_split_bundles():
    X = projective_space(2, QQ)
    assert atiyah_cocycle(trivial_bundle(X, 3)).cochain.is_zero()
    E = parse_bundle("O(1)+O(-2)", X)
    A = atiyah_cocycle(E).cochain
    A1, A2 = atiyah_cocycle(line_bundle(X, 1)).cochain, atiyah_cocycle(line_bundle(X, -2)).cochain
    for tup, v in A.values.items():
        assert v[0][1].is_zero() and v[1][0].is_zero()
        assert v[0][0] == A1.value(tup)[0][0] and v[1][1] == A2.value(tup)[0][0]
    assert is_cocycle(A)


@pytest.mark.parametrize("bundle", ["O(2)", "O(1)+O(-1)", "tangent"])
def test_right_convention_agrees(bundle):
    X = projective_space(2, QQ)
    E = tangent_bundle(X) if bundle == "tangent" else parse_bundle(bundle, X)
    assert atiyah_cocycle(E, "right").cochain == atiyah_cocycle(E, "left").cochain


def test_atiyah_is_a_cocycle_for_nonsplit_bundles():
    X = projective_space(2, QQ)
    T = tangent_bundle(X)
    assert is_cocycle(atiyah_cocycle(T).cochain)
    for j in (1, 2, 3):
        assert is_cocycle(power_sum(atiyah_cocycle(T), j))
    assert power_sum(atiyah_cocycle(T), 3).is_zero()


@pytest.mark.parametrize("seed", range(8))
def test_trivialization_independence(seed):
    rng = random.Random(seed)
    X = projective_space(1 + seed % 2, QQ)
    assert trivialization_independence(rng, X, rng.randint(-2, 2), rng.randint(-2, 2))


def test_retrivialized_cocycle_differs_by_a_coboundary():
    rng = random.Random(3)
    X = projective_space(2, QQ)
    E = parse_bundle("O(1)+O(2)", X)
    hs = random_chart_units(rng, X, 2)
    E2 = retrivialize(E, hs)
    A = atiyah_cocycle(E).cochain
    A2 = pull_to_original_frame(atiyah_cocycle(E2).cochain, E, hs)
    assert class_equal(A, A2)
    # the difference is the coboundary of s_a = h_a^-1 dh_a
    assert coords(E2) == [1, 3, 2]


# ---------------------------------------------------------------- characteristic polynomial

@pytest.mark.parametrize("ring", [QQ, GF(5), ZZ], ids=str)
def test_tangent_bundle_of_p2(ring):
    X = projective_space(2, ring)
    T = tangent_bundle(X)
    assert coords(T) == [1, 3, 3]
    assert coords(bundle_algebra("dual", T)) == [1, ring(-3), 3]
    res = cech_cohomology(X, twisted(T), want_basis=False)
    assert [res.rank(q) for q in range(3)] == [8, 0, 0]


def test_tangent_bundle_of_p1_is_o2():
    X = projective_space(1, QQ)
    assert coords(tangent_bundle(X)) == [1, 2]


@pytest.mark.parametrize("a,b", [(1, 2), (-1, 3), (0, -2)])
def test_dual_negates_odd_classes(a, b):
    X = projective_space(2, QQ)
    E = parse_bundle(f"O({a})+O({b})", X)
    assert coords(bundle_algebra("dual", E)) == [1, -(a + b), a * b]


def test_nonsplit_extension_on_p1():
    X = projective_space(1, QQ)
    E = bundle_from_spec({"0,1": [["w^-1", "3*w"], ["0", "w^-2"]]}, X)
    assert coords(E) == [1, -3]


def test_newton_and_split_agree():
    X = projective_space(2, QQ)
    for a in (-2, 0, 1):
        for b in (-1, 2):
            E = parse_bundle(f"O({a})+O({b})", X)
            assert char_poly(E, method="newton").equals(char_poly(E, method="split"))


def test_division_obstruction_in_small_characteristic():
    X = projective_space(2, GF(2))
    E = parse_bundle("O(1)+O(1)", X)
    with pytest.raises(DivisionObstruction):
        char_poly(E, method="newton")
    c = char_poly(E, method="auto")
    assert c.method == "split"
    assert c.in_hyperplane_basis() == [1, 0, 1]


def test_free_complex():
    X = projective_space(2, QQ)
    # [O(a) -> O(b)] in degrees 1, 0: c = (1 + b h) / (1 + a h)
    a, b = 1, 3
    c = char_poly(FreeComplex({0: line_bundle(X, b), 1: line_bundle(X, a)}))
    assert c.in_hyperplane_basis() == [1, b - a, a * a - a * b]
    unit = char_poly(FreeComplex({0: line_bundle(X, 2), 1: line_bundle(X, 2)}))
    assert unit.in_hyperplane_basis() == [1, 0, 0]


@pytest.mark.parametrize("ring", [QQ, GF(5)], ids=str)
def test_whitney(ring):
    X = projective_space(2, ring)
    assert whitney_check(line_bundle(X, 2), line_bundle(X, -1))
    T = tangent_bundle(X)
    assert whitney_check(T, line_bundle(X, 1))


def test_char_poly_inverse():
    X = projective_space(2, QQ)
    c = char_poly(parse_bundle("O(1)+O(2)", X))
    one = c * c.inverse()
    assert one.in_hyperplane_basis() == [1, 0, 0]


# ---------------------------------------------------------------- symbolic side

def poly(text, k):
    return parse_laurent(text, [f"p{i + 1}" for i in range(k)], QQ)


def test_displayed_formulas():
    assert newton_elementary(2) == poly("1/2*p1^2 - 1/2*p2", 2)
    assert newton_elementary(3) == poly("1/3*p3 - 1/2*p1*p2 + 1/6*p1^3", 3)
    assert newton_char_coefficient(1) == poly("-p1", 1)
    assert newton_char_coefficient(3) == -newton_elementary(3)


def test_newton_elementary_on_numbers():
    # e_k of (1, 2, 3) from its power sums 6, 14, 36
    for k, e in ((1, 6), (2, 11), (3, 6)):
        f = newton_elementary(k)
        consts = [LaurentPoly.const(QQ, f.nvars, x) for x in (6, 14, 36)[:f.nvars]]
        assert f.subs(consts).constant_term() == e


symbols = [LaurentPoly.var(QQ, 9, i) for i in range(9)]


@settings(max_examples=30)
@given(st.lists(st.lists(st.integers(-2, 2), min_size=9, max_size=9), min_size=9, max_size=9))
def test_newton_matches_minors_on_symbolic_matrices(mix):
    # entries are random integer combinations of nine independent symbols
    A = [[sum((symbols[s] * c for s, c in enumerate(mix[3 * i + j]) if c), LaurentPoly.zero(QQ, 9))
          for j in range(3)] for i in range(3)]
    one = LaurentPoly.one(QQ, 9)
    for k in range(4):
        assert newton_from_matrix(A, k, one) == det_minor_oracle(A, k, one)


def test_newton_on_generic_symbolic_matrix():
    one = LaurentPoly.one(QQ, 9)
    A = [[symbols[3 * i + j] for j in range(3)] for i in range(3)]
    for k in range(4):
        assert newton_from_matrix(A, k, one) == det_minor_oracle(A, k, one)
    assert det_minor_oracle(A, 5, one).is_zero()
