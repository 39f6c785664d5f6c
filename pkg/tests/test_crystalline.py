import random
from math import factorial

import pytest

from dchern.cech import (TotalCochain, class_coordinates, class_equal, hyperplane_cocycle, line_bundle,
                         parse_bundle, projective_space, trivial_bundle)
from dchern.charclass import char_poly
from dchern.crystalline import (CrystallineError, DeRhamAlgebra, LiftedScheme, c1_de_rham,
                                canonical_connection_check, cris_vs_dr, crystal_obstruction_line, dp_char_poly,
                                elementary_symmetric, frobenius_pullback, lift_scheme, obstruction_equals_c1,
                                teichmuller_transition)
from dchern.rings import GF, QQ, ZZ, LaurentPoly, PolyAlgebra, Zmod
from dchern.selftest import lift_independence, random_overlap_unit, teichmuller_independence


@pytest.mark.parametrize("p", [2, 3, 5])
@pytest.mark.parametrize("d", [-2, 1, 3])
def test_frobenius_of_line_bundle(p, d):
    X = projective_space(2, GF(p))
    F = frobenius_pullback(line_bundle(X, d))
    assert F.transitions() == line_bundle(X, p * d).transitions()


def test_frobenius_blockwise_and_trivial():
    X = projective_space(1, GF(3))
    E = parse_bundle("O(1)+O(-1)", X)
    F = frobenius_pullback(E)
    assert [S.transitions() for S in F.summands] == [line_bundle(X, 3).transitions(),
                                                      line_bundle(X, -3).transitions()]
    assert frobenius_pullback(trivial_bundle(X, 2)).transitions() == trivial_bundle(X, 2).transitions()
    assert char_poly(F, method="split").in_hyperplane_basis() == [1, 0]


def test_frobenius_needs_prime_field():
    with pytest.raises(CrystallineError):
        frobenius_pullback(line_bundle(projective_space(1, QQ), 1))
    with pytest.raises(CrystallineError):
        lift_scheme(projective_space(1, ZZ))


@pytest.mark.parametrize("p", [2, 3, 5])
def test_canonical_connection(p):
    X = projective_space(2, GF(p))
    for E in (line_bundle(X, 1), parse_bundle("O(2)+O(-1)", X)):
        assert canonical_connection_check(E)
        assert not canonical_connection_check(E, pullback=False)
    assert canonical_connection_check(line_bundle(X, p), pullback=False)


def test_lift_reduces_to_base():
    X = projective_space(2, GF(3))
    LX = lift_scheme(X)
    assert LX.lifted.ring == Zmod(9)
    LX.check_reduction()
    Y = LX.lifted
    bad = dict(Y.maps)
    key = next(iter(bad))
    bad[key] = [f + LaurentPoly.one(Y.ring, Y.dim) for f in bad[key]]
    Y.maps = bad
    with pytest.raises(CrystallineError):
        LiftedScheme(X, Y)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_teichmuller_independent_of_lift(p):
    rng = random.Random(p)
    X = projective_space(2, GF(p))
    LX = lift_scheme(X)
    for _ in range(10):
        assert teichmuller_independence(rng, X, LX)


def test_teichmuller_of_a_constant():
    X = projective_space(1, GF(5))
    LX = lift_scheme(X)
    f = LaurentPoly.const(GF(5), 1, 2)
    # 2^5 = 32 = 7 mod 25, and 7 is the Teichmuller representative of 2
    assert teichmuller_transition(f, LX.charts[1]) == LaurentPoly.const(Zmod(25), 1, 7)
    unit = random_overlap_unit(random.Random(0), X, 0, 1)
    assert teichmuller_transition(unit, LX.charts[1]).map_coefficients(int, GF(5)) == unit.frobenius(5)


@pytest.mark.parametrize("p", [2, 3, 5])
@pytest.mark.parametrize("n", [1, 2])
def test_obstruction_is_first_chern_class(p, n):
    X = projective_space(n, GF(p))
    gen = TotalCochain.from_cech(hyperplane_cocycle(X))
    for d in range(-3, 4):
        E = line_bundle(X, d)
        ob = crystal_obstruction_line(E)
        assert ob.is_closed()
        assert class_equal(ob.de_rham, c1_de_rham(E))
        assert ob.coordinates() == GF(p)(d)
        assert class_coordinates(c1_de_rham(E), [gen]) == [GF(p)(d)]


def test_obstruction_under_perturbed_lift():
    rng = random.Random(11)
    for p in (2, 3):
        X = projective_space(2, GF(p))
        LX = lift_scheme(X)
        for d in (-1, 2):
            assert lift_independence(rng, X, LX, d)
            assert obstruction_equals_c1(line_bundle(X, d), LX)


def test_obstruction_rejects_higher_rank():
    X = projective_space(1, GF(3))
    with pytest.raises(CrystallineError):
        crystal_obstruction_line(parse_bundle("O(1)+O(1)", X))


@pytest.mark.parametrize("ring", [ZZ, GF(2), GF(3), GF(5)], ids=str)
def test_dp_char_poly_coefficients(ring):
    r = 4
    A = PolyAlgebra(ring, r)
    s = dp_char_poly(A.gens(), A)
    for k in range(r + 1):
        e = elementary_symmetric(A.gens(), k, A)
        assert A.eq(s[k], A.scale_int(e, (-1) ** k * factorial(k)))
        if ring.characteristic and k >= ring.characteristic:
            assert A.is_zero(s[k])


def test_dp_char_poly_truncation():
    A = PolyAlgebra(ZZ, 2)
    assert dp_char_poly(A.gens(), A, N=1).order == 1
    with pytest.raises(ValueError):
        dp_char_poly(A.gens(), A, N=3)


def test_cris_vs_dr_in_de_rham_cohomology():
    X = projective_space(2, GF(5))
    alg = DeRhamAlgebra(X)
    h = TotalCochain.from_cech(hyperplane_cocycle(X))
    rows = cris_vs_dr([h, h.scale(2)], alg)
    assert [alg.eq(dp, signed) for dp, signed, _ in rows] == [True, True, True]
    # the unsigned variant only agrees in even degree
    assert [alg.eq(dp, pos) for dp, _, pos in rows] == [True, False, True]


def test_de_rham_algebra_products():
    X = projective_space(2, GF(3))
    alg = DeRhamAlgebra(X)
    h = alg(hyperplane_cocycle(X))
    assert alg.eq(alg.mul(h, alg.one), h)
    assert alg.is_zero(alg.mul(alg.mul(h, h), h))
    assert not alg.eq(alg.mul(h, h), alg.zero)
