import random
from itertools import combinations
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from dchern.cech import (CechCochain, CochainError, NotGradable, SchemeError, Sheaf, TotalCochain,
                         bundle_algebra, bundle_from_spec, cech_cohomology, cech_differential, class_coordinates,
                         class_equal, cohomology_group, cup, de_rham_cohomology, endomorphisms, forms,
                         hyperplane_cocycle, hyperplane_power, is_coboundary, is_cocycle, line_bundle,
                         parse_bundle, projective_space, scheme_from_dict, total_cup, total_differential,
                         trivial_bundle, twisted, unit_cochain)
from dchern.cech.scheme import affine_space
from dchern.rings import GF, QQ, ZZ, DifferentialForm, LaurentPoly


def h_oracle(n, d, q):
    if q == 0:
        return comb(n + d, n) if d >= 0 else 0
    if q == n:
        return comb(-d - 1, n) if d <= -n - 1 else 0
    return 0


# ---------------------------------------------------------------- P1 x P1 as a chart document

def p1xp1_doc():
    bits = [(0, 0), (1, 0), (0, 1), (1, 1)]
    names = [["X" if bx else "x", "Y" if by else "y"] for bx, by in bits]
    overlaps = []
    for a in range(4):
        for b in range(4):
            if a == b:
                continue
            inv = [names[a][i] for i in range(2) if bits[a][i] != bits[b][i]]
            mp = {}
            for i in range(2):
                mp[names[b][i]] = names[a][i] if bits[a][i] == bits[b][i] else f"{names[a][i]}^-1"
            overlaps.append({"pair": [a, b], "invert": inv, "map": mp})
    return {"charts": names, "overlaps": overlaps}, bits


def p1xp1_line(X, bits, d, e):
    trans = {}
    for a in range(4):
        for b in range(a + 1, 4):
            exps = []
            for i, k in enumerate((d, e)):
                # t_c = x^(k * bit_c); x is var_i in chart b when bit_b = 0, else var_i^-1
                sgn = -1 if bits[b][i] else 1
                exps.append(k * (bits[a][i] - bits[b][i]) * sgn)
            trans[f"{a},{b}"] = [[LaurentPoly.monomial(X.ring, tuple(exps)).to_string(X.charts[b])]]
    return bundle_from_spec(trans, X, name=f"O({d},{e})")


@pytest.fixture(scope="module")
def quadric():
    doc, bits = p1xp1_doc()
    X = scheme_from_dict(doc, QQ)
    return X, bits


def test_quadric_scheme_validates(quadric):
    X, _ = quadric
    X.validate()
    W, _inv = X.weights()
    assert len(W) == 4


@pytest.mark.parametrize("d,e", [(0, 0), (1, 0), (1, 2), (-2, 0), (-2, 1), (-2, -3), (2, -2)])
def test_quadric_kunneth(quadric, d, e):
    X, bits = quadric
    L = p1xp1_line(X, bits, d, e)
    res = cech_cohomology(X, twisted(L), want_basis=False)
    h0 = lambda k: max(k + 1, 0)
    h1 = lambda k: max(-k - 1, 0)
    want = [h0(d) * h0(e), h0(d) * h1(e) + h1(d) * h0(e), h1(d) * h1(e)]
    assert [res.rank(q) for q in range(3)] == want


def test_quadric_hodge_and_de_rham(quadric):
    X, _ = quadric
    hodge = [[cohomology_group(X, forms(p), q, want_basis=False).rank(q) for q in range(3)] for p in range(3)]
    assert hodge == [[1, 0, 0], [0, 2, 0], [0, 0, 1]]
    betti = [de_rham_cohomology(X, k, want_basis=False).rank(k) for k in range(5)]
    assert betti == [1, 0, 2, 0, 1]


def test_quadric_cup_is_commutative_and_nondegenerate(quadric):
    X, _ = quadric
    g1, g2 = cohomology_group(X, forms(1), 1).basis[1]
    top = cohomology_group(X, forms(2), 2).basis[2]
    assert class_equal(cup(g1, g2), cup(g2, g1))
    assert class_coordinates(cup(g1, g2), top) not in (None, [0])
    assert is_coboundary(cup(g1, g1)) and is_coboundary(cup(g2, g2))


# ---------------------------------------------------------------- projective spaces

@pytest.mark.parametrize("n", [1, 2])
@pytest.mark.parametrize("d", [-4, -3, -1, 0, 2])
def test_line_bundle_grid(n, d):
    X = projective_space(n, QQ)
    res = cech_cohomology(X, twisted(line_bundle(X, d)), want_basis=False)
    assert [res.rank(q) for q in range(n + 1)] == [h_oracle(n, d, q) for q in range(n + 1)]


def test_integral_cohomology_is_torsion_free():
    X = projective_space(2, ZZ)
    res = cech_cohomology(X, twisted(line_bundle(X, -4)), want_basis=False)
    assert res.rank(2) == 3 and res.torsion(2) == ()
    assert cohomology_group(X, forms(1), 1, want_basis=False).torsion(1) == ()


@pytest.mark.parametrize("d", range(-4, 2))
def test_serre_duality_on_p2(d):
    X = projective_space(2, GF(3))
    a = cech_cohomology(X, twisted(line_bundle(X, d)), want_basis=False)
    b = cech_cohomology(X, twisted(line_bundle(X, -d - 3)), want_basis=False)
    assert [a.rank(q) for q in range(3)] == [b.rank(2 - q) for q in range(3)]


@pytest.mark.parametrize("ring", [QQ, GF(2)], ids=str)
def test_hodge_numbers_of_p2(ring):
    X = projective_space(2, ring)
    hodge = [[cohomology_group(X, forms(p), q, want_basis=False).rank(q) for q in range(3)] for p in range(3)]
    assert hodge == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]


def test_twisted_forms_on_p1():
    # Omega^1(d) = O(d - 2) on P1
    X = projective_space(1, QQ)
    for d in (-1, 0, 3):
        a = cech_cohomology(X, twisted(line_bundle(X, d), 1), want_basis=False)
        b = cech_cohomology(X, twisted(line_bundle(X, d - 2)), want_basis=False)
        assert [a.rank(q) for q in (0, 1)] == [b.rank(q) for q in (0, 1)]


def test_de_rham_of_affine_line():
    X = affine_space(1, QQ)
    assert [de_rham_cohomology(X, k, want_basis=False).rank(k) for k in range(3)] == [1, 0, 0]


def test_truncation_flag():
    # H^0 of the affine line is infinite dimensional, so the box always cuts it off
    X = affine_space(1, QQ)
    assert cech_cohomology(X, twisted(line_bundle(X, 0)), want_basis=False).truncated == (0,)
    assert de_rham_cohomology(X, [0, 1], want_basis=False).truncated == ()
    P = projective_space(1, QQ)
    assert cech_cohomology(P, twisted(line_bundle(P, 2)), box=1, want_basis=False).truncated == (0,)
    for n in (1, 2):
        P = projective_space(n, QQ)
        for d in range(-4, 5):
            assert cech_cohomology(P, twisted(line_bundle(P, d)), want_basis=False).truncated == ()


def test_hyperplane_class():
    for n in (1, 2):
        X = projective_space(n, QQ)
        h = hyperplane_cocycle(X)
        assert is_cocycle(h) and not is_coboundary(h)
        assert not class_equal(h, h.scale(2))
        assert class_equal(h + h, h.scale(2))
    X = projective_space(1, QQ)
    assert hyperplane_power(X, 2).is_zero() or is_coboundary(hyperplane_power(X, 2))
    X = projective_space(2, QQ)
    gen = cohomology_group(X, forms(2), 2).basis[2]
    assert class_coordinates(hyperplane_power(X, 2), gen) not in (None, [0])


def test_class_comparison_rejects_mismatched_degrees():
    X = projective_space(2, QQ)
    h = hyperplane_cocycle(X)
    with pytest.raises(CochainError):
        class_equal(h, hyperplane_power(X, 2))
    with pytest.raises(CochainError):
        class_equal(h, TotalCochain.from_cech(h))


# ---------------------------------------------------------------- bundles

def test_bundle_algebra():
    X = projective_space(2, QQ)
    L1, L2 = line_bundle(X, 1), line_bundle(X, 2)
    E = bundle_algebra("direct_sum", L1, L2)
    assert E.rank == 2 and len(E.summands) == 2
    T = bundle_algebra("tensor", L1, L2)
    assert T.g(0, 1) == line_bundle(X, 3).g(0, 1)
    D = bundle_algebra("dual", L2)
    assert D.g(0, 2) == line_bundle(X, -2).g(0, 2)
    det = bundle_algebra("det", E)
    assert det.g(1, 2) == line_bundle(X, 3).g(1, 2)
    W = bundle_algebra("wedge", bundle_algebra("direct_sum", L1, L1, L1), k=2)
    assert W.rank == 3
    res = cech_cohomology(X, twisted(W), want_basis=False)
    assert res.rank(0) == 3 * 6  # Wedge^2(O(1)^3) = O(2)^3


def test_bundle_mini_language():
    X = projective_space(1, QQ)
    assert parse_bundle("O(1)+O(-1)", X).rank == 2
    assert parse_bundle("trivial:3", X).rank == 3
    for bad in ("O(x)", "trivial:0", "Q(1)", "O(1)+"):
        with pytest.raises(SchemeError):
            parse_bundle(bad, X)


def test_end_of_split_bundle():
    X = projective_space(1, QQ)
    E = parse_bundle("O(0)+O(2)", X)
    res = cech_cohomology(X, endomorphisms(E), want_basis=False)
    # End = O + O + O(2) + O(-2)
    assert [res.rank(0), res.rank(1)] == [1 + 1 + 3, 1]


def test_bad_bundles_and_schemes():
    X = projective_space(1, QQ)
    with pytest.raises((SchemeError, ZeroDivisionError)):
        bundle_from_spec({"0,1": [["w + 1"]]}, X)
    E = bundle_from_spec({"0,1": [["1", "w + 1"], ["0", "1"]]}, X)
    with pytest.raises(NotGradable):
        cech_cohomology(X, twisted(E))
    doc, _ = p1xp1_doc()
    doc["overlaps"][0]["map"] = {"X": "x^-2", "y": "y"}
    with pytest.raises(SchemeError):
        scheme_from_dict(doc, QQ)


# ---------------------------------------------------------------- cochain algebra

def random_form(rng, X, tup, w):
    units = X.units_on(tup, tup[-1])
    terms = {}
    for J in combinations(range(X.dim), w):
        if rng.random() < 0.4:
            continue
        poly = {}
        for _ in range(rng.randint(1, 2)):
            e = tuple(rng.randint(-2, 2) if i in units else rng.randint(0, 2) for i in range(X.dim))
            poly[e] = rng.randint(-3, 3)
        terms[J] = LaurentPoly(X.ring, X.dim, poly)
    return DifferentialForm(X.ring, X.dim, w, terms)


def random_cochain(rng, X, q, w):
    vals = {tup: random_form(rng, X, tup, w) for tup in X.tuples(q) if rng.random() < 0.8}
    return CechCochain(X, q, Sheaf(w), vals)


def random_total(rng, X, n):
    return TotalCochain(X, n, [random_cochain(rng, X, n - w, w) for w in range(0, min(n, X.dim) + 1)
                               if n - w <= X.nchart - 1])


P2 = projective_space(2, QQ)
bideg = st.tuples(st.integers(0, 2), st.integers(0, 2))


@settings(max_examples=25)
@given(st.integers(0, 10**6), bideg)
def test_delta_squared_is_zero(seed, qw):
    c = random_cochain(random.Random(seed), P2, *qw)
    assert cech_differential(cech_differential(c)).is_zero()


@settings(max_examples=25)
@given(st.integers(0, 10**6), bideg, bideg, bideg)
def test_cup_is_associative(seed, a, b, c):
    rng = random.Random(seed)
    x, y, z = (random_cochain(rng, P2, *t) for t in (a, b, c))
    assert cup(cup(x, y), z) == cup(x, cup(y, z))


@settings(max_examples=25)
@given(st.integers(0, 10**6), bideg)
def test_unit_cochain(seed, a):
    x = random_cochain(random.Random(seed), P2, *a)
    one = unit_cochain(P2)
    assert cup(one, x) == x and cup(x, one) == x


@settings(max_examples=25)
@given(st.integers(0, 10**6), bideg, bideg)
def test_cech_leibniz(seed, a, b):
    rng = random.Random(seed)
    x, y = random_cochain(rng, P2, *a), random_cochain(rng, P2, *b)
    sign = -1 if (x.q + x.w) % 2 else 1
    lhs = cech_differential(cup(x, y))
    rhs = cup(cech_differential(x), y) + cup(x, cech_differential(y)).scale(sign)
    assert lhs == rhs


@settings(max_examples=20)
@given(st.integers(0, 10**6), st.integers(0, 3), st.integers(0, 3))
def test_total_differential_is_a_derivation(seed, m, n):
    rng = random.Random(seed)
    a, b = random_total(rng, P2, m), random_total(rng, P2, n)
    assert total_differential(total_differential(a)).is_zero()
    lhs = total_differential(total_cup(a, b))
    rhs = total_cup(total_differential(a), b) + total_cup(a, total_differential(b)).scale((-1) ** m)
    assert lhs == rhs


def test_graded_commutativity_in_de_rham_cohomology():
    X = projective_space(2, GF(5))
    h = TotalCochain.from_cech(hyperplane_cocycle(X))
    basis = de_rham_cohomology(X, 2).basis[2]
    assert class_coordinates(h, basis) is not None
    hh = total_cup(h, h)
    assert class_equal(hh, total_cup(h, h))
    assert not is_coboundary(hh)
    quadric_doc, _ = p1xp1_doc()
    Q = scheme_from_dict(quadric_doc, QQ)
    g1, g2 = (TotalCochain.from_cech(c) for c in cohomology_group(Q, forms(1), 1).basis[1])
    assert class_equal(total_cup(g1, g2), total_cup(g2, g1))
    assert is_cocycle(total_cup(g1, g2))


def test_cochain_shape_checks():
    X = projective_space(1, QQ)
    with pytest.raises(CochainError):
        CechCochain(X, 1, Sheaf(0), {(1, 0): 1})
    with pytest.raises(CochainError):
        CechCochain(X, 0, Sheaf(0), {(0,): X.parse("z^-1", 0)})
    E = trivial_bundle(X, 2)
    with pytest.raises(CochainError):
        CechCochain(X, 0, twisted(E), {(0,): [[1]]})
