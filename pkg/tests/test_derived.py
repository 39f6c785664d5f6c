from math import comb

import pytest

from dchern.derived import (DECALAGE_KINDS, DerivedPowerRequest, GuardError, TruncationError, derived_homology,
                            derived_power, verify_decalage)
from dchern.homcore import ChainComplex, homology
from dchern.rings import GF, ZZ


@pytest.mark.parametrize("functor,expected", [("Sym", comb(4, 2)), ("Wedge", comb(3, 2)), ("Gamma", comb(4, 2))])
def test_degree_zero_is_the_plain_functor(functor, expected):
    req = DerivedPowerRequest(functor, 2, ChainComplex.concentrated(ZZ, 3, 0), T=2)
    H = derived_homology(req)
    assert H.groups[0] == (expected, ())
    assert all(H.is_zero(n) for n in (1, 2))


@pytest.mark.parametrize("functor", ["Sym", "Wedge", "Gamma"])
@pytest.mark.parametrize("ring", [ZZ, GF(2)])
def test_kernel_and_quotient_normalizations_agree(functor, ring):
    req = DerivedPowerRequest(functor, 2, ChainComplex.concentrated(ring, 2, 1), T=4)
    a = derived_power(req, method="quotient")
    b = derived_power(req, method="kernel")
    assert homology(a) == homology(b)
    assert [a.rank(n) for n in a.degrees()] == [b.rank(n) for n in b.degrees()]


def test_truncation_guard():
    with pytest.raises(TruncationError):
        DerivedPowerRequest("Sym", 2, ChainComplex.concentrated(ZZ, 1, 1), T=2, top_degree=2)
    with pytest.raises(ValueError):
        DerivedPowerRequest("Tor", 2, ChainComplex.concentrated(ZZ, 1, 1), T=3)


def test_size_guards():
    with pytest.raises(GuardError):
        verify_decalage("sym_shift1", 5, 2, ZZ)
    with pytest.raises(GuardError):
        derived_power(DerivedPowerRequest("Sym", 3, ChainComplex.concentrated(ZZ, 3, 2), T=7), cap=100)


@pytest.mark.parametrize("kind", DECALAGE_KINDS)
@pytest.mark.parametrize("ring", [ZZ, GF(2), GF(3)], ids=str)
def test_decalage_rank_two(kind, ring):
    for p in (1, 2):
        rep = verify_decalage(kind, 2, p, ring)
        assert rep.ok, rep.summary()


def test_sym_of_shift_one_in_char_two_has_no_torsion_left():
    # LSym^2(Z[1]) = Wedge^2(Z)[2] = 0: the naive Sym^2 would leave Z/2 behind
    H = derived_homology(DerivedPowerRequest("Sym", 2, ChainComplex.concentrated(ZZ, 1, 1), T=4))
    assert all(H.is_zero(n) for n in range(4))


def test_wedge_two_of_shift_one_over_z():
    # LWedge^2(Z^2[1]) = Gamma^2(Z^2)[2], rank 3 in degree 2
    H = derived_homology(DerivedPowerRequest("Wedge", 2, ChainComplex.concentrated(ZZ, 2, 1), T=4))
    assert H.groups[2] == (3, ())
    assert H.nonzero_degrees() == [2]
