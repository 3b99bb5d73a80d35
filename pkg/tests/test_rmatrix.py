from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from artifact import invariants as inv
from artifact.clifford import build_gammas
from artifact.exact_core import QMat, swap_matrix
from artifact.rmatrix import (check_of, chiral_fusion, chiral_products_vanish, fundamental_R, k_matrix,
                              k_squared_factor, projector_absorbs, proportional_at, spinor_part, sw_expansion,
                              verify_defining_relations)


@pytest.mark.parametrize("eps,n", [(1, 3), (1, 4), (1, 5), (-1, 2), (-1, 4)])
def test_fundamental_R_structure(eps, n):
    R = fundamental_R(eps, n)
    K = k_matrix(eps, n)
    P = swap_matrix(n)
    assert K @ K == K.scale(k_squared_factor(eps, n))
    assert P @ K == K.scale(eps)
    # regular point: R(0) = (n/2 - eps) P
    assert R.at(0) == P.scale(Fraction(n, 2) - eps)


@settings(max_examples=20, deadline=None)
@given(st.fractions(min_value=-4, max_value=4, max_denominator=5))
def test_fundamental_R_commutes_with_flip(u):
    R = fundamental_R(1, 4)
    P = swap_matrix(4)
    assert P @ R.at(u) == R.at(u) @ P


def test_fundamental_R_rejects_bad_input():
    with pytest.raises(ValueError):
        fundamental_R(-1, 3)
    with pytest.raises(ValueError):
        fundamental_R(2, 4)


@pytest.mark.parametrize("d", [3, 4, 5, 6])
def test_spinor_R_commutes_with_z_and_is_checked_by_flip(d):
    rep = build_gammas(d)
    sp = inv.spinor_pair_space(rep)
    u = Fraction(1, 3)
    for c in (["full"] if d % 2 else ["minus", "plus"]):
        R = spinor_part(rep, c, False)
        Rc = spinor_part(rep, c, True)
        assert sp.z @ Rc.at(u) == Rc.at(u) @ sp.z
        assert sp.permutation @ R.at(u) == Rc.at(u)
        assert check_of(R).matrix == Rc.matrix


@pytest.mark.parametrize("d", [3, 5])
def test_odd_spinor_R_is_regular(d):
    rep = build_gammas(d)
    R = spinor_part(rep, "full", False)
    assert proportional_at(R.at(0), inv.spinor_pair_space(rep).permutation) is not None


@pytest.mark.parametrize("d", [3, 4, 5, 6])
def test_defining_relations(d):
    rep = build_gammas(d)
    assert verify_defining_relations(rep, spinor_part(rep, "full" if d % 2 else "minus", True)).ok


def test_chirality_structure_so4():
    rep = build_gammas(4)
    assert chiral_products_vanish(rep)
    assert projector_absorbs(rep, spinor_part(rep, "minus", True))
    # the plus part of so(4) is constant
    assert spinor_part(rep, "plus", False).degree == 0


def test_chiral_fusion_so4():
    f = chiral_fusion(build_gammas(4))
    assert f.holds and f.same_chirality_vanish
    assert (f.alpha, f.beta) == (1, Fraction(1, 2))


@pytest.mark.parametrize("d", [4, 6])
def test_gamma_ratio_expansion(d):
    rep = build_gammas(d)
    for parity, chir in (("even", "minus"), ("odd", "plus")):
        S = sw_expansion(rep, parity)
        R = spinor_part(rep, chir, True).matrix
        ratios = {proportional_at(S.at(u), R.at(u)) for u in (Fraction(1), Fraction(2), Fraction(1, 3))}
        assert len(ratios) == 1 and None not in ratios


def test_printed_odd_coefficients_do_not_reproduce_R():
    rep = build_gammas(4)
    S = sw_expansion(rep, "odd", "printed")
    R = spinor_part(rep, "plus", True).matrix
    assert proportional_at(S.at(Fraction(1)), R.at(Fraction(1))) is None


def test_spinor_R_json_is_stable():
    rep = build_gammas(3)
    assert spinor_part(rep, "full", False).to_json() == spinor_part(rep, "full", False).to_json()


def test_spinor_R_range_guard():
    with pytest.raises(ValueError):
        spinor_part(build_gammas(2))
    with pytest.raises(ValueError):
        spinor_part(build_gammas(5), "plus")
