from fractions import Fraction

import pytest

from artifact.clifford import L_operator, build_gammas
from artifact.exact_core import QMat, SparsePolyMatrix
from artifact.rmatrix import fundamental_R, spinor_part
from artifact.verifier import (beta_agreement, check_constant_rrr, check_inversion, check_llr_fusion,
                               check_monodromy_fusion, check_rll, check_rrr, make_grid, solve_inversion_beta)


def test_grid_exceeds_degree():
    g = make_grid({"u": 3, "v": 2})
    assert len({p[0] for p in g}) == 4 and len({p[1] for p in g}) == 3
    assert len(make_grid({"u": 2}, grid_scale=2)) == 6


@pytest.mark.parametrize("eps,n", [(1, 3), (1, 4), (-1, 2), (-1, 4)])
def test_rrr_fundamental(eps, n):
    assert check_rrr(fundamental_R(eps, n)).passed


@pytest.mark.parametrize("d,c", [(3, "full"), (4, "minus"), (4, "plus"), (5, "full")])
def test_rrr_spinor(d, c):
    assert check_rrr(spinor_part(build_gammas(d), c, False)).passed


def test_rrr_negative_control():
    R = fundamental_R(1, 3)
    bad = R.matrix + SparsePolyMatrix.constant(QMat.basis_unit(9, 0, 4))
    r = check_rrr(bad, dims=(3, 3, 3))
    assert not r.passed and r.first_violation is not None


def test_rrr_shape_mismatch():
    with pytest.raises(ValueError):
        check_rrr(fundamental_R(1, 3).matrix, dims=(2, 2, 2))


def test_constant_rrr_so4():
    rep = build_gammas(4)
    one = QMat.identity(16)
    assert check_constant_rrr(one + rep.chirality.kron(rep.chirality), 4).passed


@pytest.mark.parametrize("d", [3, 4])
def test_rll_layouts(d):
    rep = build_gammas(d)
    L = L_operator(rep)
    assert check_rll(fundamental_R(1, d), L, "vector_aux", d, rep.n).passed
    for c in (["full"] if d % 2 else ["minus", "plus"]):
        assert check_rll(spinor_part(rep, c, True), L, "spinor_aux_check", d, rep.n).passed


def test_rll_fails_with_wrong_R():
    rep = build_gammas(3)
    L = L_operator(rep)
    # sp(2) has the right size but the wrong symmetry
    wrong = fundamental_R(-1, 2)
    assert not check_rll(wrong, L, "spinor_aux_check", 3, rep.n).passed


@pytest.mark.parametrize("d", [3, 4, 5, 6])
def test_inversion_beta(d):
    rep = build_gammas(d)
    L = L_operator(rep)
    beta = solve_inversion_beta(L, d, rep.n)
    assert beta == Fraction(d, 2) - 1
    assert check_inversion(L, beta, d, rep.n).passed
    assert not check_inversion(L, beta + 1, d, rep.n).passed


@pytest.mark.parametrize("d", [3, 4, 5, 6])
def test_beta_routes_agree(d):
    b_inv, (b_con, _) = beta_agreement(build_gammas(d))
    assert b_inv == b_con


def test_llr_fusion_so4():
    assert check_llr_fusion(build_gammas(4), 1).passed
    assert not check_llr_fusion(build_gammas(4), 0).passed


@pytest.mark.parametrize("N", [1, 2])
def test_monodromy_fusion_so3(N):
    assert check_monodromy_fusion(build_gammas(3), N, Fraction(1, 2)).passed


def test_report_json_has_no_floats():
    r = check_inversion(L_operator(build_gammas(3)), Fraction(1, 2), 3, 2)
    js = r.to_json()
    assert js["status"] == "pass" and js["parameters"]["beta"] == "1/2"
