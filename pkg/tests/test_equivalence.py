import copy
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from artifact import equivalence as eq
from artifact.clifford import build_gammas
from artifact.exact_core import GaussianRational as GR, QMat, SparsePolyMatrix
from artifact.rmatrix import fundamental_R, spinor_part

entry = st.tuples(st.integers(-3, 3), st.integers(-3, 3)).map(lambda t: GR(*t))
mat2 = st.lists(entry, min_size=4, max_size=4).map(lambda v: QMat.from_dense([v[:2], v[2:]]))


@settings(max_examples=40, deadline=None)
@given(mat2)
def test_kron_factorize_recovers_square(g):
    if g.is_zero():
        return
    G = g.kron(g)
    f = eq.kron_factorize(G, 2)
    assert f is not None and f.kron(f) == G


@settings(max_examples=40, deadline=None)
@given(mat2, mat2)
def test_kron_factorize_rejects_distinct_factors(g, h):
    if g.is_zero() or h.is_zero():
        return
    f = eq.kron_factorize(g.kron(h), 2)
    if f is None:
        return
    # accepted only when g (x) h really is a square
    assert f.kron(f) == g.kron(h)


def test_kron_factorize_negative_controls():
    g = QMat.from_dense([[1, 0], [0, 2]])
    h = QMat.from_dense([[0, 1], [1, 0]])
    assert eq.kron_factorize(g.kron(h), 2) is None
    assert eq.kron_factorize(g.kron(g) + h.kron(h), 2) is None


@given(entry)
def test_gaussian_sqrt(c):
    sq = c * c
    s = eq.gaussian_sqrt(sq)
    assert s is not None and s * s == sq


def test_gaussian_sqrt_irrational():
    assert eq.gaussian_sqrt(GR(2)) is None


def test_sl2_self_intertwiner():
    R = eq.sl_R(2)
    space = eq.intertwiner_space(R, R)
    assert eq.in_span(QMat.identity(4), space)
    assert eq.Intertwiner(QMat.identity(2)).holds(R, R, [Fraction(1), Fraction(5, 2)])


def test_intertwiner_dimension_mismatch():
    with pytest.raises(ValueError):
        eq.intertwiner_space(eq.sl_R(2), eq.sl_R(3))


def test_so3_spinor_is_sl2_at_double_argument():
    R = spinor_part(build_gammas(3), "full", False).matrix
    space = eq.intertwiner_space(R, eq.sl_R(2), (2, 0))
    assert eq.in_span(QMat.identity(4), space)
    # the wrong reparametrization admits no intertwiner containing the identity
    assert not eq.in_span(QMat.identity(4), eq.intertwiner_space(R, eq.sl_R(2), (1, 0)))


@pytest.mark.parametrize("name,found", [("so3", True), ("so4_minus", True), ("so4_plus", True),
                                        ("so5", True), ("so6_minus", False), ("so6_plus", False)])
def test_table_matching(name, found):
    t = eq.load_table(name)
    R = spinor_part(build_gammas(t["d"]), t["chirality"], False)
    m = eq.table_basis_match(R, t)
    assert m.found is found
    if found:
        assert eq.conjugate(R.matrix, m.s_matrix()).scale(m.scalar) == eq.table_matrix(t)


def test_so6_tables_fail_on_trace():
    m = eq.table_basis_match(spinor_part(build_gammas(6), "plus", False), eq.load_table("so6_plus"))
    assert not m.found and m.reason.startswith("trace mismatch")


def test_corrupted_table_is_rejected():
    t = copy.deepcopy(eq.load_table("so4_minus"))
    t["entries"][0]["value"] = [2, 1]
    m = eq.table_basis_match(spinor_part(build_gammas(4), "minus", False), t)
    assert not m.found


@settings(max_examples=15, deadline=None)
@given(st.permutations(range(4)), st.lists(st.integers(0, 3), min_size=4, max_size=4))
def test_match_recovers_signed_permutation(perm, phases):
    R = spinor_part(build_gammas(4), "minus", False).matrix
    S = QMat.from_entries((4, 4), {(perm[a], a): eq.UNITS[phases[a]] for a in range(4)})
    T = eq.conjugate(R, S).scale(3)
    m = eq.table_basis_match(R, T)
    assert m.found and m.scalar == 3
    assert eq.conjugate(R, m.s_matrix()).scale(3) == T


def test_so4_minus_blocks():
    R = spinor_part(build_gammas(4), "minus", False)
    bd = eq.block_decompose(R, eq.V_so4())
    assert bd.level == "site" and bd.sizes() == [4, 4]
    for idx, M in bd.blocks:
        assert eq.identify_sl_block(idx, M).ok


def test_rtt_pattern_so4_minus_matches_blocks():
    R = spinor_part(build_gammas(4), "minus", False)
    pat = eq.rtt_pattern(R)
    assert pat.allowed == eq.pattern_from_sets(((0, 3), (1, 2)), 4)


def test_so4_proposition_details():
    d = eq.proposition_so4().details
    assert d["minus_pattern_is_block"]
    # the plus part allows the off-diagonal (to a b c d -> d c b a) entries
    assert not d["plus_pattern_is_diagonal"]
    assert d["constant_offdiagonal_T_solves_rtt"]
    assert d["L_chain_obeys_rll_with_plus"]
    assert d["plus_R_chain_is_diagonal"]


def test_so6_blocks():
    assert eq.proposition_so6().passed


def test_so5_sp4():
    rep = eq.proposition_so5()
    assert rep.passed


def test_sp2_so3():
    assert eq.sp2_so3_coincidence().passed


def test_sp4_so5_needs_the_reparametrization():
    A = spinor_part(build_gammas(5), "full", False).matrix
    B = fundamental_R(-1, 4).matrix
    assert not eq.in_span(QMat.identity(16), eq.intertwiner_space(A, B, (1, 0)))
