from fractions import Fraction

import pytest

from artifact import chain as ch
from artifact.equivalence import V_so4
from artifact.exact_core import QMat


@pytest.mark.parametrize("d,N", [(3, 1), (3, 2), (4, 2)])
def test_transfer_routes_agree(d, N):
    for m in (ch.vector_monodromy(d, N), ch.spinor_monodromy(d, N)):
        assert ch.transfer(m).t == ch.transfer_by_blocks(m)


@pytest.mark.parametrize("d,N", [(3, 2), (4, 2)])
def test_commuting_transfer(d, N):
    ms = [ch.vector_monodromy(d, N), ch.spinor_monodromy(d, N, "L_chain"),
          ch.spinor_monodromy(d, N, "R_chain", "full" if d % 2 else "minus")]
    for m in ms:
        assert ch.check_commuting_family(ch.transfer(m)).passed


def test_single_site_transfer_is_trace_of_R():
    m = ch.vector_monodromy(3, 1)
    u = Fraction(2, 3)
    # N = 1: t(u) = tr_0 R_01(u)
    R = m.matrix.at(u)
    t = ch.transfer(m).t.at(u)
    assert t.trace() == R.trace()


@pytest.mark.parametrize("N", [1, 2, 3])
def test_so4_zero_pattern(N):
    m = ch.spinor_monodromy(4, N, "R_chain", "minus")
    assert ch.aux_pattern(m) == ch.expected_pattern(4)


def test_so4_block_trace_split():
    m = ch.spinor_monodromy(4, 2, "R_chain", "minus")
    out = ch.block_trace_split(m, QMat.identity(4), ch.SO4_SETS)
    assert out["block_diagonal"] and out["transfer_is_sum"]
    assert len(out["block_transfers"]) == 2


def test_guards():
    with pytest.raises(ValueError):
        ch.vector_monodromy(8, 3)
    with pytest.raises(ValueError):
        ch.spinor_monodromy(4, 0)
    with pytest.raises(ValueError):
        ch.spinor_monodromy(4, 1, "bogus")
    with pytest.raises(ValueError):
        ch.fusion_trace_identity(4, 3)
    with pytest.raises(ValueError):
        ch.expected_pattern(5)


@pytest.mark.parametrize("N", [1, 2])
def test_trace_fusion(N):
    r = ch.fusion_trace_identity(4, N)
    assert r.passed


def test_trace_fusion_wrong_shift():
    assert not ch.fusion_trace_identity(4, 2, shift=Fraction(1)).passed


@pytest.mark.parametrize("N", [1, 2])
def test_inverse_chain(N):
    assert ch.check_inverse_chain(3, N, Fraction(1, 2)).passed
