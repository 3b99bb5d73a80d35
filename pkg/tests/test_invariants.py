from fractions import Fraction
from math import comb

import numpy as np
import pytest

from artifact import invariants as inv
from artifact.clifford import build_gammas
from artifact.exact_core import QMat, rank


@pytest.mark.parametrize("d", range(2, 9))
def test_z_spectrum_against_numpy(d):
    rep = build_gammas(d)
    sp = inv.spinor_pair_space(rep)
    ev = np.linalg.eigvals(sp.z.to_complex_array())
    assert np.allclose(ev.imag, 0)
    counts = {}
    for x in np.round(ev.real * 2) / 2:
        counts[Fraction(x).limit_denominator(2)] = counts.get(Fraction(x).limit_denominator(2), 0) + 1
    assert counts == inv.multiplicities(rep)


@pytest.mark.parametrize("d", [2, 4, 6, 8])
def test_even_multiplicities_are_binomial(d):
    m = d // 2
    mult = inv.multiplicities(build_gammas(d))
    assert mult == {Fraction(k - m): comb(d, k) for k in range(d + 1)}


@pytest.mark.parametrize("d", [3, 5, 7])
def test_odd_multiplicities_sum(d):
    mult = inv.multiplicities(build_gammas(d))
    assert sum(mult.values()) == 2 ** (2 * (d // 2))
    assert sorted(mult.values()) == sorted(comb(d, j) for j in range(d // 2 + 1))


@pytest.mark.parametrize("d", range(2, 9))
def test_characteristic_poly_annihilates_z(d):
    rep = build_gammas(d)
    z = inv.spinor_pair_space(rep).z
    assert inv.poly_at_matrix(inv.characteristic_poly(d), z).is_zero()
    assert inv.poly_at_matrix(inv.full_tower_poly(d), z).is_zero()
    # dropping a root leaves a nonzero operator
    for r in inv.z_roots(d):
        p = inv.zpoly([1])
        for s in inv.z_roots(d):
            if s != r:
                p = p * inv.zlinear(s)
        assert not inv.poly_at_matrix(p, z).is_zero()


@pytest.mark.parametrize("d", [3, 4, 5, 6])
def test_projectors_resolve_identity(d):
    sp = inv.spinor_pair_space(build_gammas(d))
    total = QMat.zeros(sp.dim)
    for r, P in sp.projectors.items():
        assert P @ P == P
        assert sp.z @ P == P.scale(r)
        total = total + P
    assert total == QMat.identity(sp.dim)


@pytest.mark.parametrize("d", [3, 4, 5, 6])
def test_tower_recurrence_matches_contraction(d):
    assert inv.invariant_tower(build_gammas(d)).agrees


@pytest.mark.parametrize("d", [2, 3, 4, 5, 6])
def test_permutation_operator_routes_agree(d):
    rep = build_gammas(d)
    P = inv.permutation_operator(rep, "spectral")
    assert P == inv.permutation_operator(rep, "gamma_sum")
    n = rep.n
    flip = np.zeros((n * n, n * n))
    for a in range(n):
        for b in range(n):
            flip[b * n + a, a * n + b] = 1
    assert np.allclose(P.to_complex_array(), flip)
    if d % 2 == 0:
        assert P == inv.permutation_operator(rep, "regrouped")


@pytest.mark.parametrize("d", [2, 4, 6])
def test_symmetric_ranks(d):
    rep = build_gammas(d)
    m = d // 2
    for s in (1, -1):
        assert inv.symmetric_rank(rep, s) == inv.dsig_formula(m, s) == (2 ** m + s) * 2 ** (m - 1)


def test_unknown_permutation_method():
    with pytest.raises(ValueError):
        inv.permutation_operator(build_gammas(3), "bogus")
