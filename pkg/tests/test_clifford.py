from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from artifact.clifford import (L_operator, antisym_product, build_gammas, chirality, clifford_violations,
                               constraint_holds, gammas_to_json, generator_set, solve_constraint_beta,
                               verify_generator_relations)
from artifact.exact_core import QMat


@pytest.mark.parametrize("d", range(2, 9))
def test_clifford_relations(d):
    rep = build_gammas(d)
    assert rep.n == 2 ** (d // 2)
    assert clifford_violations(rep) == []
    # second route: numpy anticommutators
    gs = [g.to_complex_array() for g in rep.gammas]
    eye = np.eye(rep.n)
    for a in range(d):
        for b in range(d):
            assert np.allclose(gs[a] @ gs[b] + gs[b] @ gs[a], 2 * eye * (a == b))


@pytest.mark.parametrize("d", [2, 4, 6, 8])
def test_chirality_squares_to_one_and_anticommutes(d):
    rep = build_gammas(d)
    g5 = chirality(rep)
    assert g5 @ g5 == QMat.identity(rep.n)
    for g in rep.gammas:
        assert (g5 @ g + g @ g5).is_zero()


def test_broken_gammas_are_reported():
    rep = build_gammas(4)
    bad = type(rep)(rep.d, (rep.gammas[0], rep.gammas[0]) + rep.gammas[2:])
    assert clifford_violations(bad)


@settings(max_examples=25, deadline=None)
@given(st.permutations(range(4)))
def test_antisym_product_sign(perm):
    rep = build_gammas(5)
    base = antisym_product(rep, (0, 1, 2, 3))
    inv = sum(1 for i in range(4) for j in range(i + 1, 4) if perm[i] > perm[j])
    assert antisym_product(rep, tuple(perm)) == base.scale((-1) ** inv)
    assert antisym_product(rep, tuple(perm), brute_force=True) == antisym_product(rep, tuple(perm))


def test_repeated_index_vanishes():
    rep = build_gammas(4)
    with pytest.warns(UserWarning):
        assert antisym_product(rep, (1, 2, 1)).is_zero()


@pytest.mark.parametrize("d", [3, 4, 5, 6])
def test_generator_relations_and_beta(d):
    gs = generator_set(build_gammas(d))
    assert verify_generator_relations(gs, "lie").passed
    assert verify_generator_relations(gs, "symmetry").passed
    beta, _ = solve_constraint_beta(gs)
    assert beta == Fraction(d, 2) - 1
    assert constraint_holds(gs, beta)
    assert not constraint_holds(gs, beta + 1)


def test_L_operator_shape():
    rep = build_gammas(4)
    L = L_operator(rep)
    assert L.rows == 4 * rep.n and L.degree() == 1
    assert L.coeff(1) == QMat.identity(4 * rep.n)


def test_gamma_json_roundtrip_is_deterministic():
    a = gammas_to_json(build_gammas(5))
    b = gammas_to_json(build_gammas(5))
    assert a == b and a["d"] == 5
