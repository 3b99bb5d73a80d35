from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from artifact.exact_core import (GaussianRational as GR, QMat, SparsePolyMatrix, SpectralPoly, embed,
                                 inverse, kron, nullspace, partial_trace, poly_divmod, poly_gcd, rank,
                                 swap_matrix)

small = st.integers(-6, 6)
fracs = st.fractions(min_value=-5, max_value=5, max_denominator=7)
gr = st.builds(GR, fracs, fracs)


def int_mat(r, c):
    return st.lists(st.lists(st.tuples(small, small), min_size=c, max_size=c), min_size=r, max_size=r)


def to_q(rows):
    return QMat.from_dense([[GR(a, b) for a, b in row] for row in rows])


def to_np(rows):
    return np.array([[a + 1j * b for a, b in row] for row in rows], dtype=complex)


@given(gr, gr, gr)
def test_field_axioms(a, b, c):
    assert (a + b) * c == a * c + b * c
    assert (a * b) * c == a * (b * c)
    assert (a * b).conjugate() == a.conjugate() * b.conjugate()
    if not a.is_zero():
        assert a * a.inverse() == GR(1)


def test_floats_rejected():
    with pytest.raises(TypeError):
        GR.coerce(0.5)


@settings(max_examples=40, deadline=None)
@given(int_mat(3, 4), int_mat(4, 2))
def test_matmul_matches_numpy(a, b):
    assert np.allclose((to_q(a) @ to_q(b)).to_complex_array(), to_np(a) @ to_np(b))


@settings(max_examples=40, deadline=None)
@given(int_mat(2, 2), int_mat(3, 2))
def test_kron_matches_numpy(a, b):
    assert np.allclose(kron(to_q(a), to_q(b)).to_complex_array(), np.kron(to_np(a), to_np(b)))


@settings(max_examples=40, deadline=None)
@given(int_mat(4, 4))
def test_rank_and_nullspace(a):
    A = to_q(a)
    assert rank(A) == np.linalg.matrix_rank(to_np(a))
    for vec in nullspace(A):
        col = QMat.from_dense([[x] for x in vec])
        assert (A @ col).is_zero()


@settings(max_examples=30, deadline=None)
@given(int_mat(4, 4), st.lists(st.integers(1, 5), min_size=4, max_size=4))
def test_inverse_of_unit_triangular(a, diag):
    rows = [[(a[i][j] if j > i else ((diag[i], 0) if i == j else (0, 0))) for j in range(4)] for i in range(4)]
    T = to_q(rows)
    assert T @ inverse(T) == QMat.identity(4)


def test_singular_inverse_raises():
    with pytest.raises(ZeroDivisionError):
        inverse(QMat.from_dense([[1, 2], [2, 4]]))


@settings(max_examples=30, deadline=None)
@given(int_mat(6, 6))
def test_partial_trace_matches_numpy(a):
    M = to_q(a)
    T = to_np(a).reshape(2, 3, 2, 3)
    assert np.allclose(partial_trace(M, (2, 3), 1).to_complex_array(), np.einsum("iaib->ab", T))
    assert np.allclose(partial_trace(M, (2, 3), 2).to_complex_array(), np.einsum("aibi->ab", T))


def test_swap_and_embed():
    P = swap_matrix(3)
    assert P @ P == QMat.identity(9)
    # P (A (x) B) P = B (x) A
    A = QMat.from_dense([[1, 2, 0], [0, 1, 0], [3, 0, 1]])
    B = QMat.from_dense([[0, 1, 0], [1, 0, 0], [0, 0, GR(0, 1)]])
    assert P @ kron(A, B) @ P == kron(B, A)
    # an operator on legs (2, 0) of a three-leg space
    X = kron(A, B)
    lhs = embed(X, (3, 2, 3), (2, 0))
    rhs = kron(kron(B, QMat.identity(2)), A)
    assert lhs == rhs


@given(st.lists(fracs, min_size=1, max_size=5), st.lists(fracs, min_size=1, max_size=5), fracs)
def test_poly_eval_is_a_ring_map(p, q, x):
    P, Q = SpectralPoly.from_coeffs(p), SpectralPoly.from_coeffs(q)
    assert (P * Q).eval(x) == P.eval(x) * Q.eval(x)
    assert (P + Q).eval(x) == P.eval(x) + Q.eval(x)


@given(st.lists(fracs, min_size=1, max_size=6), st.lists(fracs, min_size=2, max_size=4))
def test_poly_divmod(p, q):
    P, Q = SpectralPoly.from_coeffs(p), SpectralPoly.from_coeffs(q)
    if Q.is_zero():
        return
    quo, rem = poly_divmod(P, Q)
    assert quo * Q + rem == P
    assert rem.is_zero() or rem.degree() < Q.degree()


def test_gcd_finds_common_factor():
    u = SpectralPoly.var()
    g = poly_gcd((u - 1) * (u + 2), (u - 1) * (u - 3))
    assert g.degree() == 1 and g.eval(1) == GR(0)


def test_poly_matrix_at_and_shift():
    a = QMat.from_dense([[1, 0], [0, 2]])
    b = QMat.from_dense([[0, 1], [1, 0]])
    M = SparsePolyMatrix.linear(a, b)  # u a + b
    assert M.at(Fraction(3)) == a.scale(3) + b
    assert M.degree() == 1
    assert SparsePolyMatrix.from_json(M.to_json()) == M
