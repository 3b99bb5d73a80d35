"""Monodromy and transfer matrices of periodic chains."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .clifford import L_operator, build_gammas
from .exact_core import QMat, SparsePolyMatrix, embed, partial_trace
from .rmatrix import fundamental_R, spinor_part
from .verifier import IdentityReport, run_identity, solve_then_assert_fusion_trace

MAX_DIM = 4096  # resource guard on the full monodromy dimension


@dataclass
class Monodromy:
    aux: str  # "vector" or "spinor"
    d: int
    N: int
    matrix: SparsePolyMatrix
    aux_dim: int
    site_dim: int
    kind: str = ""
    shift: Fraction = Fraction(0)

    @property
    def quantum_dim(self):
        return self.site_dim ** self.N

    def block(self, a, b) -> SparsePolyMatrix:
        """Operator-valued auxiliary entry T^a_b on the quantum space."""
        q = self.quantum_dim
        return self.matrix.submatrix(range(a * q, (a + 1) * q), range(b * q, (b + 1) * q))


@dataclass
class TransferMatrix:
    t: SparsePolyMatrix
    source: Monodromy


def _guard(aux_dim, site_dim, N):
    if N < 1:
        raise ValueError("N >= 1")
    if aux_dim * site_dim ** N > MAX_DIM:
        raise ValueError(f"monodromy dimension {aux_dim * site_dim ** N} exceeds the guard {MAX_DIM}")


def _chain(factor: SparsePolyMatrix, aux_dim, site_dim, N, reverse=False):
    """Ordered product F_01 F_02 ... F_0N (or reversed) of a factor on aux (x) site."""
    dims = (aux_dim,) + (site_dim,) * N
    sites = range(N, 0, -1) if reverse else range(1, N + 1)
    out = None
    for k in sites:
        f = embed(factor, dims, (0, k))
        out = f if out is None else out @ f
    return out


def _spinor_first(L: SparsePolyMatrix, d, n):
    """L on V (x) S reordered to S (x) V."""
    return embed(L, (n, d), (1, 0))


def vector_monodromy(d: int, N: int) -> Monodromy:
    """TT(u) = R_01(u) R_02(u) ... R_0N(u) with the fundamental so(d) R."""
    if d > 6 or N > 3:
        raise ValueError("vector monodromy is guarded to d <= 6, N <= 3")
    _guard(d, d, N)
    R = fundamental_R(1, d).matrix
    return Monodromy("vector", d, N, _chain(R, d, d, N), d, d, "R_chain")


@lru_cache(maxsize=None)
def _spinor_L(d):
    rep = build_gammas(d)
    return _spinor_first(L_operator(rep), d, rep.n), rep.n


def spinor_monodromy(d: int, N: int, kind: str = "L_chain", chirality: str = "minus") -> Monodromy:
    """Spinor auxiliary space.  L_chain: L_01(u)...L_0N(u) on S (x) V^N.
    R_chain: product of unchecked spinorial R factors of one chirality on S (x) S^N."""
    rep = build_gammas(d)
    n = rep.n
    if kind == "L_chain":
        _guard(n, d, N)
        L, _ = _spinor_L(d)
        return Monodromy("spinor", d, N, _chain(L, n, d, N), n, d, kind)
    if kind == "R_chain":
        _guard(n, n, N)
        R = spinor_part(rep, chirality, False).matrix
        return Monodromy("spinor", d, N, _chain(R, n, n, N), n, n, f"R_chain:{chirality}")
    raise ValueError("kind must be 'L_chain' or 'R_chain'")


def spinor_reversed_monodromy(d: int, N: int) -> Monodromy:
    """L_0N(u) ... L_01(u); evaluated at -u-1/2 it inverts T(u+beta+1/2) up to a scalar."""
    rep = build_gammas(d)
    _guard(rep.n, d, N)
    L, n = _spinor_L(d)
    return Monodromy("spinor", d, N, _chain(L, n, d, N, reverse=True), n, d, "L_chain_reversed")


def transfer(m: Monodromy) -> TransferMatrix:
    q = m.quantum_dim
    coeffs = {e: partial_trace(c, (m.aux_dim, q), 1) for e, c in m.matrix.coeffs.items()}
    return TransferMatrix(SparsePolyMatrix((q, q), coeffs, m.matrix.vars), m)


def transfer_by_blocks(m: Monodromy) -> SparsePolyMatrix:
    """Sum of the diagonal auxiliary blocks (independent route to the trace)."""
    q = m.quantum_dim
    acc = SparsePolyMatrix((q, q), {})
    for a in range(m.aux_dim):
        acc = acc + m.block(a, a)
    return acc


def check_commuting_family(t: TransferMatrix, grid=None, grid_scale=1) -> IdentityReport:
    """[t(u), t(v)] = 0."""
    D = t.t.degree()
    cache = {}

    def ev(x):
        if x not in cache:
            cache[x] = t.t.at(x)
        return cache[x]

    src = t.source
    params = {"aux": src.aux, "d": src.d, "N": src.N, "kind": src.kind}
    return run_identity("commuting-transfer", params, lambda u, v: ev(u) @ ev(v),
                        lambda u, v: ev(v) @ ev(u), {"u": D, "v": D}, grid_scale, grid)


def aux_pattern(m: Monodromy) -> set:
    """Auxiliary index pairs (a, b) whose block is not identically zero."""
    q = m.quantum_dim
    pat = set()
    for i, j in m.matrix.support():
        pat.add((i // q, j // q))
    return pat


def block_pattern(sets, n) -> set:
    """Pairs (a, b) lying in a common index set."""
    pat = set()
    for s in sets:
        for a in s:
            for b in s:
                pat.add((a, b))
    return pat


# zero-based index sets; labels 1..n in the printed block forms
SO4_SETS = ((0, 3), (1, 2))
SO6_SETS = ((0, 3, 5, 6), (1, 2, 4, 7))


def expected_pattern(d: int) -> set:
    if d == 4:
        return block_pattern(SO4_SETS, 4)
    if d == 6:
        return block_pattern(SO6_SETS, 8)
    raise ValueError("block patterns are given for d = 4 and d = 6")


def conjugate_aux(m: Monodromy, V: QMat) -> SparsePolyMatrix:
    """(V (x) 1) T (V^-1 (x) 1) for an involutive permutation V."""
    big = V.kron(QMat.identity(m.quantum_dim))
    S = SparsePolyMatrix.constant(big)
    return S @ m.matrix @ S


def block_trace_split(m: Monodromy, V: QMat, sets) -> dict:
    """Conjugate the auxiliary space by V; report off-block vanishing and whether the
    transfer equals the sum of the block traces."""
    C = conjugate_aux(m, V)
    q = m.quantum_dim
    where = {a: k for k, s in enumerate(sets) for a in s}
    off = [(i // q, j // q) for i, j in C.support() if where[i // q] != where[j // q]]
    parts = []
    for s in sets:
        acc = SparsePolyMatrix((q, q), {})
        for a in s:
            acc = acc + C.submatrix(range(a * q, (a + 1) * q), range(a * q, (a + 1) * q))
        parts.append(acc)
    total = parts[0]
    for p in parts[1:]:
        total = total + p
    return {"block_diagonal": not off, "transfer_is_sum": total == transfer(m).t,
            "block_transfers": parts}


def fusion_trace_identity(d: int, N: int, shift=Fraction(3, 2), form: str = "blocks"):
    """Trace fusion for so(4): solve the scalar at N=1, assert it at N<=2.

    Returns the N=1 report (with the solved scalar) and, for N=2, the report
    asserting the squared scalar."""
    if d != 4:
        raise ValueError("the trace identity is stated for d = 4")
    if N > 2:
        raise ValueError("N <= 2 (resource guard)")
    r1, r2 = solve_then_assert_fusion_trace(shift, form)
    if N == 1 or r2 is None:
        return r1
    return r2


def check_inverse_chain(d: int, N: int, beta) -> IdentityReport:
    from .verifier import check_inverse_monodromy
    return check_inverse_monodromy(build_gammas(d), N, beta)
