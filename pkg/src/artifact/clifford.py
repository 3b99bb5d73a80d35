"""Gamma matrices, chirality, antisymmetrized products and the spinor L-operator."""
from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .exact_core import GR, ONE, ZERO, QMat, SparsePolyMatrix, kron_all

MAX_D = 12

SIGMA_X = QMat.from_dense([[0, 1], [1, 0]])
SIGMA_Y = QMat.from_dense([[0, GR(0, -1)], [GR(0, 1), 0]])
SIGMA_Z = QMat.from_dense([[1, 0], [0, -1]])
I2 = QMat.identity(2)


@dataclass(frozen=True)
class CliffordRep:
    d: int
    gammas: tuple
    chirality: QMat | None = None

    @property
    def n(self):
        """Spinor dimension."""
        return self.gammas[0].shape[0]

    @property
    def m(self):
        return self.d // 2


def _pauli_string(m, k, s):
    return kron_all(*([SIGMA_Z] * k + [s] + [I2] * (m - k - 1)))


@lru_cache(maxsize=None)
def build_gammas(d: int) -> CliffordRep:
    """Tensor-product (Jordan-Wigner) gammas.

    d = 2m: gamma^{2k-1}, gamma^{2k} = sz x..x sz x {sx, sy} x 1 x..x 1.
    d = 2m+1: the gammas of d-1 plus the chirality of d-1.
    """
    if not isinstance(d, int) or d < 2 or d > MAX_D:
        raise ValueError(f"d must be an integer in 2..{MAX_D}, got {d!r}")
    m = d // 2
    gs = []
    for k in range(m):
        gs.append(_pauli_string(m, k, SIGMA_X))
        gs.append(_pauli_string(m, k, SIGMA_Y))
    if d % 2:
        gs.append(_chirality_from(gs, m))
        return CliffordRep(d, tuple(gs), None)
    return CliffordRep(d, tuple(gs), _chirality_from(gs, m))


def _chirality_from(gs, m):
    prod = gs[0]
    for g in gs[1:]:
        prod = prod @ g
    # (-i)^m makes the square the identity; it also makes the result sz^{x m}
    return prod.scale(GR(0, -1) ** m)


def chirality(rep: CliffordRep) -> QMat:
    if rep.d % 2:
        raise ValueError("chirality is only defined for even d")
    return rep.chirality


def chirality_phase(rep: CliffordRep):
    """Phase c with chirality = c * gamma^1...gamma^d."""
    if rep.d % 2:
        raise ValueError("chirality is only defined for even d")
    return GR(0, -1) ** rep.m


def anticommutator(a, b):
    return a @ b + b @ a


def clifford_violations(rep: CliffordRep):
    """Pairs (a, b) where {g^a, g^b} != 2 delta^{ab} I."""
    bad = []
    eye2 = QMat.identity(rep.n).scale(2)
    zero = QMat.zeros(rep.n)
    for a in range(rep.d):
        for b in range(a, rep.d):
            want = eye2 if a == b else zero
            if anticommutator(rep.gammas[a], rep.gammas[b]) != want:
                bad.append((a, b))
    return bad


def _perm_sign(p):
    sign = 1
    p = list(p)
    for i in range(len(p)):
        while p[i] != i:
            j = p[i]
            p[i], p[j] = p[j], p[i]
            sign = -sign
    return sign


def antisym_product(rep: CliffordRep, indices, brute_force=False) -> QMat:
    """gamma^{a1...ak} with unit weight: (1/k!) sum_sigma sign(sigma) gamma^{a_sigma1}...

    For distinct indices this is the ordered product; repeated indices give zero
    (with a warning).  Indices are 0-based.
    """
    idx = list(indices)
    n = rep.n
    if len(set(idx)) != len(idx):
        warnings.warn("repeated index in antisymmetrized product; result is zero", stacklevel=2)
        return QMat.zeros(n)
    if any(not 0 <= a < rep.d for a in idx):
        raise ValueError("gamma index out of range")
    if not brute_force:
        out = QMat.identity(n)
        for a in idx:
            out = out @ rep.gammas[a]
        return out
    k = len(idx)
    acc = QMat.zeros(n)
    for p in itertools.permutations(range(k)):
        term = QMat.identity(n)
        for i in p:
            term = term @ rep.gammas[idx[i]]
        acc = acc + term.scale(_perm_sign(p))
    return acc.scale(Fraction(1, math.factorial(k)))


# ------------------------------------------------------------- generators

@dataclass(frozen=True)
class GeneratorSet:
    """G^a_b of the orthogonal spinor L-operator (metric delta)."""

    rep: CliffordRep
    G: tuple  # G[a][b] constant matrices
    epsilon: int = 1
    metric: tuple = field(default=None)

    @property
    def d(self):
        return self.rep.d


def generator_set(rep: CliffordRep) -> GeneratorSet:
    """G^{ab} = -gamma^{ab}/2 (zero on the diagonal)."""
    n = rep.n
    zero = QMat.zeros(n)
    G = []
    for a in range(rep.d):
        row = []
        for b in range(rep.d):
            row.append(zero if a == b else (rep.gammas[a] @ rep.gammas[b]).scale(Fraction(-1, 2)))
        G.append(tuple(row))
    metric = tuple(tuple(1 if a == b else 0 for b in range(rep.d)) for a in range(rep.d))
    return GeneratorSet(rep, tuple(G), 1, metric)


def L_operator(rep: CliffordRep, gs: GeneratorSet | None = None) -> SparsePolyMatrix:
    """L^{ab}(u) = u delta^{ab} + G^{ab} on V x S, vector index major."""
    gs = gs or generator_set(rep)
    d, n = rep.d, rep.n
    ent = {}
    for a in range(d):
        for b in range(d):
            for i, j, v in gs.G[a][b].items():
                ent[(a * n + i, b * n + j)] = v
    g0 = QMat.from_entries((d * n, d * n), ent)
    return SparsePolyMatrix.linear(QMat.identity(d * n), g0)


def L_block(L: SparsePolyMatrix, d, n, a, b):
    """The spinor-space block L^{ab}(u)."""
    return L.submatrix(range(a * n, (a + 1) * n), range(b * n, (b + 1) * n))


# ------------------------------------------------- generator relations

@dataclass
class GeneratorReport:
    which: str
    passed: bool
    checked: int
    failures: list
    beta: Fraction | str | None = None

    def to_json(self):
        b = self.beta
        if isinstance(b, Fraction):
            b = f"{b.numerator}/{b.denominator}"
        return {"which": self.which, "passed": self.passed, "checked": self.checked,
                "failures": [list(f) for f in self.failures[:20]], "beta": b}


def _metric_lower(gs):
    # for the orthogonal delta metric the lower metric equals the upper one
    return gs.metric


def _lie_check(gs):
    d = gs.d
    G, eps, e = gs.G, gs.metric, gs.epsilon
    low = _metric_lower(gs)
    zero = QMat.zeros(gs.rep.n)
    fails = []
    count = 0
    for a1, b1, a2, b2 in itertools.product(range(d), repeat=4):
        count += 1
        lhs = G[a1][b1] @ G[a2][b2] - G[a2][b2] @ G[a1][b1]
        rhs = zero
        if a1 == b2:
            rhs = rhs + G[a2][b1]
        if a2 == b1:
            rhs = rhs - G[a1][b2]
        if eps[a1][a2]:
            for c2 in range(d):
                if low[b1][c2]:
                    rhs = rhs + G[c2][b2].scale(e * eps[a1][a2] * low[b1][c2])
        if low[b1][b2]:
            for c2 in range(d):
                if eps[a1][c2]:
                    rhs = rhs - G[a2][c2].scale(e * eps[a1][c2] * low[b1][b2])
        if lhs != rhs:
            fails.append((a1, b1, a2, b2))
    return count, fails


def _symmetry_check(gs):
    d = gs.d
    G, eps = gs.G, gs.metric
    low = _metric_lower(gs)
    zero = QMat.zeros(gs.rep.n)
    fails = []
    count = 0
    for a1, a2, b1, b2 in itertools.product(range(d), repeat=4):
        count += 1
        lhs = zero
        if eps[a1][a2]:
            for c in range(d):
                if low[b1][c]:
                    lhs = lhs + G[c][b2].scale(eps[a1][a2] * low[b1][c])
                if low[c][b2]:
                    lhs = lhs + G[c][b1].scale(eps[a1][a2] * low[c][b2])
        rhs = zero
        if low[b1][b2]:
            for c in range(d):
                if eps[a1][c]:
                    rhs = rhs + G[a2][c].scale(eps[a1][c] * low[b1][b2])
                if eps[c][a2]:
                    rhs = rhs + G[a1][c].scale(eps[c][a2] * low[b1][b2])
        if lhs != rhs:
            fails.append((a1, a2, b1, b2))
    return count, fails


def _constraint_terms(gs):
    """Yield (tuple, X, Y, Z, W) with the constraint reading X - bY = Z - bW."""
    d = gs.d
    G, eps = gs.G, gs.metric
    low = _metric_lower(gs)
    n = gs.rep.n
    zero = QMat.zeros(n)
    GG_low = {}
    GG_up = {}
    for b1 in range(d):
        for b2 in range(d):
            acc = zero
            for c1 in range(d):
                for c2 in range(d):
                    if low[c1][c2]:
                        acc = acc + (G[c1][b1] @ G[c2][b2]).scale(low[c1][c2])
            GG_low[(b1, b2)] = acc
    for a1 in range(d):
        for a2 in range(d):
            acc = zero
            for c1 in range(d):
                for c2 in range(d):
                    if eps[c1][c2]:
                        acc = acc + (G[a2][c2] @ G[a1][c1]).scale(eps[c1][c2])
            GG_up[(a1, a2)] = acc
    for a1, a2, b1, b2 in itertools.product(range(d), repeat=4):
        X = GG_low[(b1, b2)].scale(eps[a1][a2]) if eps[a1][a2] else zero
        Y = zero
        if eps[a1][a2]:
            for c2 in range(d):
                if low[b1][c2]:
                    Y = Y + G[c2][b2].scale(eps[a1][a2] * low[b1][c2])
        Z = GG_up[(a1, a2)].scale(low[b1][b2]) if low[b1][b2] else zero
        W = zero
        if low[b1][b2]:
            for c2 in range(d):
                if eps[a1][c2]:
                    W = W + G[a2][c2].scale(eps[a1][c2] * low[b1][b2])
        yield (a1, a2, b1, b2), X, Y, Z, W


def solve_constraint_beta(gs):
    """Solve the linear condition in beta; returns (beta or 'any' or None, checked)."""
    beta = None
    pending = []
    count = 0
    for key, X, Y, Z, W in _constraint_terms(gs):
        count += 1
        A = W - Y   # beta * A = Z - X
        B = Z - X
        if beta is None and not A.is_zero():
            (i, j, a) = next(iter(A.items()))
            beta_gr = B[i, j] / a
            if beta_gr.im != 0:
                return None, count
            beta = beta_gr.re
        pending.append((key, A, B))
    if beta is None:
        ok = all(B.is_zero() for _, _, B in pending)
        return ("any" if ok else None), count
    for key, A, B in pending:
        if A.scale(beta) != B:
            return None, count
    return beta, count


def verify_generator_relations(gs: GeneratorSet, which: str) -> GeneratorReport:
    """which in {'lie', 'symmetry', 'constraint'}."""
    if which == "lie":
        count, fails = _lie_check(gs)
        return GeneratorReport(which, not fails, count, fails)
    if which == "symmetry":
        count, fails = _symmetry_check(gs)
        return GeneratorReport(which, not fails, count, fails)
    if which == "constraint":
        beta, count = solve_constraint_beta(gs)
        if beta is None:
            return GeneratorReport(which, False, count, [], "no solution")
        return GeneratorReport(which, True, count, [], beta)
    raise ValueError(f"unknown relation family {which!r}")


def constraint_holds(gs: GeneratorSet, beta) -> bool:
    beta = Fraction(beta)
    for _, X, Y, Z, W in _constraint_terms(gs):
        if X - Y.scale(beta) != Z - W.scale(beta):
            return False
    return True


def gammas_to_json(rep: CliffordRep):
    from .exact_core import qmat_to_json
    out = {"d": rep.d, "spinor_dim": rep.n, "gammas": [qmat_to_json(g) for g in rep.gammas]}
    out["chirality"] = qmat_to_json(rep.chirality) if rep.chirality is not None else None
    return out
