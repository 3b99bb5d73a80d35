"""Two-site invariant z, the invariant tower, projectors, chirality split, permutation."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .clifford import CliffordRep, antisym_product, build_gammas
from .exact_core import GR, QMat, SpectralPoly, rank, swap_matrix

Z_VARS = ("z",)


def build_z(rep: CliffordRep) -> QMat:
    """z = 1/2 sum_a gamma^a (x) gamma^a with commuting tensor copies."""
    acc = QMat.zeros(rep.n * rep.n)
    for g in rep.gammas:
        acc = acc + g.kron(g)
    return acc.scale(Fraction(1, 2))


def two_site(rep: CliffordRep, a: QMat, which: int) -> QMat:
    """Lift a single-spinor operator to factor 1 or 2 of S (x) S."""
    eye = QMat.identity(rep.n)
    return a.kron(eye) if which == 1 else eye.kron(a)


# ------------------------------------------------------------ polynomials in z

def zpoly(coeffs) -> SpectralPoly:
    return SpectralPoly.from_coeffs(coeffs, Z_VARS)


def zlinear(root) -> SpectralPoly:
    """z - root."""
    return zpoly([-Fraction(root), 1])


def poly_at_matrix(p: SpectralPoly, Z: QMat, powers=None) -> QMat:
    """Evaluate a polynomial in z at the matrix Z (Horner)."""
    coeffs = p.coeffs
    n = Z.shape[0]
    if not coeffs:
        return QMat.zeros(n)
    if powers is not None:
        acc = QMat.zeros(n)
        for k, c in enumerate(coeffs):
            if c:
                acc = acc + powers(k).scale(c)
        return acc
    acc = QMat.identity(n).scale(coeffs[-1])
    for c in reversed(coeffs[:-1]):
        acc = acc @ Z
        if c:
            acc = acc + QMat.identity(n).scale(c)
    return acc


class _PowerCache:
    def __init__(self, Z):
        self.Z = Z
        self.cache = [QMat.identity(Z.shape[0])]

    def __call__(self, k):
        while len(self.cache) <= k:
            self.cache.append(self.cache[-1] @ self.Z)
        return self.cache[k]


def z_roots(d: int):
    """Eigenvalues of z in increasing order."""
    m = d // 2
    if d % 2 == 0:
        return [Fraction(k) for k in range(-m, m + 1)]
    return sorted(Fraction((-1) ** k * (2 * k + 1), 2) for k in range(m + 1))


def characteristic_poly(d: int) -> SpectralPoly:
    """Minimal polynomial of z: z prod (z^2 - k^2) for even d, the reduced product for odd d."""
    p = zpoly([1])
    for r in z_roots(d):
        p = p * zlinear(r)
    return p


def tower_polys(d, k_max=None):
    """I_0..I_{k_max} as polynomials in z via I_{k+1} = z I_k - (k/4)(d-k+1) I_{k-1}."""
    k_max = d + 1 if k_max is None else k_max
    z = SpectralPoly.var("z", Z_VARS)
    out = [zpoly([1]), z]
    for k in range(1, k_max):
        out.append(z * out[k] - out[k - 1] * Fraction(k * (d - k + 1), 4))
    return out[:k_max + 1]


def full_tower_poly(d) -> SpectralPoly:
    """I_{d+1}(z, d), which annihilates z."""
    return tower_polys(d, d + 1)[d + 1]


# ------------------------------------------------------------ projectors

def lagrange_basis(roots, r) -> SpectralPoly:
    p = zpoly([1])
    for s in roots:
        if s != r:
            p = p * zlinear(s) * (1 / Fraction(r - s))
    return p


@lru_cache(maxsize=None)
def _pair_space_cached(d):
    return _build_pair_space(build_gammas(d))


@dataclass(frozen=True)
class SpinorPairSpace:
    rep: CliffordRep
    z: QMat
    roots: tuple
    projectors: dict
    chirality_plus: QMat | None
    chirality_minus: QMat | None
    permutation: QMat
    chirality_sign: int | None = None

    @property
    def dim(self):
        return self.z.shape[0]


def spinor_pair_space(rep: CliffordRep) -> SpinorPairSpace:
    if rep == build_gammas(rep.d):
        return _pair_space_cached(rep.d)
    return _build_pair_space(rep)


def _build_pair_space(rep):
    Z = build_z(rep)
    P = eigen_projectors(rep, Z)
    perm = swap_matrix(rep.n)
    plus = minus = sign = None
    if rep.d % 2 == 0:
        plus, minus, sign = _chiral_split(rep, P)
    return SpinorPairSpace(rep, Z, tuple(sorted(P)), P, plus, minus, perm, sign)


def eigen_projectors(rep: CliffordRep, Z: QMat | None = None) -> dict:
    """Lagrange interpolation projectors P_k keyed by the root z_k."""
    Z = build_z(rep) if Z is None else Z
    roots = z_roots(rep.d)
    pw = _PowerCache(Z)
    return {r: poly_at_matrix(lagrange_basis(roots, r), Z, pw) for r in roots}


def _chiral_split(rep, P):
    """Plus = odd-z sector, minus = even-z sector; sign s with plus = (1 + s C(x)C)/2."""
    n2 = rep.n * rep.n
    plus = QMat.zeros(n2)
    minus = QMat.zeros(n2)
    for r, p in P.items():
        if r.denominator == 1 and r.numerator % 2:
            plus = plus + p
        else:
            minus = minus + p
    cc = rep.chirality.kron(rep.chirality)
    eye = QMat.identity(n2)
    half = Fraction(1, 2)
    if plus == (eye + cc).scale(half):
        sign = 1
    elif plus == (eye - cc).scale(half):
        sign = -1
    else:
        raise ArithmeticError("chirality product is not a function of the z parity")
    return plus, minus, sign


def chirality_projectors(rep: CliffordRep):
    """(Pi_plus, Pi_minus): plus is the odd-z sector, minus the even-z sector."""
    if rep.d % 2:
        raise ValueError("chirality projectors need even d")
    sp = spinor_pair_space(rep)
    return sp.chirality_plus, sp.chirality_minus


def chirality_sign(rep: CliffordRep) -> int:
    """s such that Pi_plus = (1 + s gamma^{d+1} (x) gamma^{d+1}) / 2."""
    if rep.d % 2:
        raise ValueError("chirality projectors need even d")
    return spinor_pair_space(rep).chirality_sign


def chirality_tensor_as_z_parity(rep: CliffordRep) -> bool:
    """gamma^{d+1} (x) gamma^{d+1} equals (-1)^z."""
    sp = spinor_pair_space(rep)
    acc = QMat.zeros(sp.dim)
    for r, p in sp.projectors.items():
        acc = acc + p.scale(-1 if int(r) % 2 else 1)
    return acc == rep.chirality.kron(rep.chirality)


# ------------------------------------------------------------ invariant tower

@dataclass(frozen=True)
class InvariantTower:
    d: int
    values: tuple
    direct: tuple
    agrees: bool

    def __getitem__(self, k):
        return self.values[k]


def contraction(rep: CliffordRep, k: int) -> QMat:
    """(k!/2^k) sum_{a1<...<ak} gamma^{a1..ak} (x) gamma^{a1..ak}."""
    n2 = rep.n * rep.n
    if k > rep.d:
        return QMat.zeros(n2)
    acc = QMat.zeros(n2)
    for A in itertools.combinations(range(rep.d), k):
        g = antisym_product(rep, A)
        acc = acc + g.kron(g)
    return acc.scale(Fraction(math.factorial(k), 2 ** k))


def invariant_tower(rep: CliffordRep, k_max: int | None = None) -> InvariantTower:
    k_max = rep.d + 1 if k_max is None else k_max
    if k_max > rep.d + 1:
        raise ValueError("k_max must not exceed d + 1")
    Z = spinor_pair_space(rep).z
    n2 = Z.shape[0]
    vals = [QMat.identity(n2), Z]
    for k in range(1, k_max):
        vals.append(Z @ vals[k] - vals[k - 1].scale(Fraction(k * (rep.d - k + 1), 4)))
    vals = vals[:k_max + 1]
    direct = [contraction(rep, k) for k in range(k_max + 1)]
    return InvariantTower(rep.d, tuple(vals), tuple(direct), all(a == b for a, b in zip(vals, direct)))


def odd_duality_constant(rep: CliffordRep, k: int):
    """c with I_k = c I_{d-k} for odd d (None if not proportional)."""
    if rep.d % 2 == 0:
        raise ValueError("duality between invariants holds for odd d")
    tw = invariant_tower(rep)
    a, b = tw[k], tw[rep.d - k]
    if b.is_zero():
        return None
    i, j, v = next(iter(b.items()))
    c = a[i, j] / v
    return c if a == b.scale(c) else None


def multiplicities(rep: CliffordRep) -> dict:
    sp = spinor_pair_space(rep)
    return {r: rank(p) for r, p in sp.projectors.items()}


def ladder_holds(rep: CliffordRep) -> bool:
    """z gamma_pm^a = gamma_pm^a (-z +- 1) for gamma_pm = gamma_1 +- gamma_2."""
    sp = spinor_pair_space(rep)
    Z = sp.z
    eye = QMat.identity(Z.shape[0])
    for g in rep.gammas:
        g1, g2 = two_site(rep, g, 1), two_site(rep, g, 2)
        for s in (1, -1):
            gpm = g1 + g2.scale(s)
            if Z @ gpm != gpm @ (eye.scale(s) - Z):
                return False
    return True


# ------------------------------------------------------------ permutation

def permutation_sign(r: Fraction, d: int) -> int:
    """Eigenvalue of the flip on the z-eigenspace of root r."""
    if d % 2 == 0:
        k = int(r)
    else:
        # odd d: the root r joins the even-d pair (r - 1/2, r + 1/2), which share a sign
        k = int(r - Fraction(1, 2))
    return (-1) ** ((k * (k - 1) // 2) % 2)


def permutation_operator(rep: CliffordRep, method: str = "spectral") -> QMat:
    sp = spinor_pair_space(rep)
    if method == "spectral":
        acc = QMat.zeros(sp.dim)
        for r, p in sp.projectors.items():
            acc = acc + p.scale(permutation_sign(r, rep.d))
        return acc
    if method == "gamma_sum":
        acc = QMat.zeros(sp.dim)
        for k in range(rep.d + 1):
            s = (-1) ** ((k * (k - 1) // 2) % 2)
            for A in itertools.combinations(range(rep.d), k):
                g = antisym_product(rep, A)
                acc = acc + g.kron(g).scale(s)
        return acc.scale(Fraction(rep.n, 2 ** rep.d))
    if method == "regrouped":
        if rep.d % 2:
            raise ValueError("the regrouped form is stated for even d")
        acc = QMat.zeros(sp.dim)
        for r, p in sp.projectors.items():
            k = int(r) // 2  # floor division pairs (2k, 2k+1)
            acc = acc + p.scale((-1) ** (k % 2))
        return acc
    raise ValueError(f"unknown method {method!r}")


def symmetric_rank(rep: CliffordRep, sign: int) -> int:
    sp = spinor_pair_space(rep)
    eye = QMat.identity(sp.dim)
    return rank((eye + sp.permutation.scale(sign)).scale(Fraction(1, 2)))


def dsig_formula(m: int, sign: int) -> int:
    return (2 ** m + sign) * 2 ** (m - 1)
