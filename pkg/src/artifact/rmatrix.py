"""Fundamental and spinorial R-matrices.

Spinorial R-matrices are polynomials in the two-site invariant z.  Within a
parity class of roots the Beta-function coefficients are related by the
functional equation B(x+1, y) = x/(x+y) B(x, y), so each class gives an exact
rational function of u per eigenprojector; clearing denominators and content
yields a primitive polynomial matrix.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .clifford import CliffordRep, build_gammas, generator_set
from .exact_core import (GR, QMat, SparsePolyMatrix, SpectralPoly, partial_trace,
                         poly_divmod, poly_gcd, swap_matrix)
from .invariants import invariant_tower, permutation_sign, spinor_pair_space, tower_polys

U = SpectralPoly.var("u")


def _u_linear(a, b) -> SpectralPoly:
    """a*u + b."""
    return SpectralPoly.from_coeffs([b, a])


# ------------------------------------------------------------ rational functions

@dataclass(frozen=True)
class RationalFunction:
    """num/den in u, reduced with a monic denominator."""

    num: SpectralPoly
    den: SpectralPoly

    @classmethod
    def make(cls, num, den=None):
        if not isinstance(num, SpectralPoly):
            num = SpectralPoly.const(num)
        den = SpectralPoly.const(1) if den is None else den
        if not isinstance(den, SpectralPoly):
            den = SpectralPoly.const(den)
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        if num.is_zero():
            return cls(num, SpectralPoly.const(1))
        g = poly_gcd(num, den)
        if g.degree() > 0:
            num = poly_divmod(num, g)[0]
            den = poly_divmod(den, g)[0]
        lead = den.leading()
        return cls(num * lead.inverse(), den * lead.inverse())

    @classmethod
    def one(cls):
        return cls.make(1)

    def __mul__(self, o):
        if not isinstance(o, RationalFunction):
            o = RationalFunction.make(o)
        return RationalFunction.make(self.num * o.num, self.den * o.den)

    def __truediv__(self, o):
        if not isinstance(o, RationalFunction):
            o = RationalFunction.make(o)
        return RationalFunction.make(self.num * o.den, self.den * o.num)

    def __add__(self, o):
        if not isinstance(o, RationalFunction):
            o = RationalFunction.make(o)
        return RationalFunction.make(self.num * o.den + o.num * self.den, self.den * o.den)

    def __eq__(self, o):
        if not isinstance(o, RationalFunction):
            o = RationalFunction.make(o)
        return self.num * o.den == o.num * self.den

    def __hash__(self):
        return hash((self.num, self.den))

    def is_one(self):
        return self.num == self.den

    def __call__(self, u):
        return self.num(u) / self.den(u)

    def __repr__(self):
        return f"({self.num!r})/({self.den!r})"


def _poly_lcm(a, b):
    return poly_divmod(a * b, poly_gcd(a, b))[0]


# ------------------------------------------------------------ R objects

@dataclass
class RObject:
    symmetry: str
    d: int
    rep_pair: str
    chirality: str
    checked: bool
    degree: int
    matrix: SparsePolyMatrix
    factor_dim: int
    spectral: dict | None = field(default=None, repr=False)  # root -> polynomial coefficient

    def at(self, u):
        return self.matrix.at(u)

    def label(self):
        c = "" if self.chirality == "n/a" else f" {self.chirality}"
        return f"{self.symmetry} {self.rep_pair}{c}{' checked' if self.checked else ''}"

    def to_json(self):
        out = {"symmetry": self.symmetry, "d": self.d, "rep_pair": self.rep_pair,
               "chirality": self.chirality, "checked": self.checked, "degree": self.degree,
               "factor_dim": self.factor_dim, "matrix": self.matrix.to_json()}
        if self.spectral is not None:
            out["spectral"] = [[str(r), p.to_json()] for r, p in sorted(self.spectral.items())]
        return out


def metric(epsilon: int, n: int):
    """(upper, lower) metric matrices.  The symplectic upper metric is
    eps^{ab} = (-1)^a delta^{a+b, n+1} (indices from 1); the lower one is its inverse."""
    if epsilon == 1:
        e = QMat.identity(n)
        return e, e
    if epsilon != -1:
        raise ValueError("epsilon must be +1 or -1")
    if n % 2:
        raise ValueError("symplectic metric needs even n")
    up = QMat.from_entries((n, n), {(a - 1, n - a): (-1) ** a for a in range(1, n + 1)})
    return up, up.scale(-1)


def k_matrix(epsilon: int, n: int) -> QMat:
    """K^{a1 a2}_{b1 b2} = eps^{a1 a2} eps_{b1 b2}, row a1*n+a2, column b1*n+b2."""
    up, lo = metric(epsilon, n)
    ent = {}
    for a1, a2, x in up.items():
        for b1, b2, y in lo.items():
            ent[(a1 * n + a2, b1 * n + b2)] = x * y
    return QMat.from_entries((n * n, n * n), ent)


def fundamental_R(epsilon: int, n: int) -> RObject:
    """R(u) = u(u + n/2 - eps) I + (u + n/2 - eps) P - eps u K on V (x) V."""
    if epsilon not in (1, -1):
        raise ValueError("epsilon must be +1 or -1")
    if epsilon == 1 and n < 2:
        raise ValueError("need n >= 2")
    if epsilon == -1 and (n % 2 or n < 2):
        raise ValueError("symplectic case needs even n >= 2")
    c = Fraction(n, 2) - epsilon
    eye = QMat.identity(n * n)
    P = swap_matrix(n)
    K = k_matrix(epsilon, n)
    M = SparsePolyMatrix((n * n, n * n), {(2,): eye, (1,): eye.scale(c) + P - K.scale(epsilon),
                                          (0,): P.scale(c)})
    sym = f"so({n})" if epsilon == 1 else f"sp({n})"
    return RObject(sym, n, "vector-vector", "n/a", False, M.degree(), M, n)


def k_squared_factor(epsilon: int, n: int):
    """The scalar c with K^2 = c K (c = eps n)."""
    K = k_matrix(epsilon, n)
    K2 = K @ K
    i, j, v = next(iter(K.items()))
    c = K2[i, j] / v
    if K2 != K.scale(c):
        raise ArithmeticError("K^2 is not proportional to K")
    return c


# ------------------------------------------------------------ Beta ratios

@dataclass(frozen=True)
class BetaCoefficient:
    z_k: Fraction
    z_ref: Fraction
    ratio: RationalFunction

    @property
    def numerator(self):
        return self.ratio.num

    @property
    def denominator(self):
        return self.ratio.den


def beta_ratio(z_k, z_ref) -> BetaCoefficient:
    """B((z_k+1-u)/2, u) / B((z_ref+1-u)/2, u) by iterating the functional equation."""
    z_k, z_ref = Fraction(z_k), Fraction(z_ref)
    diff = z_k - z_ref
    if diff.denominator != 1 or diff.numerator % 2:
        raise ValueError(f"roots {z_k} and {z_ref} lie in different parity classes; "
                         "their Beta ratio is not rational in u")
    s = diff.numerator // 2
    r = RationalFunction.one()
    if s > 0:
        # x_ref + j = (z_ref + 1 + 2j - u)/2 and x_ref + j + u = (z_ref + 1 + 2j + u)/2
        for j in range(s):
            c = z_ref + 1 + 2 * j
            r = r * RationalFunction.make(_u_linear(-1, c), _u_linear(1, c))
    else:
        for j in range(-s):
            c = z_k + 1 + 2 * j
            r = r * RationalFunction.make(_u_linear(1, c), _u_linear(-1, c))
    return BetaCoefficient(z_k, z_ref, r)


# ------------------------------------------------------------ spinorial R

def parity_classes(d):
    """Roots of z grouped into classes whose differences are even integers."""
    roots = spinor_pair_space(build_gammas(d)).roots
    if d % 2:
        return {"full": list(roots)}
    return {"minus": [r for r in roots if r % 2 == 0],
            "plus": [r for r in roots if r % 2 != 0]}


def _content_normalize(polys: dict) -> dict:
    """Divide by the polynomial gcd, then by the rational content."""
    g = None
    for p in polys.values():
        if not p.is_zero():
            g = p if g is None else poly_gcd(g, p)
    if g is not None and g.degree() > 0:
        polys = {k: poly_divmod(p, g)[0] for k, p in polys.items()}
    dens, nums = 1, 0
    for p in polys.values():
        for c in p.terms.values():
            for q in (c.re, c.im):
                dens = dens * q.denominator // math.gcd(dens, q.denominator)
                nums = math.gcd(nums, q.numerator)
    scale = Fraction(dens, 1)
    polys = {k: p * scale for k, p in polys.items()}
    nums = 0
    for p in polys.values():
        for c in p.terms.values():
            nums = math.gcd(nums, math.gcd(int(c.re), int(c.im)))
    if nums > 1:
        polys = {k: p * Fraction(1, nums) for k, p in polys.items()}
    return polys


def _assemble(polys: dict, projectors: dict, dim) -> SparsePolyMatrix:
    coeffs = {}
    for r, p in polys.items():
        for e, c in p.terms.items():
            t = projectors[r].scale(c)
            coeffs[e] = coeffs[e] + t if e in coeffs else t
    return SparsePolyMatrix((dim, dim), coeffs)


def _first_diagonal_lead(M: SparsePolyMatrix):
    for i in range(M.rows):
        p = M.entry(i, i)
        if not p.is_zero():
            return p.leading()
    return None


@lru_cache(maxsize=None)
def _spinor_parts(d):
    rep = build_gammas(d)
    sp = spinor_pair_space(rep)
    out = {}
    for chir, cls in parity_classes(d).items():
        z_ref = max(cls)
        ratios = {r: beta_ratio(r, z_ref).ratio for r in cls}
        den = SpectralPoly.const(1)
        for rf in ratios.values():
            den = _poly_lcm(den, rf.den)
        polys = {r: poly_divmod(rf.num * den, rf.den)[0] for r, rf in ratios.items()}
        polys = _content_normalize(polys)
        unchecked = {r: p * permutation_sign(r, d) for r, p in polys.items()}
        lead = _first_diagonal_lead(_assemble(unchecked, sp.projectors, sp.dim))
        if lead is not None and lead.re < 0:
            polys = {r: -p for r, p in polys.items()}
            unchecked = {r: -p for r, p in unchecked.items()}
        out[chir] = (polys, unchecked)
    return out


def spinor_part(rep: CliffordRep, chirality: str = "full", checked: bool = True) -> RObject:
    """One normalized spinorial R.  chirality: 'plus' (odd z), 'minus' (even z),
    'full' (odd d, or the sum of both chiral parts for even d)."""
    d = rep.d
    if not 3 <= d <= 8:
        raise ValueError("spinorial R is built for d in 3..8")
    if rep != build_gammas(d):
        raise ValueError("spinorial R uses the canonical gamma matrices")
    sp = spinor_pair_space(rep)
    parts = _spinor_parts(d)
    if chirality == "full" and d % 2 == 0:
        polys = {}
        for p_c, p_u in parts.values():
            polys.update(p_c if checked else p_u)
    elif chirality in parts:
        polys = parts[chirality][0 if checked else 1]
    else:
        raise ValueError(f"chirality {chirality!r} not available for d={d}")
    M = _assemble(polys, sp.projectors, sp.dim)
    return RObject(f"so({d})", d, "spinor-spinor", chirality, checked, M.degree(), M, rep.n,
                   dict(polys))


def spinor_R(rep: CliffordRep) -> list:
    """All normalized spinorial parts: checked and unchecked for each chirality."""
    chirs = ["full"] if rep.d % 2 else ["minus", "plus"]
    return [spinor_part(rep, c, chk) for c in chirs for chk in (True, False)]


def check_of(R: RObject) -> RObject:
    """Switch between R and the checked form P R (P is an involution)."""
    P = swap_matrix(R.factor_dim)
    M = SparsePolyMatrix.constant(P) @ R.matrix
    spec = None
    if R.spectral is not None and R.rep_pair == "spinor-spinor":
        spec = {r: p * permutation_sign(r, R.d) for r, p in R.spectral.items()}
    return RObject(R.symmetry, R.d, R.rep_pair, R.chirality, not R.checked, M.degree(), M,
                   R.factor_dim, spec)


# ------------------------------------------------------------ Shankar-Witten series

def sw_ratio(d: int, k: int, mode: str = "corrected") -> RationalFunction:
    """r_k / r_{k0} with k0 = k mod 2 (orthogonal case).

    'printed' uses the odd-coefficient formula as published; 'corrected' shifts its
    Gamma argument so that the odd series solves the RLL relation."""
    if mode not in ("corrected", "printed"):
        raise ValueError("mode must be 'corrected' or 'printed'")
    r = RationalFunction.one()
    if k % 2 == 0:
        for m in range(k // 2):
            r = r * RationalFunction.make(_u_linear(-4, -8 * m), _u_linear(1, d - 2 - 2 * m))
    else:
        shift = 3 if mode == "corrected" else 1
        for m in range((k - 1) // 2):
            r = r * RationalFunction.make(_u_linear(-4, -4 * (2 * m + 1)),
                                          _u_linear(1, d - shift - 2 * m))
    return r


def sw_coefficients(d: int, parity: str, mode: str = "corrected") -> dict:
    """k -> (r_k/k!)/(r_{k0}/k0!) for the invariant I_k."""
    k0 = {"even": 0, "odd": 1}[parity]
    return {k: sw_ratio(d, k, mode) * Fraction(math.factorial(k0), math.factorial(k))
            for k in range(k0, d + 1, 2)}


def sw_expansion(rep: CliffordRep, parity: str, mode: str = "corrected") -> SparsePolyMatrix:
    """Sum of the invariants I_k of one parity with Gamma-ratio coefficients,
    denominators cleared."""
    if not 3 <= rep.d <= 8:
        raise ValueError("d must be in 3..8")
    coeffs = sw_coefficients(rep.d, parity, mode)
    den = SpectralPoly.const(1)
    for rf in coeffs.values():
        den = _poly_lcm(den, rf.den)
    tower = invariant_tower(rep, rep.d)
    n2 = rep.n * rep.n
    acc = SparsePolyMatrix((n2, n2), {})
    for k, rf in coeffs.items():
        p = poly_divmod(rf.num * den, rf.den)[0]
        acc = acc + SparsePolyMatrix.constant(tower[k]).poly_scale(p)
    return acc


def proportional_at(A: QMat, B: QMat):
    """c with A = c B, or None."""
    if B.is_zero():
        return GR(0) if A.is_zero() else None
    i, j, v = next(iter(B.items()))
    c = A[i, j] / v
    return c if A == B.scale(c) else None


# ------------------------------------------------------------ defining relations

@dataclass
class DefiningRelationsReport:
    d: int
    commutes_with_z: bool
    symmetry: bool
    v0_relation: bool
    ladder_recursion: bool
    matches_beta: bool
    failures: list = field(default_factory=list)

    @property
    def ok(self):
        return (self.commutes_with_z and self.symmetry and self.v0_relation
                and self.ladder_recursion and self.matches_beta)

    def to_json(self):
        return {"d": self.d, "commutes_with_z": self.commutes_with_z, "symmetry": self.symmetry,
                "v0_relation": self.v0_relation, "ladder_recursion": self.ladder_recursion,
                "matches_beta": self.matches_beta, "failures": self.failures, "ok": self.ok}


def two_site_generators(rep: CliffordRep):
    """(G1, G2) with G1[a][b] = G^{ab} (x) I and G2[a][b] = I (x) G^{ab}."""
    gs = generator_set(rep)
    eye = QMat.identity(rep.n)
    G1 = [[g.kron(eye) for g in row] for row in gs.G]
    G2 = [[eye.kron(g) for g in row] for row in gs.G]
    return G1, G2


def extract_spectral(Rhat: SparsePolyMatrix, projectors: dict) -> dict:
    """Read off c_k with R P_k = c_k P_k; raises if R is not diagonal in the projectors."""
    out = {}
    for r, P in projectors.items():
        RP = Rhat @ SparsePolyMatrix.constant(P)
        i, j, v = next(iter(P.items()))
        c = RP.entry(i, j) * v.inverse()
        if RP != SparsePolyMatrix.constant(P).poly_scale(c):
            raise ArithmeticError(f"R does not act as a scalar on the eigenspace z = {r}")
        out[r] = c
    return out


def verify_defining_relations(rep: CliffordRep, Rhat: RObject) -> DefiningRelationsReport:
    """Symmetry condition, the v^0 relation and the ladder recursion for a checked R."""
    if not Rhat.checked:
        raise ValueError("pass the checked form")
    sp = spinor_pair_space(rep)
    M = Rhat.matrix
    Z = SparsePolyMatrix.constant(sp.z)
    fails = []
    comm_z = M @ Z == Z @ M
    if not comm_z:
        fails.append("z")
    G1, G2 = two_site_generators(rep)
    d = rep.d
    sym = True
    for a in range(d):
        for b in range(a + 1, d):
            S = SparsePolyMatrix.constant(G1[a][b] + G2[a][b])
            if M @ S != S @ M:
                sym = False
                fails.append(f"symmetry {a},{b}")
    v0 = True
    for a in range(d):
        for b in range(d):
            GG = QMat.zeros(sp.dim)
            for c in range(d):
                GG = GG + G1[a][c] @ G2[c][b]
            lhs = M @ SparsePolyMatrix.linear(G2[a][b], GG)
            rhs = SparsePolyMatrix.linear(G1[a][b], GG) @ M
            if lhs != rhs:
                v0 = False
                fails.append(f"v0 {a},{b}")
    # ladder recursion: c(z+2) (z+1+u) = c(z) (z+1-u) on adjacent roots of one class
    try:
        spec = extract_spectral(M, sp.projectors)
    except ArithmeticError as exc:
        fails.append(str(exc))
        return DefiningRelationsReport(d, comm_z, sym, v0, False, False, fails)
    ladder = True
    beta = True
    support = [r for r, p in spec.items() if not p.is_zero()]
    for cls in parity_classes(d).values():
        cls = [r for r in cls if r in support]
        if not cls:
            continue
        z_ref = max(cls)
        for r in cls:
            if r + 2 in cls:
                if spec[r + 2] * _u_linear(1, r + 1) != spec[r] * _u_linear(-1, r + 1):
                    ladder = False
                    fails.append(f"ladder {r}->{r + 2}")
            br = beta_ratio(r, z_ref).ratio
            if spec[r] * br.den != spec[z_ref] * br.num:
                beta = False
                fails.append(f"beta {r}")
    return DefiningRelationsReport(d, comm_z, sym, v0, ladder, beta, fails)


# ------------------------------------------------------------ chiral structure

def chiral_products_vanish(rep: CliffordRep) -> bool:
    """R_plus R_minus = 0 = R_minus R_plus (unchecked forms)."""
    a = spinor_part(rep, "plus", False).matrix
    b = spinor_part(rep, "minus", False).matrix
    return (a @ b).is_zero() and (b @ a).is_zero()


def projector_absorbs(rep: CliffordRep, R: RObject) -> bool:
    """Pi R = R Pi = R for the projector owning the chirality tag."""
    sp = spinor_pair_space(rep)
    Pi = SparsePolyMatrix.constant(sp.chirality_plus if R.chirality == "plus" else sp.chirality_minus)
    return Pi @ R.matrix == R.matrix and R.matrix @ Pi == R.matrix


@dataclass
class ChiralFusion:
    """tr_2(R_plus(2v+1) gamma^a_2 R_minus(v) gamma^b_2) = scale * L^{ab}(alpha v + beta)."""

    scale: GR | None
    alpha: Fraction | None
    beta: Fraction | None
    holds: bool
    same_chirality_vanish: bool

    @property
    def literal_argument(self):
        """Whether the fused operator is L at 2v+1."""
        return self.holds and (self.alpha, self.beta) == (2, 1)

    def to_json(self):
        return {"scale": None if self.scale is None else self.scale.to_json(),
                "alpha": None if self.alpha is None else str(self.alpha),
                "beta": None if self.beta is None else str(self.beta),
                "holds": self.holds, "same_chirality_vanish": self.same_chirality_vanish,
                "literal_argument": self.literal_argument}


def _trace2_sandwich(rep, A: SparsePolyMatrix, B: SparsePolyMatrix, a, b):
    """tr_2(A gamma^a_2 B gamma^b_2) as a matrix on the first spinor factor."""
    eye = QMat.identity(rep.n)
    ga = SparsePolyMatrix.constant(eye.kron(rep.gammas[a]))
    gb = SparsePolyMatrix.constant(eye.kron(rep.gammas[b]))
    prod = A @ ga @ B @ gb
    n = rep.n
    return SparsePolyMatrix((n, n), {e: partial_trace(m, (n, n), 2) for e, m in prod.coeffs.items()},
                            prod.vars)


def chiral_fusion(rep: CliffordRep) -> ChiralFusion:
    """Fuse the two chiral parts of so(4) through a spinor trace.

    The scale comes from an off-diagonal block, the affine argument from the
    diagonal; then every block is compared against the resulting L."""
    if rep.d != 4:
        raise ValueError("the chiral fusion identity is stated for d = 4")
    plus = spinor_part(rep, "plus", False).matrix
    minus = spinor_part(rep, "minus", False).matrix
    Rp = plus.shifted(2, 1)
    gs = generator_set(rep)
    n, d = rep.n, rep.d
    T = {(a, b): _trace2_sandwich(rep, Rp, minus, a, b) for a in range(d) for b in range(d)}
    same = all(_trace2_sandwich(rep, X, Y, a, b).is_zero()
               for X, Y in ((Rp, plus), (minus.shifted(2, 1), minus))
               for a in range(d) for b in range(d))
    off = T[(0, 1)]
    scale = None
    if off.is_constant():
        scale = proportional_at(off.const_part(), gs.G[0][1])
    if scale is None or scale.is_zero():
        return ChiralFusion(None, None, None, False, same)
    diag = T[(0, 0)]
    arg = diag.entry(0, 0) * scale.inverse()
    if arg.degree() > 1:
        return ChiralFusion(scale, None, None, False, same)
    alpha = arg.terms.get((1,), GR(0))
    beta = arg.terms.get((0,), GR(0))
    if alpha.im or beta.im:
        return ChiralFusion(scale, None, None, False, same)
    alpha, beta = alpha.re, beta.re
    holds = True
    eye = QMat.identity(n)
    for (a, b), t in T.items():
        want = SparsePolyMatrix.linear(eye.scale(alpha if a == b else 0),
                                       gs.G[a][b] + eye.scale(beta if a == b else 0))
        if t != want.scale(scale):
            holds = False
    return ChiralFusion(scale, alpha, beta, holds, same)


# ------------------------------------------------------------ invariant-tensor content

def _solve_exact(A, b):
    """Solve the square system A x = b over Fractions (None when singular)."""
    n = len(A)
    M = [list(map(Fraction, row)) + [Fraction(bb)] for row, bb in zip(A, b)]
    for col in range(n):
        piv = next((r for r in range(col, n) if M[r][col] != 0), None)
        if piv is None:
            return None
        M[col], M[piv] = M[piv], M[col]
        for r in range(n):
            if r != col and M[r][col] != 0:
                f = M[r][col] / M[col][col]
                M[r] = [x - f * y for x, y in zip(M[r], M[col])]
    return [M[i][n] / M[i][i] for i in range(n)]


def tensor_content(R: RObject) -> dict:
    """Expand a spinorial part in the lowest independent invariants I_k on its roots.

    Returns {'degree', 'basis' (list of k), 'coefficients' {k: poly}, 'tensor_count'}."""
    if R.spectral is None:
        raise ValueError("needs a spinorial RObject")
    d = R.d
    roots = sorted(r for r in R.spectral if not R.spectral[r].is_zero())
    polys = tower_polys(d, d)
    parity = None
    if d % 2 == 0 and R.chirality in ("plus", "minus"):
        # checked parts are odd/even functions of z
        parity = 1 if R.chirality == "plus" else 0
    ks = [k for k in range(d + 1) if parity is None or k % 2 == parity]
    basis = []
    rows = []
    for k in ks:
        vec = [_zeval(polys[k], r) for r in roots]
        trial = rows + [vec]
        if _rank_fr(trial) == len(trial):
            basis.append(k)
            rows = trial
        if len(basis) == len(roots):
            break
    # least-squares free: the spectral vector must lie in the span; solve on independent rows
    A = [list(col) for col in zip(*rows)]  # roots x basis
    sel = _independent_rows(A)
    coeffs = {k: SpectralPoly() for k in basis}
    max_deg = max(p.degree() for p in R.spectral.values())
    for j in range(max_deg + 1):
        rhs = [R.spectral[r].terms.get((j,), GR(0)).re for r in roots]
        x = _solve_exact([A[i] for i in sel], [rhs[i] for i in sel])
        for i, r in enumerate(roots):
            if sum(a * xx for a, xx in zip(A[i], x)) != rhs[i]:
                raise ArithmeticError("part is not in the span of the invariants")
        for k, xx in zip(basis, x):
            if xx:
                coeffs[k] = coeffs[k] + SpectralPoly({(j,): xx})
    coeffs = {k: p for k, p in coeffs.items() if not p.is_zero()}
    return {"degree": R.degree, "basis": basis, "coefficients": coeffs,
            "tensor_count": len(coeffs)}


def _zeval(p, x):
    acc = Fraction(0)
    for c in reversed(p.coeffs):
        acc = acc * x + c.re
    return acc


def _rank_fr(rows):
    M = [list(map(Fraction, r)) for r in rows]
    rk = 0
    ncol = len(M[0]) if M else 0
    for col in range(ncol):
        piv = next((r for r in range(rk, len(M)) if M[r][col] != 0), None)
        if piv is None:
            continue
        M[rk], M[piv] = M[piv], M[rk]
        for r in range(len(M)):
            if r != rk and M[r][col] != 0:
                f = M[r][col] / M[rk][col]
                M[r] = [x - f * y for x, y in zip(M[r], M[rk])]
        rk += 1
    return rk


def _independent_rows(A):
    sel = []
    for i in range(len(A)):
        if _rank_fr([A[j] for j in sel] + [A[i]]) == len(sel) + 1:
            sel.append(i)
    return sel


def so8_structure() -> dict:
    """Degree and invariant-tensor count of both chiral parts of so(8)."""
    rep = build_gammas(8)
    out = {}
    for chir in ("plus", "minus"):
        R = spinor_part(rep, chir, True)
        tc = tensor_content(R)
        out[chir] = {"degree": tc["degree"], "tensor_count": tc["tensor_count"], "basis": tc["basis"]}
    return out
