"""Exact identity testing for Yang-Baxter type relations.

Both sides of every identity are polynomial in (u, v) with known degree
bounds, so agreement on a grid with more points than the degree in each
variable proves the identity.  Each grid point is a constant exact product.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .clifford import CliffordRep, L_operator, generator_set
from .exact_core import GR, QMat, SparsePolyMatrix, embed, inverse
from .rmatrix import RObject, check_of, fundamental_R

HALF = Fraction(1, 2)


# ------------------------------------------------------------ reports

@dataclass
class IdentityReport:
    identity_name: str
    parameters: dict
    grid: list
    passed: bool
    degree_bounds: dict = field(default_factory=dict)
    first_violation: dict | None = None
    extra: dict = field(default_factory=dict)

    @property
    def status(self):
        return "pass" if self.passed else "fail"

    def __bool__(self):
        return self.passed

    def to_json(self):
        out = {"identity": self.identity_name,
               "parameters": {k: str(v) for k, v in sorted(self.parameters.items())},
               "grid": [[str(x) for x in pt] for pt in self.grid],
               "degree_bounds": dict(sorted(self.degree_bounds.items())),
               "status": self.status, "first_violation": self.first_violation}
        if self.extra:
            out["extra"] = {k: str(v) for k, v in sorted(self.extra.items())}
        return out


def make_grid(bounds: dict, grid_scale: int = 1):
    """Points 0..k in u and half-integers in v, more than the bound in each variable."""
    du = bounds.get("u", 0)
    us = [Fraction(k) for k in range(grid_scale * (du + 1))]
    if "v" not in bounds:
        return [(u,) for u in us]
    vs = [Fraction(2 * k + 1, 2) for k in range(grid_scale * (bounds["v"] + 1))]
    return [(u, v) for u in us for v in vs]


def _first_diff(lhs: QMat, rhs: QMat):
    diff = lhs - rhs
    for i, j, _ in diff.items():
        return i, j, lhs[i, j], rhs[i, j]
    return None


def run_identity(name, params, lhs_fn, rhs_fn, bounds, grid_scale=1, grid=None):
    """Evaluate both sides at every grid point and record the first violation."""
    grid = make_grid(bounds, grid_scale) if grid is None else grid
    for pt in grid:
        lhs, rhs = lhs_fn(*pt), rhs_fn(*pt)
        if lhs.shape != rhs.shape:
            raise ValueError(f"{name}: shapes {lhs.shape} and {rhs.shape} differ")
        if lhs != rhs:
            i, j, a, b = _first_diff(lhs, rhs)
            viol = {"point": [str(x) for x in pt], "row": i, "col": j, "lhs": str(a), "rhs": str(b)}
            return IdentityReport(name, params, grid, False, bounds, viol)
    return IdentityReport(name, params, grid, True, bounds)


def _matrix(R):
    return R.matrix if isinstance(R, RObject) else R


# ------------------------------------------------------------ RRR

def check_rrr(R12, R13=None, R23=None, dims=None, grid_scale=1, name="rrr"):
    """R12(u-v) R13(u) R23(v) = R23(v) R13(u) R12(u-v) on V1 (x) V2 (x) V3."""
    m12 = _matrix(R12)
    m13 = m12 if R13 is None else _matrix(R13)
    m23 = m12 if R23 is None else _matrix(R23)
    if dims is None:
        if not isinstance(R12, RObject):
            raise ValueError("dims required for bare matrices")
        f = R12.factor_dim
        dims = (f, f, f)
    n1, n2, n3 = dims
    for m, (a, b) in ((m12, (n1, n2)), (m13, (n1, n3)), (m23, (n2, n3))):
        if m.shape != (a * b, a * b):
            raise ValueError(f"R of shape {m.shape} does not act on C^{a} (x) C^{b}")
    deg = max(m12.degree(), m13.degree(), m23.degree())
    bounds = {"u": 3 * deg, "v": 3 * deg}

    def parts(u, v):
        return (embed(m12.at(u - v), dims, (0, 1)), embed(m13.at(u), dims, (0, 2)),
                embed(m23.at(v), dims, (1, 2)))

    def lhs(u, v):
        a, b, c = parts(u, v)
        return a @ b @ c

    def rhs(u, v):
        a, b, c = parts(u, v)
        return c @ b @ a

    params = {"dims": dims}
    if isinstance(R12, RObject):
        params["R"] = R12.label()
    return run_identity(name, params, lhs, rhs, bounds, grid_scale)


def check_constant_rrr(A12: QMat, n: int, name="rrr-constant"):
    """A12 A13 A23 = A23 A13 A12 for a constant two-site operator."""
    dims = (n, n, n)
    a = embed(A12, dims, (0, 1))
    b = embed(A12, dims, (0, 2))
    c = embed(A12, dims, (1, 2))
    return run_identity(name, {"n": n}, lambda: a @ b @ c, lambda: c @ b @ a, {}, grid=[()])


# ------------------------------------------------------------ RLL

LAYOUTS = ("vector_aux", "spinor_aux", "spinor_aux_check")


def check_rll(R: RObject, L: SparsePolyMatrix, layout: str, d: int, n: int, grid_scale=1):
    """RLL relations with L(u) = u + G on V (x) S (vector index major).

    vector_aux:        R12(u) L1(u+v) L2(v) = L2(v) L1(u+v) R12(u) on V1 V2 S
    spinor_aux:        R(u) L1(u+v) L2(v) = L2(v) L1(u+v) R(u) on V S1 S2
    spinor_aux_check:  Rc(u) L1(u+v) L2(v) = L1(v) L2(u+v) Rc(u) on V S1 S2
    In the spinor layouts the products run over the vector index.
    """
    if layout not in LAYOUTS:
        raise ValueError(f"layout must be one of {LAYOUTS}")
    if L.shape != (d * n, d * n):
        raise ValueError("L does not act on V (x) S")
    if layout == "vector_aux":
        if R.matrix.shape != (d * d, d * d):
            raise ValueError("vector_aux needs a vector-vector R")
        Rm = (check_of(R) if R.checked else R).matrix
        dims, rlegs, l1, l2 = (d, d, n), (0, 1), (0, 2), (1, 2)
    else:
        if R.matrix.shape != (n * n, n * n):
            raise ValueError("spinor layouts need a spinor-spinor R")
        want_checked = layout == "spinor_aux_check"
        Rm = (R if R.checked == want_checked else check_of(R)).matrix
        dims, rlegs, l1, l2 = (d, n, n), (1, 2), (0, 1), (0, 2)
    bounds = {"u": Rm.degree() + 2, "v": 2}

    def pieces(u, v):
        return (embed(Rm.at(u), dims, rlegs), embed(L.at(u + v), dims, l1), embed(L.at(v), dims, l2),
                embed(L.at(v), dims, l1), embed(L.at(u + v), dims, l2))

    def lhs(u, v):
        r, a1, b2, _, _ = pieces(u, v)
        return r @ a1 @ b2

    def rhs(u, v):
        r, a1, b2, b1, a2 = pieces(u, v)
        if layout == "spinor_aux_check":
            return b1 @ a2 @ r
        return b2 @ a1 @ r

    return run_identity(f"rll:{layout}", {"R": R.label(), "d": d}, lhs, rhs, bounds, grid_scale)


# ------------------------------------------------------------ inversion

def check_inversion(L: SparsePolyMatrix, beta, d: int, n: int):
    """L(u+beta+1/2) L(-u-1/2) = -u(u+beta+1) I."""
    beta = Fraction(beta)
    eye = QMat.identity(d * n)

    def lhs(u):
        return L.at(u + beta + HALF) @ L.at(-u - HALF)

    def rhs(u):
        return eye.scale(-u * (u + beta + 1))

    return run_identity("inversion", {"beta": beta, "d": d}, lhs, rhs, {"u": 2})


def solve_inversion_beta(L: SparsePolyMatrix, d: int, n: int):
    """beta making the non-scalar part of L(u+beta+1/2)L(-u-1/2) vanish, or None.

    With L(x) = x + G the product is xy + (x+y) G + G G and x+y = beta, so the
    condition is linear: G G + beta G = c I."""
    G = L.const_part()
    GG = G @ G
    beta = None
    for i, j, g in G.items():
        if i != j:
            beta = -(GG[i, j] / g)
            break
    if beta is None:
        return None
    X = GG + G.scale(beta)
    c = X[0, 0]
    if X != QMat.identity(d * n).scale(c) or beta.im:
        return None
    # the scalar must also match -u(u+beta+1): c = beta/2 + 1/4
    if c != GR(beta.re / 2 + Fraction(1, 4)):
        return None
    return beta.re


# ------------------------------------------------------------ fusion

def check_llr_fusion(rep: CliffordRep, beta, grid_scale=1):
    """L(u+beta-1/2) gamma_{b0} L(-1/2-u) = -R^{a0 a1}_{b0 b1}(u) gamma_{a0}, all free indices."""
    beta = Fraction(beta)
    d, n = rep.d, rep.n
    L = L_operator(rep)
    R = fundamental_R(1, d).matrix
    Vd = QMat.identity(d)
    gam = [Vd.kron(g) for g in rep.gammas]

    def block(b0, X):
        return QMat.basis_unit(d, b0, b0).kron(X)

    def lhs(u):
        x, y = L.at(u + beta - HALF), L.at(-u - HALF)
        acc = QMat.zeros(d * d * n)
        for b0 in range(d):
            acc = acc + block(b0, x @ gam[b0] @ y)
        return acc

    def rhs(u):
        Ru = R.at(u)
        acc = QMat.zeros(d * d * n)
        for b0 in range(d):
            ent = QMat.zeros(d * n)
            for a0 in range(d):
                for a1 in range(d):
                    for b1 in range(d):
                        c = Ru[a0 * d + a1, b0 * d + b1]
                        if c:
                            ent = ent + QMat.basis_unit(d, a1, b1).kron(rep.gammas[a0]).scale(-c)
            acc = acc + block(b0, ent)
        return acc

    return run_identity("llr", {"beta": beta, "d": d}, lhs, rhs, {"u": 2}, grid_scale)


def llr_trace_slice(rep: CliffordRep, beta):
    """Contract b0 with a1 on both sides of the LLR identity (consistency slice)."""
    beta = Fraction(beta)
    d, n = rep.d, rep.n
    L = L_operator(rep)
    R = fundamental_R(1, d).matrix
    Vd = QMat.identity(d)

    def lhs(u):
        x, y = L.at(u + beta - HALF), L.at(-u - HALF)
        acc = QMat.zeros(n, d * n)
        for b0 in range(d):
            prod = x @ Vd.kron(rep.gammas[b0]) @ y
            acc = acc + prod.submatrix(range(b0 * n, (b0 + 1) * n), range(d * n))
        return acc

    def rhs(u):
        Ru = R.at(u)
        acc = QMat.zeros(n, d * n)
        for b0 in range(d):
            for a0 in range(d):
                for b1 in range(d):
                    c = Ru[a0 * d + b0, b0 * d + b1]
                    if c:
                        row = QMat.from_entries((1, d), {(0, b1): 1})
                        acc = acc + row.kron(rep.gammas[a0]).scale(-c)
        return acc

    return run_identity("llr-slice", {"beta": beta, "d": d}, lhs, rhs, {"u": 2})


def check_monodromy_fusion(rep: CliffordRep, N: int, beta, grid_scale=1):
    """T(u+beta-1/2) gamma_{b0} T~(-u-1/2) = (-1)^N gamma_{a0} T^{a0}_{b0}(u).

    T~ is the reversed product of L factors; by the inversion relation it equals
    (-u(u+beta+1))^N T^{-1}(u+beta+1/2), so the printed inverse form holds after
    dividing by (u(u+beta+1))^N.  The returned report records that scalar."""
    from .chain import spinor_monodromy, spinor_reversed_monodromy, vector_monodromy

    if N > 3:
        raise ValueError("N <= 3 (resource guard)")
    beta = Fraction(beta)
    d, n = rep.d, rep.n
    T = spinor_monodromy(d, N, "L_chain").matrix
    Tt = spinor_reversed_monodromy(d, N).matrix
    VV = vector_monodromy(d, N).matrix
    q = d ** N
    eye_q = QMat.identity(q)
    gam = [g.kron(eye_q) for g in rep.gammas]
    sign = (-1) ** N

    def lhs(u):
        x, y = T.at(u + beta - HALF), Tt.at(-u - HALF)
        acc = QMat.zeros(d * n * q)
        for b0 in range(d):
            acc = acc + QMat.basis_unit(d, b0, b0).kron(x @ gam[b0] @ y)
        return acc

    def rhs(u):
        W = VV.at(u)
        acc = QMat.zeros(d * n * q)
        for b0 in range(d):
            blk = QMat.zeros(n * q)
            for a0 in range(d):
                sub = W.submatrix(range(a0 * q, (a0 + 1) * q), range(b0 * q, (b0 + 1) * q))
                if not sub.is_zero():
                    blk = blk + rep.gammas[a0].kron(sub)
            acc = acc + QMat.basis_unit(d, b0, b0).kron(blk.scale(sign))
        return acc

    rep_ = run_identity("monodromy-fusion", {"N": N, "beta": beta, "d": d}, lhs, rhs, {"u": 2 * N}, grid_scale)
    rep_.extra["inverse_form_scalar"] = f"(u(u+{beta}+1))^{N}"
    return rep_


def check_inverse_monodromy(rep: CliffordRep, N: int, beta):
    """T(u+beta+1/2) T~(-u-1/2) = (-u(u+beta+1))^N I."""
    from .chain import spinor_monodromy, spinor_reversed_monodromy

    beta = Fraction(beta)
    T = spinor_monodromy(rep.d, N, "L_chain").matrix
    Tt = spinor_reversed_monodromy(rep.d, N).matrix
    eye = QMat.identity(T.rows)
    return run_identity("inverse-monodromy", {"N": N, "beta": beta, "d": rep.d},
                        lambda u: T.at(u + beta + HALF) @ Tt.at(-u - HALF),
                        lambda u: eye.scale((-u * (u + beta + 1)) ** N), {"u": 2 * N})


# ------------------------------------------------------------ so(4) trace identities

SECTOR_A = (0, 3)  # spinor basis labels 1, 4
SECTOR_B = (1, 2)  # spinor basis labels 2, 3


def _aux_block(M: QMat, n, q, a, b):
    return M.submatrix(range(a * q, (a + 1) * q), range(b * q, (b + 1) * q))


def trace_formula_blocks(T: QMat, Tbar: QMat, n, q) -> QMat:
    """1/2 [(T11+T44)(Tb22+Tb33) + (T22+T33)(Tb11+Tb44)] for 4x4 aux blocks."""
    def s(M, idx):
        acc = QMat.zeros(q)
        for k in idx:
            acc = acc + _aux_block(M, n, q, k, k)
        return acc

    return (s(T, SECTOR_A) @ s(Tbar, SECTOR_B) + s(T, SECTOR_B) @ s(Tbar, SECTOR_A)).scale(HALF)


def trace_formula_matrix(rep: CliffordRep, T: QMat, Tbar: QMat, q) -> QMat:
    """1/4 sum_a tr_0 (T gamma^a Tbar gamma_a)."""
    from .exact_core import partial_trace

    eye = QMat.identity(q)
    acc = QMat.zeros(rep.n * q)
    for g in rep.gammas:
        G = g.kron(eye)
        acc = acc + T @ G @ Tbar @ G
    return partial_trace(acc, (rep.n, q), 1).scale(Fraction(1, 4))


def fusion_trace_check(N: int, shift=Fraction(3, 2), form: str = "blocks", scalar=None,
                       points=None):
    """tr_0 TT(u) = c(u)^N * formula(T(u+1/2), T^{-1}(u+shift)) for d = 4.

    Without ``scalar`` the pointwise c(u)^N is solved and returned in ``extra``;
    with ``scalar`` (a map u -> c(u)) it is asserted."""
    from .chain import spinor_monodromy, transfer, vector_monodromy
    from .clifford import build_gammas

    if N > 2:
        raise ValueError("N <= 2 (resource guard)")
    rep = build_gammas(4)
    n, d = rep.n, 4
    q = d ** N
    T = spinor_monodromy(4, N, "L_chain").matrix
    t = transfer(vector_monodromy(4, N)).t
    shift = Fraction(shift)
    points = points or [Fraction(1, 3) + k for k in range(2 * N + 3)]
    solved = {}
    viol = None
    for u in points:
        Tu = T.at(u + HALF)
        Tbar = inverse(T.at(u + shift))
        F = trace_formula_blocks(Tu, Tbar, n, q) if form == "blocks" else trace_formula_matrix(rep, Tu, Tbar, q)
        lhs = t.at(u)
        if scalar is None:
            from .rmatrix import proportional_at
            c = proportional_at(lhs, F)
            solved[u] = c
            if c is None:
                viol = {"point": [str(u)], "reason": "not proportional"}
                break
        else:
            c = scalar(u)
            rhs = F.scale((c if isinstance(c, GR) else GR(c)) ** N)
            if lhs != rhs:
                i, j, a, b = _first_diff(lhs, rhs)
                viol = {"point": [str(u)], "row": i, "col": j, "lhs": str(a), "rhs": str(b)}
                break
    rep_ = IdentityReport(f"fusion-trace:{form}", {"N": N, "shift": shift}, [(u,) for u in points],
                          viol is None, {"u": "rational"}, viol)
    if scalar is None:
        rep_.extra["scalar"] = {str(k): str(v) for k, v in solved.items()}
        rep_.extra_solved = solved
    return rep_


def solve_then_assert_fusion_trace(shift=Fraction(3, 2), form="blocks"):
    """Solve c(u) pointwise at N=1, then assert tr TT = c(u)^2 formula at N=2."""
    r1 = fusion_trace_check(1, shift, form)
    if not r1.passed:
        return r1, None
    table = r1.extra_solved
    pts = list(table)
    r2 = fusion_trace_check(2, shift, form, scalar=lambda u: table[u], points=pts)
    return r1, r2


def trace_scalar_is(u_scalar, shift=Fraction(3, 2)):
    """Whether the N=1 solved scalar equals the given function at every point."""
    r1 = fusion_trace_check(1, shift)
    return r1.passed and all(v == GR(u_scalar(u)) for u, v in r1.extra_solved.items())


# ------------------------------------------------------------ generator / inversion cross-check

def beta_agreement(rep: CliffordRep):
    """(beta from the inversion relation, beta from the generator constraint)."""
    from .clifford import solve_constraint_beta

    L = L_operator(rep)
    return solve_inversion_beta(L, rep.d, rep.n), solve_constraint_beta(generator_set(rep))
