"""Acceptance checks, shared by the CLI suite runner and the test-suite gate."""
from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from math import comb

import numpy as np

from . import chain, equivalence as eq, invariants as inv
from .clifford import L_operator, build_gammas, clifford_violations
from .exact_core import QMat, SparsePolyMatrix, SpectralPoly, swap_matrix
from .rmatrix import (fundamental_R, proportional_at, so8_structure, spinor_part, sw_expansion)
from .verifier import (beta_agreement, check_constant_rrr, check_inversion, check_llr_fusion,
                       check_monodromy_fusion, check_rll, check_rrr, solve_inversion_beta)


@dataclass
class Check:
    name: str
    passed: bool
    detail: dict = field(default_factory=dict)

    def to_json(self):
        return {"name": self.name, "status": "pass" if self.passed else "fail",
                "detail": _jsonable(self.detail)}


@dataclass
class Criterion:
    number: int
    title: str
    checks: list

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def failing(self):
        return [c.name for c in self.checks if not c.passed]

    def to_json(self):
        return {"criterion": self.number, "title": self.title,
                "status": "pass" if self.passed else "fail",
                "checks": [c.to_json() for c in self.checks]}


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in sorted(x.items(), key=lambda kv: str(kv[0]))}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (bool, int, str)) or x is None:
        return x
    if hasattr(x, "to_json"):
        return x.to_json()
    return str(x)


def _report(name, rep, **extra):
    d = {"first_violation": rep.first_violation, "grid_points": len(rep.grid)}
    d.update(extra)
    return Check(name, rep.passed, d)


@lru_cache(maxsize=None)
def _fixture(name):
    with resources.files("artifact").joinpath(f"data/{name}").open() as fh:
        return json.load(fh)


# ------------------------------------------------------------ 1-5: algebra and invariants

def criterion_1():
    checks = []
    for d in range(2, 9):
        bad = clifford_violations(build_gammas(d))
        checks.append(Check(f"clifford d={d}", not bad, {"violations": len(bad)}))
    return Criterion(1, "Clifford relations, d = 2..8", checks)


def _eig_counts(Z: QMat) -> Counter:
    ev = np.linalg.eigvalsh(Z.to_complex_array())
    return Counter(Fraction(int(round(2 * x)), 2) for x in ev)


def criterion_2():
    checks = []
    for d in (4, 6, 8):
        m = d // 2
        mult = inv.multiplicities(build_gammas(d))
        want = {Fraction(k): comb(2 * m, m + k) for k in range(-m, m + 1)}
        checks.append(Check(f"rank P_k d={d}", mult == want,
                            {"ranks": {str(k): v for k, v in mult.items()}}))
    for d in (3, 5, 7):
        m = d // 2
        rep = build_gammas(d)
        mult = inv.multiplicities(rep)
        direct = _eig_counts(inv.spinor_pair_space(rep).z)
        ok = sum(mult.values()) == 4 ** m and dict(direct) == {k: v for k, v in mult.items()}
        checks.append(Check(f"multiplicities d={d}", ok,
                            {"exact": {str(k): v for k, v in mult.items()},
                             "eigvalsh": {str(k): v for k, v in sorted(direct.items())}}))
    return Criterion(2, "z-spectrum multiplicities", checks)


def _wtilde(d):
    m = d // 2
    p = inv.zpoly([1])
    for k in range(m + 1):
        p = p * inv.zlinear(Fraction((-1) ** k * (2 * k + 1), 2))
    return p


def _z_at(p, Z):
    return inv.poly_at_matrix(p, Z)


def criterion_3():
    checks = []
    for d in range(3, 9):
        Z = inv.spinor_pair_space(build_gammas(d)).z
        checks.append(Check(f"W_{d}(z) = 0", _z_at(inv.full_tower_poly(d), Z).is_zero()))
    for d in (3, 5, 7):
        Z = inv.spinor_pair_space(build_gammas(d)).z
        checks.append(Check(f"Wt_{d}(z) = 0", _z_at(_wtilde(d), Z).is_zero()))
    w4 = inv.zpoly([1])
    for r in _fixture("invariant_polys.json")["w4"]["roots"]:
        w4 = w4 * inv.zlinear(Fraction(r))
    i5 = inv.tower_polys(4, 5)[5]
    checks.append(Check("I_5(z,4) = z(z^2-1)(z^2-4)", i5 == w4,
                        {"I5": [str(c) for c in i5.coeffs], "w4": [str(c) for c in w4.coeffs]}))
    return Criterion(3, "characteristic polynomials annihilate z", checks)


def printed_invariant(k: int, d: int) -> SpectralPoly:
    """The closed form of I_k(z, d) from the fixture, specialized to d."""
    table = _fixture("invariant_polys.json")["invariants"][str(k)]
    coeffs = {}
    for power, dc in table.items():
        coeffs[int(power)] = sum(Fraction(c) * d ** i for i, c in enumerate(dc))
    top = max(coeffs)
    return inv.zpoly([coeffs.get(i, 0) for i in range(top + 1)])


def criterion_4():
    checks = []
    for d in range(3, 7):
        tw = inv.invariant_tower(build_gammas(d))
        bad = [k for k in range(d + 2) if tw.values[k] != tw.direct[k]]
        checks.append(Check(f"recurrence = contraction d={d}", not bad, {"mismatch_k": bad}))
    for d in (4, 6):
        tw = inv.invariant_tower(build_gammas(d), d + 1)
        Z = tw.values[1]
        for k in range(2, 8):
            lhs = _z_at(printed_invariant(k, d), Z)
            rhs = tw.direct[k] if k <= d + 1 else QMat.zeros(Z.shape[0])
            checks.append(Check(f"closed form I_{k} d={d}", lhs == rhs))
    return Criterion(4, "invariant tower", checks)


def criterion_5():
    checks = []
    for d in range(3, 7):
        rep = build_gammas(d)
        a = inv.permutation_operator(rep, "spectral")
        b = inv.permutation_operator(rep, "gamma_sum")
        checks.append(Check(f"spectral = gamma-sum d={d}", a == b and a == swap_matrix(rep.n)))
    for m in (1, 2, 3):
        rep = build_gammas(2 * m)
        for s in (1, -1):
            r = inv.symmetric_rank(rep, s)
            checks.append(Check(f"rank (1{'+' if s > 0 else '-'}P)/2 m={m}", r == inv.dsig_formula(m, s),
                                {"rank": r, "formula": inv.dsig_formula(m, s)}))
    return Criterion(5, "permutation operator", checks)


# ------------------------------------------------------------ 6: spinorial R tables

TABLES = {"so4_minus": (4, "minus"), "so4_plus": (4, "plus"), "so5": (5, "full"),
          "so6_minus": (6, "minus"), "so6_plus": (6, "plus")}


def criterion_6(tables=None):
    checks = []
    R3 = spinor_part(build_gammas(3), "full", False).matrix
    target = SparsePolyMatrix.linear(QMat.identity(4).scale(2), swap_matrix(2))
    checks.append(Check("so(3) = 2uI + P", R3 == target))
    checks.append(Check("so(3) table", R3 == eq.table_matrix(eq.load_table("so3"))))
    for name, (d, chir) in TABLES.items():
        table = (tables or {}).get(name) or eq.load_table(name)
        m = eq.table_basis_match(spinor_part(build_gammas(d), chir, False), table)
        checks.append(Check(f"table {name}", m.found, m.to_json()))
    s8 = so8_structure()
    ok = (s8["plus"]["degree"], s8["plus"]["tensor_count"]) == (1, 2) and \
        (s8["minus"]["degree"], s8["minus"]["tensor_count"]) == (2, 3)
    checks.append(Check("so(8) degree and tensor count", ok, s8))
    return Criterion(6, "spinorial R construction", checks)


# ------------------------------------------------------------ 7-8: identities

def _parts(d):
    return ["full"] if d % 2 else ["minus", "plus"]


def criterion_7(include_so8_rrr=False, grid_scale=1):
    checks = []
    for n in (3, 4, 5, 6):
        checks.append(_report(f"RRR fundamental so({n})", check_rrr(fundamental_R(1, n), grid_scale=grid_scale)))
    for n in (2, 4):
        checks.append(_report(f"RRR fundamental sp({n})", check_rrr(fundamental_R(-1, n), grid_scale=grid_scale)))
    for d in (3, 4, 5, 6):
        rep = build_gammas(d)
        for c in _parts(d):
            checks.append(_report(f"RRR spinor so({d}) {c}", check_rrr(spinor_part(rep, c, False), grid_scale=grid_scale)))
    rep4 = build_gammas(4)
    Rm = spinor_part(rep4, "minus", False).matrix
    Rp = spinor_part(rep4, "plus", False).matrix
    for a, b in ((1, 1), (2, -3), (Fraction(1, 2), 5)):
        checks.append(_report(f"RRR so(4) mixture {a}*minus + {b}*plus",
                              check_rrr(Rm.scale(a) + Rp.scale(b), dims=(4, 4, 4), grid_scale=grid_scale)))
    g5 = rep4.chirality
    one = QMat.identity(16)
    checks.append(_report("RRR so(4) constant 1 + g5 g5", check_constant_rrr(one + g5.kron(g5), 4)))
    for d in (3, 4, 5, 6):
        rep = build_gammas(d)
        checks.append(_report(f"RLL vector aux so({d})", check_rll(fundamental_R(1, d), L_operator(rep), "vector_aux",
                                                         d, rep.n, grid_scale)))
    for d in (3, 4, 5, 6, 8):
        rep = build_gammas(d)
        L = L_operator(rep)
        for c in _parts(d):
            checks.append(_report(f"RLL spinor aux checked so({d}) {c}", check_rll(spinor_part(rep, c, True), L,
                                                                 "spinor_aux_check", d, rep.n, grid_scale)))
    if include_so8_rrr:
        rep = build_gammas(8)
        for c in _parts(8):
            checks.append(_report(f"RRR spinor so(8) {c}", check_rrr(spinor_part(rep, c, False))))
    return Criterion(7, "Yang-Baxter relations", checks)


def criterion_8():
    checks = []
    rep4 = build_gammas(4)
    L4 = L_operator(rep4)
    checks.append(_report("inversion so(4) beta=1", check_inversion(L4, 1, 4, rep4.n)))
    neg = check_inversion(L4, 0, 4, rep4.n)
    checks.append(Check("inversion so(4) beta=0 fails", not neg.passed, {"first_violation": neg.first_violation}))
    betas = {}
    for d in (3, 5, 6):
        rep = build_gammas(d)
        L = L_operator(rep)
        b = solve_inversion_beta(L, d, rep.n)
        betas[d] = b
        checks.append(_report(f"inversion so({d}) solved beta", check_inversion(L, b, d, rep.n), beta=str(b)))
    betas[4] = Fraction(1)
    for d in (3, 4, 5):
        checks.append(_report(f"LLR so({d})", check_llr_fusion(build_gammas(d), betas[d])))
    for d in (3, 4):
        for N in (1, 2):
            r = check_monodromy_fusion(build_gammas(d), N, betas[d])
            checks.append(_report(f"monodromy fusion so({d}) N={N}", r, **r.extra))
    for N in (1, 2):
        r = chain.fusion_trace_identity(4, N)
        checks.append(_report(f"trace fusion so(4) N={N}", r, **r.extra))
    r = chain.fusion_trace_identity(4, 2, shift=Fraction(1))
    checks.append(Check("trace fusion wrong shift fails", not r.passed, {"first_violation": r.first_violation}))
    return Criterion(8, "inversion and fusion", checks)


# ------------------------------------------------------------ 9-11

def criterion_9():
    checks = []
    p1 = eq.proposition_so4()
    d = p1.details
    checks.append(Check("so(4) minus: two sl(2) blocks under V",
                        d["site_sets"] == d["expected_sets"] and all(b["intertwiner_contains_identity"]
                                                                     for b in d["blocks"])
                        and d["minus_pattern_is_block"], {"blocks": d["blocks"]}))
    checks.append(Check("so(4) plus: RTT forces diagonal T", d["plus_pattern_is_diagonal"],
                        {k: d[k] for k in ("constant_offdiagonal_T_solves_rtt", "L_chain_obeys_rll_with_plus",
                                           "L_chain_offdiagonal_entries", "plus_R_chain_is_diagonal")}))
    p2 = eq.proposition_so6()
    checks.append(Check("so(6) both parts: two sl(4) blocks", p2.passed, p2.details))
    p3 = eq.proposition_so5()
    checks.append(Check("so(5) = sp(4) at 2u", p3.passed, p3.details))
    c = eq.sp2_so3_coincidence()
    checks.append(Check("sp(2)/(2(u+1)) = so(3) at u/4", c.passed, c.details))
    return Criterion(9, "propositions", checks)


def criterion_10():
    checks = []
    for d in (3, 4):
        for N in (1, 2, 3):
            ms = [chain.vector_monodromy(d, N), chain.spinor_monodromy(d, N, "L_chain"),
                  chain.spinor_monodromy(d, N, "R_chain", "full" if d % 2 else "minus")]
            for m in ms:
                r = chain.check_commuting_family(chain.transfer(m))
                checks.append(_report(f"[t(u),t(v)]=0 d={d} N={N} {m.aux} {m.kind}", r))
    for N in (1, 2, 3):
        m = chain.spinor_monodromy(4, N, "R_chain", "minus")
        checks.append(Check(f"zero pattern so(4) N={N}", chain.aux_pattern(m) == chain.expected_pattern(4)))
    for c in ("minus", "plus"):
        m = chain.spinor_monodromy(6, 1, "R_chain", c)
        checks.append(Check(f"zero pattern so(6) {c} N=1", chain.aux_pattern(m) == chain.expected_pattern(6)))
    return Criterion(10, "chain properties", checks)


def criterion_11():
    checks = []
    pts = (Fraction(1), Fraction(2), Fraction(1, 3))
    for d in (4, 6):
        rep = build_gammas(d)
        for parity, chir in (("even", "minus"), ("odd", "plus")):
            S = sw_expansion(rep, parity)
            R = spinor_part(rep, chir, True).matrix
            ratios = [proportional_at(S.at(u), R.at(u)) for u in pts]
            checks.append(Check(f"SW {parity} so({d})", all(r is not None and not r.is_zero() for r in ratios),
                                {"ratios": [str(r) for r in ratios]}))
    for d in (3, 4, 5, 6):
        b_inv, (b_con, _) = beta_agreement(build_gammas(d))
        checks.append(Check(f"beta agreement so({d})", b_inv is not None and b_inv == b_con,
                            {"inversion": str(b_inv), "constraint": str(b_con)}))
    return Criterion(11, "cross-checks", checks)


CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
            6: criterion_6, 7: criterion_7, 8: criterion_8, 9: criterion_9, 10: criterion_10,
            11: criterion_11}


def run(numbers=None, include_so8_rrr=False, grid_scale=1, tables=None):
    out = []
    for k in numbers or sorted(CRITERIA):
        if k == 7:
            out.append(criterion_7(include_so8_rrr, grid_scale))
        elif k == 6:
            out.append(criterion_6(tables))
        else:
            out.append(CRITERIA[k]())
    return out
