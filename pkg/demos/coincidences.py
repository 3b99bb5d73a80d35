"""
Low-rank coincidences
=====================

so(3) ~ sl(2), so(5) ~ sp(4) and so(4) ~ sl(2) + sl(2) show up as R-matrix
identities.  We look for them mechanically: solve for every G with
R_B(alpha u + gamma) G = G R_A(u) and ask whether the span contains g (x) g.
"""
from artifact import equivalence as eq
from artifact.clifford import build_gammas
from artifact.exact_core import QMat
from artifact.rmatrix import fundamental_R, spinor_part

# so(3) spinors are sl(2) doublets; the spectral parameter doubles
R3 = spinor_part(build_gammas(3), "full", False).matrix
for reparam in ((1, 0), (2, 0)):
    space = eq.intertwiner_space(R3, eq.sl_R(2), reparam)
    print(f"so(3) -> sl(2) at u -> {reparam[0]}u: dim {len(space)}, identity inside:",
          eq.in_span(QMat.identity(4), space))

# so(5) spinors against the symplectic vector R of sp(4)
R5 = spinor_part(build_gammas(5), "full", False).matrix
space = eq.intertwiner_space(R5, fundamental_R(-1, 4).matrix, (2, 0))
print(f"\nso(5) -> sp(4) at u -> 2u: dim {len(space)}, identity inside:",
      eq.in_span(QMat.identity(16), space))

# so(4) minus part splits into two sl(2) blocks after a basis shuffle
Rm = spinor_part(build_gammas(4), "minus", False)
bd = eq.block_decompose(Rm, eq.V_so4())
print("\nso(4) minus blocks:", bd.sizes())
for idx, M in bd.blocks:
    b = eq.identify_sl_block(idx, M)
    print("  indices", idx, "sl(%d)" % b.k, "reparam", [str(x) for x in b.reparam], "ok", b.ok)

# the plus part is constant, but an RTT algebra built on it is not diagonal
rep = eq.proposition_so4().details
print("\nso(4) plus: RTT pattern diagonal?", rep["plus_pattern_is_diagonal"])
print("  constant off-diagonal T solves RTT:", rep["constant_offdiagonal_T_solves_rtt"])
