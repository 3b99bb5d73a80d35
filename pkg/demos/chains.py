"""
Periodic chains
===============

Monodromies, transfer matrices and trace fusion on short chains.  Small N
keeps everything exact and quick.
"""
from fractions import Fraction

from artifact import chain as ch

for N in (1, 2):
    m = ch.vector_monodromy(3, N)
    t = ch.transfer(m)
    print(f"so(3) vector chain N={N}: transfer is {t.t.rows}x{t.t.rows}, degree {t.t.degree()},",
          "commuting:", ch.check_commuting_family(t).status)

# the spinor R-chain of so(4) keeps the auxiliary block pattern {1,4} | {2,3}
m = ch.spinor_monodromy(4, 2, "R_chain", "minus")
print("\nso(4) R-chain auxiliary pattern equals the block pattern:",
      ch.aux_pattern(m) == ch.expected_pattern(4))

# vector transfer from spinor blocks; the shift 3/2 is what makes it work
for shift in (Fraction(3, 2), Fraction(1)):
    r = ch.fusion_trace_identity(4, 2, shift)
    print(f"trace fusion, N=2, shift {shift}: {r.status}")
