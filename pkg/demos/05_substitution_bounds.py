"""
Lower bounds by substitution
============================

Border rank is at least n - 1 + m, where m is the minimum rank of a
slice.  For the easy CW tensor m is known exactly, and Kronecker powers
multiply it, which gives exact lower bounds for the powers.
"""

from tensordegen import substitution_bound
from tensordegen.expr import CWEasy, Pow

for q in range(2, 7):
    rep = substitution_bound(CWEasy(q))
    print(f"cweasy q={q}: lower {rep.lower}")

for n in (1, 2, 3):
    rep = substitution_bound(Pow(CWEasy(2), n))
    print(f"power n={n}: lower {rep.lower}  (3^n + 2^n - 1 = {3 ** n + 2 ** n - 1})  m={rep.m}")

# every step of the derivation carries a grade and a justification
rep = substitution_bound(Pow(CWEasy(2), 2))
for nd in rep.nodes():
    print(f"  {nd.rule:<14} {nd.grade:<8} {nd.value}")
