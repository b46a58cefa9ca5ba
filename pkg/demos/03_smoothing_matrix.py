"""
A smoothing matrix for the CW algebra
=====================================

S below is a (q+2) x (q+2) matrix over Q(e).  Pulling componentwise
multiplication on k^(q+2) back along S and letting e -> 0 gives the CW
algebra multiplication.
"""

from tensordegen import cw_smoothing_check, cw_smoothing_matrix
from tensordegen.scalar import format_scalar

for q in (2, 3):
    S = cw_smoothing_matrix(q)
    print(f"S for q={q}:")
    for row in S.entries:
        print("   ", [format_scalar(x) for x in row])
    rep = cw_smoothing_check(q)
    print("   smooths to the CW algebra:", rep.valid)

print([(q, cw_smoothing_check(q).valid) for q in range(1, 6)])
