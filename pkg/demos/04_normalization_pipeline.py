"""
Normalizing a degeneration into a change of basis
=================================================

Start from the degeneration of k^(q+2) to the CW algebra given by the
approximate decomposition, transported to the unital map.  The pipeline
builds Q and P (both identity + O(e)) and returns one matrix S whose
action on products reproduces the target at e = 0.
"""

from tensordegen import cw_normalization_inputs, normalize_unital_degeneration, sandwich_report
from tensordegen.scalar import format_scalar

for q in (2, 3):
    A, phi, F, G, H = cw_normalization_inputs(q)
    res = normalize_unital_degeneration(A, phi, F, G, H)
    print(f"q={q}")
    print("  Q = id + O(e):", res.Q.is_identity_mod_eps())
    print("  P = id + O(e):", res.P.is_identity_mod_eps())
    for row in res.S.entries:
        print("  ", [format_scalar(x) for x in row])
    print("  sandwich check:", sandwich_report(A, phi.tensor, res.S).valid)
