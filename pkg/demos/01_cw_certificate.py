"""
An approximate decomposition of the CW tensor
=============================================

The CW tensor with q = 2 lives in a 4 x 4 x 4 space and has rank larger
than 4, yet four rank-one terms with coefficients in Q(e) approximate it
up to O(e).
"""

from tensordegen import cw_certificate, make_cw_tensor, verify_decomposition
from tensordegen.degen import certificate_tensor
from tensordegen.scalar import format_scalar

q = 2
T = make_cw_tensor(q)
print("T:", T.dims, "with", T.nnz, "nonzero entries")

cert = cw_certificate(q)
for s, (a, b, c) in enumerate(cert.terms):
    print(f"term {s}:", [format_scalar(x) for x in a], "x", [format_scalar(x) for x in b],
          "x", [format_scalar(x) for x in c])

# the sum of the terms, expanded as a tensor over Q(e)
S = certificate_tensor(cert)
print("a few entries of the sum:")
for key in [(0, 0, 3), (1, 1, 0), (0, 0, 0)]:
    print("  ", key, format_scalar(S[key]))

rep = verify_decomposition(cert, T)
print("valid:", rep.valid, " terms:", cert.r, " error vanishes to order", rep.min_error_valuation)

# the same check for larger q
for q in range(1, 7):
    rep = verify_decomposition(cw_certificate(q), make_cw_tensor(q))
    print(f"q={q}: r={q + 2} valid={rep.valid}")
