"""
From the CW tensor to an algebra
================================

Contracting the tensor with a binding pair of covectors turns it into a
bilinear map with an identity.  For the CW tensor that map is the
multiplication of k[x1..xq] modulo x_i x_j, x_i^2 - x_j^2 and x_i^3.
"""

from tensordegen import (check_properties, cw_dictionary, find_identity, make_cw_algebra,
                         make_cw_tensor, structure_tensor, unitalize)
from tensordegen.tensor3 import RestrictionOperator, apply_restriction, unit_vector

q = 3
A = make_cw_algebra(q)
print("basis:", A.basis_names)
print("properties:", check_properties(A))
print("identity:", [str(c) for c in find_identity(A)])

x = {name: A.basis_vector(i) for i, name in enumerate(A.basis_names)}
print("x1 * x1 =", [str(c) for c in A.mul(x["x1"], x["x1"])])
print("x1 * x2 =", [str(c) for c in A.mul(x["x1"], x["x2"])])

# now recover the same algebra from the tensor
a0 = unit_vector(q + 2, 0)
res = unitalize(make_cw_tensor(q), a0, a0)
print("identity of the unitalized map:", [str(c) for c in res.identity])

D = cw_dictionary(q)  # moves the identity to the front
same = apply_restriction(RestrictionOperator(D, D, D), res.phi.tensor) == structure_tensor(A)
print("matches the structure tensor after relabeling:", same)
