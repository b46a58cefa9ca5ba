"""
Checking m over small finite fields
===================================

Sweeping every slice of the tensor over F_p gives the minimal slice rank
mod p.  Any rational slice reduces to a slice mod p of no larger rank, so
this is evidence about m, never a proof of a lower bound.
"""

import time

import numpy as np

from tensordegen import kron, m_exhaustive_ff, make_cw_easy_tensor

Tc = make_cw_easy_tensor(2)
sq = kron(Tc, Tc)

rows = []
for p in (3, 5, 7):
    t0 = time.perf_counter()
    a, b = m_exhaustive_ff(Tc, p), m_exhaustive_ff(sq, p)
    rows.append((p, a, b, time.perf_counter() - t0))

table = np.array([r[:3] for r in rows])
print("p, m(T), m(T x T)")
print(table)
print("seconds:", [round(r[3], 2) for r in rows])
