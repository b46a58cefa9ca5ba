"""Compiled kernel for exhaustive slice-rank sweeps over GF(p)."""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def sweep_min_rank(A, n1, n2, n3, p, lead, start, stop, inv):
    """Min rank of ``sum u_i A_i`` over u with ``u[:lead] = 0, u[lead] = 1``.

    The free coordinates ``u[lead+1:]`` run through base-p digits of
    ``start..stop-1`` (last coordinate least significant).
    """
    S = np.empty((n2, n3), np.int64)
    u = np.zeros(n1, np.int64)
    best = min(n2, n3) + 1
    free = n1 - 1 - lead
    for idx in range(start, stop):
        u[:] = 0
        u[lead] = 1
        x = idx
        for t in range(free):
            u[n1 - 1 - t] = x % p
            x //= p
        for j in range(n2):
            for k in range(n3):
                S[j, k] = 0
        for i in range(n1):
            ui = u[i]
            if ui != 0:
                for j in range(n2):
                    for k in range(n3):
                        S[j, k] += ui * A[i, j * n3 + k]
        for j in range(n2):
            for k in range(n3):
                S[j, k] %= p
        rank = 0
        for col in range(n3):
            piv = -1
            for r in range(rank, n2):
                if S[r, col] != 0:
                    piv = r
                    break
            if piv < 0:
                continue
            if piv != rank:
                for k in range(col, n3):
                    tmp = S[rank, k]
                    S[rank, k] = S[piv, k]
                    S[piv, k] = tmp
            iv = inv[S[rank, col]]
            for r in range(rank + 1, n2):
                f = S[r, col]
                if f != 0:
                    f = (f * iv) % p
                    for k in range(col, n3):
                        S[r, k] = (S[r, k] - f * S[rank, k]) % p
            rank += 1
            if rank == n2:
                break
        if rank < best:
            best = rank
            if best == 0:
                return 0
    return best
