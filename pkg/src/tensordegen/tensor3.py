"""Sparse order-3 tensors and small dense matrices over Q or Q(e).

Index conventions
-----------------
* A tensor ``T`` of format ``n1 x n2 x n3`` stores ``T[i, j, k]`` sparsely;
  iteration is lexicographic in ``(i, j, k)``.
* A restriction operator ``(F1, F2, F3)`` has ``F_m`` of shape
  ``n'_m x n_m`` and maps ``T`` to
  ``T'[a, b, c] = sum F1[a, i] F2[b, j] F3[c, k] T[i, j, k]``.
* Kronecker products pair indices row-major: ``(i, i') -> i * n' + i'`` in
  every factor, for tensors and vectors alike.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Iterable, Optional, Sequence

from .errors import DimensionMismatch, DimensionOverflow, InvalidParameter, SingularMatrix
from .scalar import EPS_ONE, EPS_ZERO, EpsScalar, eval_at_zero, to_eps, valuation

Q = "Q"
QEPS = "Q(eps)"

MAX_ENTRIES = 10**6


def _field_of(values: Iterable) -> str:
    for v in values:
        if isinstance(v, EpsScalar):
            return QEPS
    return Q


def _convert(v, field: str):
    if field == QEPS:
        return to_eps(v)
    if isinstance(v, EpsScalar):
        return v.to_rational()
    return Fraction(v)


def join_field(*fields: str) -> str:
    return QEPS if QEPS in fields else Q


def _zero(field):
    return EPS_ZERO if field == QEPS else Fraction(0)


def _one(field):
    return EPS_ONE if field == QEPS else Fraction(1)


class Matrix:
    """Dense matrix of exact scalars (a linear map ``k^cols -> k^rows``)."""

    __slots__ = ("rows", "cols", "field", "entries")

    def __init__(self, entries: Sequence[Sequence], field: Optional[str] = None, cols: Optional[int] = None):
        rows = [list(r) for r in entries]
        if cols is None:
            if not rows:
                raise DimensionMismatch("empty matrix needs an explicit column count")
            cols = len(rows[0])
        if any(len(r) != cols for r in rows):
            raise DimensionMismatch("ragged matrix")
        if field is None:
            field = _field_of(v for r in rows for v in r)
        self.rows = len(rows)
        self.cols = cols
        self.field = field
        self.entries = tuple(tuple(_convert(v, field) for v in r) for r in rows)

    # -- constructors -----------------------------------------------------
    @classmethod
    def identity(cls, n: int, field: str = Q) -> "Matrix":
        z, o = _zero(field), _one(field)
        return cls([[o if i == j else z for j in range(n)] for i in range(n)], field)

    @classmethod
    def zeros(cls, rows: int, cols: int, field: str = Q) -> "Matrix":
        z = _zero(field)
        return cls([[z] * cols for _ in range(rows)], field, cols=cols)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], field: Optional[str] = None) -> "Matrix":
        if not columns:
            raise DimensionMismatch("no columns")
        n = len(columns[0])
        return cls([[c[i] for c in columns] for i in range(n)], field)

    @classmethod
    def diagonal(cls, diag: Sequence, field: Optional[str] = None) -> "Matrix":
        field = field or _field_of(diag)
        z = _zero(field)
        n = len(diag)
        return cls([[diag[i] if i == j else z for j in range(n)] for i in range(n)], field)

    # -- basic protocol ---------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, idx):
        i, j = idx
        return self.entries[i][j]

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    def __hash__(self):
        return hash((self.shape, self.entries))

    def __repr__(self):
        body = "; ".join(", ".join(str(v) for v in r) for r in self.entries)
        return f"Matrix[{self.rows}x{self.cols}, {self.field}]({body})"

    def row(self, i: int) -> tuple:
        return self.entries[i]

    def column(self, j: int) -> tuple:
        return tuple(r[j] for r in self.entries)

    def promote(self) -> "Matrix":
        return self if self.field == QEPS else Matrix(self.entries, QEPS, cols=self.cols)

    @property
    def T(self) -> "Matrix":
        return Matrix([self.column(j) for j in range(self.cols)], self.field, cols=self.rows)

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            if self.cols != other.rows:
                raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
            field = join_field(self.field, other.field)
            z = _zero(field)
            ocols = [other.column(j) for j in range(other.cols)]
            out = []
            for r in self.entries:
                nz = [(k, a) for k, a in enumerate(r) if a]
                row = []
                for c in ocols:
                    acc = z
                    for k, a in nz:
                        b = c[k]
                        if b:
                            acc = acc + a * b
                    row.append(acc)
                out.append(row)
            return Matrix(out, field, cols=other.cols)
        return self.apply(other)

    def apply(self, vec: Sequence) -> tuple:
        if len(vec) != self.cols:
            raise DimensionMismatch(f"vector of length {len(vec)} for {self.shape} matrix")
        field = join_field(self.field, _field_of(vec))
        z = _zero(field)
        out = []
        for r in self.entries:
            acc = z
            for a, b in zip(r, vec):
                if a and b:
                    acc = acc + a * b
            out.append(_convert(acc, field))
        return tuple(out)

    def __add__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise DimensionMismatch("shape mismatch in addition")
        return Matrix(
            [[a + b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)],
            join_field(self.field, other.field),
            cols=self.cols,
        )

    def __sub__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise DimensionMismatch("shape mismatch in subtraction")
        return Matrix(
            [[a - b for a, b in zip(r, s)] for r, s in zip(self.entries, other.entries)],
            join_field(self.field, other.field),
            cols=self.cols,
        )

    def scale(self, s) -> "Matrix":
        field = join_field(self.field, _field_of([s]))
        return Matrix([[a * s for a in r] for r in self.entries], field, cols=self.cols)

    # -- e-specific -------------------------------------------------------
    def eval_at_zero(self) -> "Matrix":
        return Matrix([[eval_at_zero(a) for a in r] for r in self.entries], Q, cols=self.cols)

    def min_valuation(self):
        return min((valuation(a) for r in self.entries for a in r), default=float("inf"))

    def is_identity_mod_eps(self) -> bool:
        """True iff the matrix is ``id + O(e)``."""
        if self.rows != self.cols:
            return False
        for i, r in enumerate(self.entries):
            for j, a in enumerate(r):
                d = a - 1 if i == j else a
                if valuation(d) < 1:
                    return False
        return True

    # -- linear algebra ---------------------------------------------------
    def rank(self) -> int:
        return matrix_rank(self)

    def inverse(self) -> "Matrix":
        """Exact Gauss-Jordan inverse; raises SingularMatrix."""
        if self.rows != self.cols:
            raise DimensionMismatch("only square matrices are invertible")
        n = self.rows
        field = self.field
        z, o = _zero(field), _one(field)
        a = [list(r) + [o if i == j else z for j in range(n)] for i, r in enumerate(self.entries)]
        for col in range(n):
            piv = _choose_pivot(a, col, col, field)
            if piv is None:
                raise SingularMatrix("matrix is singular")
            a[col], a[piv] = a[piv], a[col]
            p = a[col][col]
            a[col] = [x / p for x in a[col]]
            for i in range(n):
                if i != col and a[i][col]:
                    f = a[i][col]
                    a[i] = [x - f * y if y else x for x, y in zip(a[i], a[col])]
        return Matrix([r[n:] for r in a], field, cols=n)

    def det(self):
        if self.rows != self.cols:
            raise DimensionMismatch("determinant of a non-square matrix")
        field = self.field
        a = [list(r) for r in self.entries]
        n = self.rows
        d = _one(field)
        for col in range(n):
            piv = _choose_pivot(a, col, col, field)
            if piv is None:
                return _zero(field)
            if piv != col:
                a[col], a[piv] = a[piv], a[col]
                d = -d
            p = a[col][col]
            d = d * p
            for i in range(col + 1, n):
                if a[i][col]:
                    f = a[i][col] / p
                    a[i] = [x - f * y if y else x for x, y in zip(a[i], a[col])]
        return d

    def is_invertible(self) -> bool:
        return self.rows == self.cols and matrix_rank(self) == self.rows


def _choose_pivot(a, col, start, field):
    best = None
    best_key = None
    for i in range(start, len(a)):
        x = a[i][col]
        if x:
            if field != QEPS:
                return i
            # prefer simple pivots to keep intermediate expressions small
            key = len(x.num) + len(x.den)
            if best is None or key < best_key:
                best, best_key = i, key
    return best


def _bareiss_rank(rows: list[list[int]]) -> int:
    a = [r[:] for r in rows if any(r)]
    if not a:
        return 0
    m = len(a[0])
    rank = 0
    prev = 1
    for col in range(m):
        piv = None
        for i in range(rank, len(a)):
            if a[i][col]:
                piv = i
                break
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        p = a[rank][col]
        for i in range(rank + 1, len(a)):
            x = a[i][col]
            ri = a[i]
            rr = a[rank]
            a[i] = [(p * ri[j] - x * rr[j]) // prev for j in range(m)]
        prev = p
        rank += 1
        if rank == len(a):
            break
    return rank


def _clear_denominators(row: Sequence[Fraction]) -> list[int]:
    den = 1
    for x in row:
        d = Fraction(x).denominator
        if d != 1:
            den = den * d // _gcd(den, d)
    return [int(Fraction(x) * den) for x in row]


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


def _eps_rank(rows: list[list[EpsScalar]]) -> int:
    a = [list(r) for r in rows if any(r)]
    if not a:
        return 0
    m = len(a[0])
    rank = 0
    for col in range(m):
        piv = _choose_pivot(a, col, rank, QEPS)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        p = a[rank][col]
        for i in range(rank + 1, len(a)):
            x = a[i][col]
            if x:
                f = x / p
                a[i] = [u - f * v if v else u for u, v in zip(a[i], a[rank])]
        rank += 1
        if rank == len(a):
            break
    return rank


def sparse_rank(rows: Iterable[dict]) -> int:
    """Rank over Q of sparse rows given as ``{column: value}`` dicts."""
    pivots: dict[int, dict] = {}
    rank = 0
    for row in rows:
        r = {c: Fraction(v) for c, v in row.items() if v}
        while r:
            c = min(r)
            if c in pivots:
                prow = pivots[c]
                f = r[c]
                for cc, vv in prow.items():
                    nv = r.get(cc, 0) - f * vv
                    if nv:
                        r[cc] = nv
                    else:
                        r.pop(cc, None)
            else:
                lead = r[c]
                pivots[c] = {cc: vv / lead for cc, vv in r.items()}
                rank += 1
                break
    return rank


def matrix_rank(M: Matrix) -> int:
    """Exact rank: fraction-free elimination over Q, Gauss over Q(e)."""
    if M.field == QEPS:
        if all(v.is_constant() for r in M.entries for v in r):
            return _bareiss_rank([_clear_denominators([v.to_rational() for v in r]) for r in M.entries])
        return _eps_rank([list(r) for r in M.entries])
    return _bareiss_rank([_clear_denominators(r) for r in M.entries])


class Tensor3:
    """Sparse order-3 tensor with exact entries; immutable by convention."""

    __slots__ = ("dims", "field", "_entries")

    def __init__(self, dims: Sequence[int], entries=None, field: Optional[str] = None):
        dims = tuple(int(n) for n in dims)
        if len(dims) != 3 or any(n <= 0 for n in dims):
            raise DimensionMismatch(f"bad tensor format {dims}")
        items = dict(entries or {})
        if field is None:
            field = _field_of(items.values())
        clean = {}
        for idx, v in items.items():
            idx = tuple(int(i) for i in idx)
            if len(idx) != 3 or not all(0 <= i < n for i, n in zip(idx, dims)):
                raise DimensionMismatch(f"index {idx} outside format {dims}")
            v = _convert(v, field)
            if v:
                clean[idx] = v
        self.dims = dims
        self.field = field
        self._entries = dict(sorted(clean.items()))

    @classmethod
    def _trusted(cls, dims, entries: dict, field: str) -> "Tensor3":
        obj = object.__new__(cls)
        obj.dims = tuple(dims)
        obj.field = field
        obj._entries = dict(sorted(entries.items()))
        return obj

    @property
    def nnz(self) -> int:
        return len(self._entries)

    def items(self):
        return self._entries.items()

    def __getitem__(self, idx):
        return self._entries.get(tuple(idx), _zero(self.field))

    def __eq__(self, other):
        if not isinstance(other, Tensor3):
            return NotImplemented
        return self.dims == other.dims and self._entries == other._entries

    def __hash__(self):
        return hash((self.dims, tuple(self._entries.items())))

    def __repr__(self):
        return f"Tensor3(dims={self.dims}, field={self.field!r}, nnz={self.nnz})"

    def is_zero(self) -> bool:
        return not self._entries

    def promote(self) -> "Tensor3":
        if self.field == QEPS:
            return self
        return Tensor3._trusted(self.dims, {k: to_eps(v) for k, v in self._entries.items()}, QEPS)

    def eval_at_zero(self) -> "Tensor3":
        out = {}
        for idx, v in self._entries.items():
            c = eval_at_zero(v)
            if c:
                out[idx] = c
        return Tensor3._trusted(self.dims, out, Q)

    def permute_modes(self, perm: Sequence[int]) -> "Tensor3":
        """Tensor whose mode ``m`` is mode ``perm[m]`` of ``self`` (0-based)."""
        if sorted(perm) != [0, 1, 2]:
            raise InvalidParameter(f"not a permutation: {perm}")
        dims = tuple(self.dims[p] for p in perm)
        out = {tuple(idx[p] for p in perm): v for idx, v in self._entries.items()}
        return Tensor3._trusted(dims, out, self.field)

    def __sub__(self, other: "Tensor3") -> "Tensor3":
        if self.dims != other.dims:
            raise DimensionMismatch("format mismatch")
        field = join_field(self.field, other.field)
        out = {k: _convert(v, field) for k, v in self._entries.items()}
        for k, v in other._entries.items():
            nv = out.get(k, _zero(field)) - v
            if nv:
                out[k] = _convert(nv, field)
            else:
                out.pop(k, None)
        return Tensor3._trusted(self.dims, out, field)


@dataclass(frozen=True)
class RestrictionOperator:
    """Factor-wise linear maps ``(F1, F2, F3)``."""

    f1: Matrix
    f2: Matrix
    f3: Matrix

    @property
    def maps(self) -> tuple[Matrix, Matrix, Matrix]:
        return (self.f1, self.f2, self.f3)

    @property
    def field(self) -> str:
        return join_field(*(f.field for f in self.maps))

    @property
    def source_dims(self) -> tuple[int, int, int]:
        return tuple(f.cols for f in self.maps)

    @property
    def target_dims(self) -> tuple[int, int, int]:
        return tuple(f.rows for f in self.maps)

    @classmethod
    def identity(cls, dims: Sequence[int], field: str = Q) -> "RestrictionOperator":
        return cls(*(Matrix.identity(n, field) for n in dims))

    @classmethod
    def uniform(cls, f: Matrix) -> "RestrictionOperator":
        return cls(f, f, f)


def compose(op2: RestrictionOperator, op1: RestrictionOperator) -> RestrictionOperator:
    """The operator applying ``op1`` first, then ``op2``."""
    return RestrictionOperator(*(b @ a for a, b in zip(op1.maps, op2.maps)))


# -- constructors ------------------------------------------------------------

def diag_tensor(n: int) -> Tensor3:
    """The unit tensor of k^n: ``sum e_i x e_i x e_i``."""
    if n < 1:
        raise InvalidParameter("n must be positive")
    return Tensor3((n, n, n), {(i, i, i): 1 for i in range(n)}, Q)


def unit_tensor() -> Tensor3:
    return diag_tensor(1)


def unit_vector(n: int, i: int, field: str = Q) -> tuple:
    z, o = _zero(field), _one(field)
    return tuple(o if j == i else z for j in range(n))


# -- operations --------------------------------------------------------------

def contract(T: Tensor3, factor: int, covector: Sequence) -> Matrix:
    """Slice of ``T`` along ``factor`` (1, 2 or 3) weighted by ``covector``.

    The remaining two factors index rows and columns in their natural order.
    """
    if factor not in (1, 2, 3):
        raise InvalidParameter(f"factor must be 1, 2 or 3, got {factor}")
    m = factor - 1
    if len(covector) != T.dims[m]:
        raise DimensionMismatch(f"covector length {len(covector)} != dim {T.dims[m]}")
    rest = [x for x in range(3) if x != m]
    rdim, cdim = T.dims[rest[0]], T.dims[rest[1]]
    field = join_field(T.field, _field_of(covector))
    z = _zero(field)
    out = [[z] * cdim for _ in range(rdim)]
    for idx, v in T.items():
        a = covector[idx[m]]
        if a:
            r, c = idx[rest[0]], idx[rest[1]]
            out[r][c] = out[r][c] + a * v
    return Matrix(out, field, cols=cdim)


def flattening_rows(T: Tensor3, mode: int) -> list[dict]:
    m = mode - 1
    rest = [x for x in range(3) if x != m]
    width = T.dims[rest[1]]
    rows: list[dict] = [dict() for _ in range(T.dims[m])]
    for idx, v in T.items():
        rows[idx[m]][idx[rest[0]] * width + idx[rest[1]]] = v
    return rows


def flattening_rank(T: Tensor3, mode: int) -> int:
    """Rank of the mode-``mode`` unfolding (mode index vs. the other two)."""
    if mode not in (1, 2, 3):
        raise InvalidParameter(f"mode must be 1, 2 or 3, got {mode}")
    rows = flattening_rows(T, mode)
    if T.field == QEPS and not all(v.is_constant() for _, v in T.items()):
        m = mode - 1
        rest = [x for x in range(3) if x != m]
        width = T.dims[rest[0]] * T.dims[rest[1]]
        dense = [[r.get(c, EPS_ZERO) for c in range(width)] for r in rows]
        return _eps_rank(dense)
    if T.field == QEPS:
        rows = [{c: v.to_rational() for c, v in r.items()} for r in rows]
    return sparse_rank(rows)


def is_concise(T: Tensor3) -> bool:
    return all(flattening_rank(T, m) == T.dims[m - 1] for m in (1, 2, 3))


def kron(T: Tensor3, S: Tensor3, max_entries: int = MAX_ENTRIES) -> Tensor3:
    """Kronecker product with row-major index pairing in each factor."""
    if T.field != S.field:
        raise InvalidParameter("kron requires equal field tags; promote first")
    if T.nnz * S.nnz > max_entries:
        raise DimensionOverflow(f"kron would produce {T.nnz * S.nnz} entries (limit {max_entries})")
    d = S.dims
    dims = tuple(a * b for a, b in zip(T.dims, d))
    out = {}
    for (i, j, k), v in T.items():
        for (a, b, c), w in S.items():
            out[(i * d[0] + a, j * d[1] + b, k * d[2] + c)] = v * w
    return Tensor3._trusted(dims, out, T.field)


def kron_power(T: Tensor3, n: int, max_entries: int = MAX_ENTRIES) -> Tensor3:
    if n < 1:
        raise InvalidParameter("power must be at least 1")
    if T.nnz ** n > max_entries:
        raise DimensionOverflow(f"power would produce {T.nnz ** n} entries (limit {max_entries})")
    out = T
    for _ in range(n - 1):
        out = kron(out, T, max_entries)
    return out


def kron_vec(u: Sequence, v: Sequence) -> tuple:
    return tuple(a * b for a in u for b in v)


def apply_restriction(op: RestrictionOperator, T: Tensor3) -> Tensor3:
    """Exact image ``(F1 x F2 x F3) T``."""
    if op.source_dims != T.dims:
        raise DimensionMismatch(f"operator source {op.source_dims} != tensor format {T.dims}")
    field = join_field(op.field, T.field)
    cols = []
    for f in op.maps:
        cols.append([[(a, f.entries[a][i]) for a in range(f.rows) if f.entries[a][i]] for i in range(f.cols)])
    c1, c2, c3 = cols
    z = _zero(field)
    out: dict = {}
    for (i, j, k), v in T.items():
        for a, x in c1[i]:
            xv = x * v
            for b, y in c2[j]:
                xyv = xv * y
                for c, w in c3[k]:
                    key = (a, b, c)
                    out[key] = out.get(key, z) + xyv * w
    clean = {k: _convert(v, field) for k, v in out.items() if v}
    return Tensor3._trusted(op.target_dims, clean, field)


def _binding_candidates(n: int, max_attempts: int, seed: int):
    for i in range(n):
        yield unit_vector(n, i)
    yield tuple(Fraction(1) for _ in range(n))
    rng = random.Random(seed)
    produced = 0
    while produced < max_attempts:
        v = tuple(Fraction(rng.randint(-3, 3)) for _ in range(n))
        if any(v):
            produced += 1
            yield v


def find_binding_covectors(T: Tensor3, max_attempts: int = 200, seed: int = 0):
    """Search for covectors with full-rank contractions in factors 1 and 2.

    Tries basis covectors, then the all-ones covector, then ``max_attempts``
    seeded random covectors with entries in {-3..3}.  Returns ``(a1, a2)`` or
    ``None`` when no witness was found; ``None`` does not mean ``T`` is not
    binding.
    """
    n = T.dims[0]
    if T.dims != (n, n, n):
        raise InvalidParameter(f"binding needs an n x n x n tensor, got {T.dims}")
    if T.field != Q:
        raise InvalidParameter("binding search runs over Q only")
    found = {1: None, 2: None}
    for cand in _binding_candidates(n, max_attempts, seed):
        for factor in (1, 2):
            if found[factor] is None and matrix_rank(contract(T, factor, cand)) == n:
                found[factor] = cand
        if found[1] is not None and found[2] is not None:
            return found[1], found[2]
    return None


def restrict_vectors(op: RestrictionOperator, triples):
    """Push rank-one triples ``(v1, v2, v3)`` through a restriction operator."""
    return [tuple(f.apply(v) for f, v in zip(op.maps, t)) for t in triples]


def all_index_triples(dims):
    return product(range(dims[0]), range(dims[1]), range(dims[2]))
