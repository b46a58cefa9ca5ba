"""Finite-dimensional algebras given by structure constants.

``table[i][j]`` is the coordinate vector of ``b_i * b_j``.  The structure
tensor has entry ``(i, j, k) = table[i][j][k]``: factors 1 and 2 are the two
arguments, factor 3 the value.

Basis orders used by the constructors:

* ``T_CW(q)`` and ``T_cw(q)``: ``e0, e1_1, ..., e1_q[, e2]``.
* ``A_CW(q)``: ``1, x1, ..., xq, x1^2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Optional, Sequence

from .errors import InfiniteDimensional, InvalidParameter
from .tensor3 import Q, Matrix, RestrictionOperator, Tensor3, join_field, _field_of, _zero, _convert


class AlgebraStruct:
    """Structure constants of an algebra (not necessarily associative)."""

    def __init__(self, table, basis_names: Optional[Sequence[str]] = None):
        n = len(table)
        if n == 0:
            raise InvalidParameter("algebra of dimension 0")
        rows = []
        for i, row in enumerate(table):
            if len(row) != n:
                raise InvalidParameter(f"table row {i} has {len(row)} products, expected {n}")
            prods = []
            for j, vec in enumerate(row):
                if len(vec) != n:
                    raise InvalidParameter(f"product b{i}*b{j} has length {len(vec)}, expected {n}")
                prods.append(tuple(Fraction(x) for x in vec))
            rows.append(tuple(prods))
        self.dim = n
        self.table = tuple(rows)
        self.basis_names = list(basis_names) if basis_names is not None else [f"b{i}" for i in range(n)]
        if len(self.basis_names) != n:
            raise InvalidParameter("wrong number of basis names")
        self.flags = {"associative": None, "commutative": None, "unital": None}
        self._identity = False  # sentinel: not yet computed

    def __repr__(self):
        return f"AlgebraStruct(dim={self.dim}, basis={self.basis_names})"

    def __eq__(self, other):
        if not isinstance(other, AlgebraStruct):
            return NotImplemented
        return self.table == other.table

    def basis_vector(self, i: int) -> tuple:
        return tuple(Fraction(int(j == i)) for j in range(self.dim))

    def mul(self, x: Sequence, y: Sequence) -> tuple:
        """Product of two coordinate vectors; entries may live in Q(e)."""
        fld = join_field(_field_of(x), _field_of(y))
        out = [_zero(fld)] * self.dim
        for i, a in enumerate(x):
            if not a:
                continue
            for j, b in enumerate(y):
                if not b:
                    continue
                ab = a * b
                for k, c in enumerate(self.table[i][j]):
                    if c:
                        out[k] = out[k] + ab * c
        return tuple(_convert(v, fld) for v in out)

    @property
    def identity(self) -> Optional[tuple]:
        return find_identity(self)


@dataclass
class BilinearMap:
    """A bilinear map stored as its structure tensor in V* x V* x W."""

    tensor: Tensor3
    identity: Optional[tuple] = None
    input_names: Optional[list] = None
    output_names: Optional[list] = None

    def __call__(self, x: Sequence, y: Sequence) -> tuple:
        T = self.tensor
        fld = join_field(T.field, _field_of(x), _field_of(y))
        out = [_zero(fld)] * T.dims[2]
        for (i, j, k), v in T.items():
            if x[i] and y[j]:
                out[k] = out[k] + x[i] * y[j] * v
        return tuple(_convert(v, fld) for v in out)

    def is_unital_with(self, e: Sequence) -> bool:
        n = self.tensor.dims[0]
        if self.tensor.dims != (n, n, n):
            return False
        for j in range(n):
            b = tuple(Fraction(int(i == j)) for i in range(n))
            if self(e, b) != b or self(b, e) != b:
                return False
        return True


def _solve_unique(rows: list[list[Fraction]], rhs: list[Fraction]) -> Optional[list[Fraction]]:
    """Unique solution of an overdetermined exact system, or None."""
    nvar = len(rows[0]) if rows else 0
    a = [list(r) + [b] for r, b in zip(rows, rhs)]
    piv_cols = []
    r = 0
    for col in range(nvar):
        p = next((i for i in range(r, len(a)) if a[i][col]), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        lead = a[r][col]
        a[r] = [x / lead for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][col]:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        piv_cols.append(col)
        r += 1
    if any(row[-1] for row in a[r:]):
        return None
    if len(piv_cols) < nvar:
        return None
    sol = [Fraction(0)] * nvar
    for i, col in enumerate(piv_cols):
        sol[col] = a[i][-1]
    return sol


def find_identity(A: AlgebraStruct) -> Optional[tuple]:
    """Solve ``e * b_j = b_j = b_j * e`` for all j; None if no unique solution."""
    if A._identity is not False:
        return A._identity
    n = A.dim
    rows, rhs = [], []
    for j in range(n):
        for k in range(n):
            rows.append([A.table[i][j][k] for i in range(n)])
            rhs.append(Fraction(int(j == k)))
            rows.append([A.table[j][i][k] for i in range(n)])
            rhs.append(Fraction(int(j == k)))
    sol = _solve_unique(rows, rhs)
    A._identity = tuple(sol) if sol is not None else None
    return A._identity


def check_properties(A: AlgebraStruct) -> dict:
    """Exhaustive basis checks for associativity, commutativity and a unit."""
    n = A.dim
    basis = [A.basis_vector(i) for i in range(n)]
    A.flags["commutative"] = all(
        A.table[i][j] == A.table[j][i] for i in range(n) for j in range(i + 1, n))
    assoc = True
    for i, j, k in product(range(n), repeat=3):
        if A.mul(A.table[i][j], basis[k]) != A.mul(basis[i], A.table[j][k]):
            assoc = False
            break
    A.flags["associative"] = assoc
    A.flags["unital"] = find_identity(A) is not None
    return dict(A.flags)


def structure_tensor(A: AlgebraStruct) -> Tensor3:
    n = A.dim
    entries = {}
    for i in range(n):
        for j in range(n):
            for k, c in enumerate(A.table[i][j]):
                if c:
                    entries[(i, j, k)] = c
    return Tensor3((n, n, n), entries, Q)


def left_mult(A: AlgebraStruct, a: Sequence) -> Matrix:
    """Matrix of ``x -> a * x``; column j is ``a * b_j``."""
    fld = _field_of(a)
    cols = [A.mul(a, A.basis_vector(j)) for j in range(A.dim)]
    return Matrix.from_columns(cols, fld)


def right_mult(A: AlgebraStruct, a: Sequence) -> Matrix:
    """Matrix of ``x -> x * a``."""
    fld = _field_of(a)
    cols = [A.mul(A.basis_vector(j), a) for j in range(A.dim)]
    return Matrix.from_columns(cols, fld)


# -- named constructors ------------------------------------------------------

def _check_q(q):
    if not isinstance(q, int) or q < 1:
        raise InvalidParameter(f"q must be a positive integer, got {q!r}")


def make_diag_algebra(n: int) -> AlgebraStruct:
    """k^n with coordinate-wise multiplication."""
    if n < 1:
        raise InvalidParameter("n must be positive")
    table = [[[int(i == j == k) for k in range(n)] for j in range(n)] for i in range(n)]
    return AlgebraStruct(table, [f"p{i}" for i in range(n)])


def cw_algebra_names(q: int) -> list[str]:
    return ["1"] + [f"x{i}" for i in range(1, q + 1)] + ["x1^2"]


def make_cw_algebra(q: int) -> AlgebraStruct:
    """k[x1..xq] / (xi xj, xi^2 - xj^2, xi^3), basis (1, x1, ..., xq, x1^2)."""
    _check_q(q)
    n = q + 2
    top = q + 1
    table = [[[0] * n for _ in range(n)] for _ in range(n)]
    for j in range(n):
        table[0][j][j] = 1
        table[j][0][j] = 1
    for i in range(1, q + 1):
        table[i][i][top] = 1
    return AlgebraStruct(table, cw_algebra_names(q))


def make_cw_tensor(q: int) -> Tensor3:
    """Coppersmith-Winograd tensor of format (q+2)^3, basis e0, e1_1..e1_q, e2."""
    _check_q(q)
    e2 = q + 1
    ent = {}
    for i in range(1, q + 1):
        ent[(0, i, i)] = 1
        ent[(i, 0, i)] = 1
        ent[(i, i, 0)] = 1
    ent[(0, 0, e2)] = 1
    ent[(0, e2, 0)] = 1
    ent[(e2, 0, 0)] = 1
    return Tensor3((q + 2,) * 3, ent, Q)


def make_cw_easy_tensor(q: int) -> Tensor3:
    """Easy Coppersmith-Winograd tensor of format (q+1)^3."""
    _check_q(q)
    ent = {}
    for i in range(1, q + 1):
        ent[(0, i, i)] = 1
        ent[(i, 0, i)] = 1
        ent[(i, i, 0)] = 1
    return Tensor3((q + 1,) * 3, ent, Q)


def cw_dictionary(q: int) -> Matrix:
    """Coordinates change from (e0, e1_*, e2) to (1, x_*, x1^2): e2->1, e1_i->x_i, e0->x1^2."""
    _check_q(q)
    n = q + 2
    rows = [[0] * n for _ in range(n)]
    rows[0][q + 1] = 1
    rows[q + 1][0] = 1
    for i in range(1, q + 1):
        rows[i][i] = 1
    return Matrix(rows, Q)


def cw_projection(q: int) -> Matrix:
    """Projection along e2 onto <e0, e1_i>, shape (q+1) x (q+2)."""
    _check_q(q)
    return Matrix([[int(i == j) for j in range(q + 2)] for i in range(q + 1)], Q)


def make_cw_easy_map(q: int) -> BilinearMap:
    """``phi(a, b) = rho(a b)`` on M = <1, x_i> with values in R = <x_i, x1^2>.

    Output coordinates are ordered ``x1, ..., xq, x1^2``.
    """
    _check_q(q)
    n = q + 1
    ent = {}
    for i in range(1, q + 1):
        ent[(0, i, i - 1)] = 1
        ent[(i, 0, i - 1)] = 1
        ent[(i, i, q)] = 1
    T = Tensor3((n, n, n), ent, Q)
    return BilinearMap(T, None, ["1"] + [f"x{i}" for i in range(1, q + 1)],
                       [f"x{i}" for i in range(1, q + 1)] + ["x1^2"])


def cw_easy_relabeling(q: int) -> RestrictionOperator:
    """Operator with ``apply_restriction(op, make_cw_easy_tensor(q)) == make_cw_easy_map(q).tensor``."""
    _check_q(q)
    n = q + 1
    out = [[0] * n for _ in range(n)]
    out[q][0] = 1
    for i in range(1, q + 1):
        out[i - 1][i] = 1
    return RestrictionOperator(Matrix.identity(n), Matrix.identity(n), Matrix(out, Q))


def _var_names(d: int) -> list[str]:
    return list("xyz")[:d] if d <= 3 else [f"x{i}" for i in range(1, d + 1)]


def _monomial_name(e: Sequence[int], names: Sequence[str]) -> str:
    parts = []
    for name, k in zip(names, e):
        if k == 1:
            parts.append(name)
        elif k > 1:
            parts.append(f"{name}^{k}")
    return "*".join(parts) if parts else "1"


def make_monomial_quotient(num_vars: int, generators: Sequence[Sequence[int]]) -> AlgebraStruct:
    """k[x_1..x_d] modulo a monomial ideal, on the standard monomial basis.

    Basis monomials are ordered by total degree, then with larger exponents
    of earlier variables first.
    """
    d = num_vars
    if d < 1:
        raise InvalidParameter("need at least one variable")
    gens = [tuple(int(x) for x in g) for g in generators]
    if any(len(g) != d or min(g) < 0 for g in gens):
        raise InvalidParameter("generators must be length-d nonnegative exponent vectors")
    bounds = []
    for v in range(d):
        pure = [g[v] for g in gens if all(g[w] == 0 for w in range(d) if w != v) and g[v] > 0]
        if not pure:
            raise InfiniteDimensional(f"no pure power of variable {v + 1} in the ideal")
        bounds.append(min(pure))
    if any(not any(g) for g in gens):
        raise InvalidParameter("the unit ideal gives the zero algebra")

    def in_ideal(e):
        return any(all(a >= b for a, b in zip(e, g)) for g in gens)

    monos = [e for e in product(*(range(b) for b in bounds)) if not in_ideal(e)]
    monos.sort(key=lambda e: (sum(e), tuple(-x for x in e)))
    index = {e: i for i, e in enumerate(monos)}
    n = len(monos)
    table = [[[0] * n for _ in range(n)] for _ in range(n)]
    for i, a in enumerate(monos):
        for j, b in enumerate(monos):
            c = tuple(x + y for x, y in zip(a, b))
            if c in index:
                table[i][j][index[c]] = 1
    names = _var_names(d)
    return AlgebraStruct(table, [_monomial_name(e, names) for e in monos])
