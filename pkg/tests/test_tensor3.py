import random
from fractions import Fraction

import numpy as np
import pytest

from tensordegen.algebra import cw_projection, make_cw_easy_tensor, make_cw_tensor
from tensordegen.degen import cw_smoothing_matrix
from tensordegen.errors import DimensionMismatch, DimensionOverflow, SingularMatrix
from tensordegen.scalar import EpsScalar
from tensordegen.tensor3 import (
    QEPS,
    Q,
    Matrix,
    RestrictionOperator,
    Tensor3,
    apply_restriction,
    compose,
    contract,
    diag_tensor,
    find_binding_covectors,
    flattening_rank,
    is_concise,
    kron,
    kron_power,
    matrix_rank,
    sparse_rank,
    unit_tensor,
    unit_vector,
)

from oracles import dense, minor_rank, restrict_dense, same_dense, sympy_rank


def rand_matrix(rng, rows, cols, rank=None, lo=-3, hi=3):
    if rank is None:
        return Matrix([[Fraction(rng.randint(lo, hi)) for _ in range(cols)] for _ in range(rows)], Q)
    A = Matrix([[Fraction(rng.randint(lo, hi)) for _ in range(rank)] for _ in range(rows)], Q)
    B = Matrix([[Fraction(rng.randint(lo, hi)) for _ in range(cols)] for _ in range(rank)], Q)
    return A @ B


def rand_tensor(rng, dims, density=0.5):
    ent = {}
    for i in range(dims[0]):
        for j in range(dims[1]):
            for k in range(dims[2]):
                if rng.random() < density:
                    ent[(i, j, k)] = Fraction(rng.randint(-3, 3), rng.randint(1, 2))
    return Tensor3(dims, ent, Q)


def rand_eps_matrix(rng, rows, cols):
    def entry():
        return EpsScalar(tuple(Fraction(rng.randint(-2, 2)) for _ in range(2)),
                         (1, Fraction(rng.randint(-2, 2))))
    return Matrix([[entry() for _ in range(cols)] for _ in range(rows)], QEPS)


# -- rank ----------------------------------------------------------------------

def test_zero_matrix_rank():
    assert matrix_rank(Matrix.zeros(3, 4)) == 0


def test_smoothing_matrix_invertible():
    S = cw_smoothing_matrix(2)
    assert S.shape == (4, 4)
    assert matrix_rank(S) == 4


@pytest.mark.parametrize("seed", range(25))
def test_rank_matches_minor_expansion(seed):
    rng = random.Random(seed)
    n, m = rng.randint(1, 5), rng.randint(1, 5)
    r = rng.randint(0, min(n, m))
    M = rand_matrix(rng, n, m, rank=r) if r else Matrix.zeros(n, m)
    assert matrix_rank(M) == minor_rank(M.entries)


@pytest.mark.parametrize("seed", range(8))
def test_eps_rank_matches_sympy(seed):
    rng = random.Random(100 + seed)
    n, m = rng.randint(2, 4), rng.randint(2, 4)
    M = rand_eps_matrix(rng, n, m)
    if seed % 2:
        # force a dependent row
        r0, r1 = M.entries[0], M.entries[1]
        c = EpsScalar((1, 1))
        rows = [list(r) for r in M.entries]
        rows[-1] = [a + c * b for a, b in zip(r0, r1)]
        M = Matrix(rows, QEPS)
    assert matrix_rank(M) == sympy_rank(M.entries)


@pytest.mark.parametrize("seed", range(6))
def test_rank_invariant_under_invertible_maps(seed):
    rng = random.Random(seed)
    M = rand_matrix(rng, 4, 5, rank=rng.randint(1, 4))
    while True:
        L = rand_matrix(rng, 4, 4)
        R = rand_matrix(rng, 5, 5)
        if L.is_invertible() and R.is_invertible():
            break
    assert matrix_rank(L @ M @ R) == matrix_rank(M)


def test_rank_same_after_promotion():
    rng = random.Random(3)
    for _ in range(5):
        M = rand_matrix(rng, 4, 4, rank=rng.randint(1, 4))
        assert matrix_rank(M) == matrix_rank(M.promote())


def test_inverse_and_singular():
    rng = random.Random(5)
    M = rand_eps_matrix(rng, 3, 3)
    assert M @ M.inverse() == Matrix.identity(3, QEPS)
    with pytest.raises(SingularMatrix):
        Matrix([[1, 2], [2, 4]], Q).inverse()


def test_sparse_rank():
    rows = [{0: Fraction(1), 3: Fraction(2)}, {0: Fraction(2), 3: Fraction(4)}, {1: Fraction(1)}]
    assert sparse_rank(rows) == 2


# -- contraction ------------------------------------------------------------------

def test_contract_examples():
    one = (Fraction(1),) * 3
    assert contract(diag_tensor(3), 1, one) == Matrix.identity(3)
    a0 = unit_vector(4, 0)
    assert matrix_rank(contract(make_cw_tensor(2), 1, a0)) == 4
    x1 = unit_vector(3, 1)
    assert matrix_rank(contract(make_cw_easy_tensor(2), 1, x1)) == 2


@pytest.mark.parametrize("seed", range(6))
def test_contract_restriction_identity(seed):
    rng = random.Random(seed)
    T = rand_tensor(rng, (3, 2, 4))
    F1, F2, F3 = rand_matrix(rng, 2, 3), rand_matrix(rng, 3, 2), rand_matrix(rng, 2, 4)
    alpha = [Fraction(rng.randint(-3, 3)) for _ in range(2)]
    lhs = contract(apply_restriction(RestrictionOperator(F1, F2, F3), T), 1, alpha)
    rhs = F2 @ contract(T, 1, F1.T.apply(alpha)) @ F3.T
    assert lhs == rhs


def test_contract_length_checked():
    with pytest.raises(DimensionMismatch):
        contract(diag_tensor(3), 1, (1, 0))


# -- restriction ----------------------------------------------------------------

def test_identity_restriction():
    T = make_cw_tensor(3)
    assert apply_restriction(RestrictionOperator.identity(T.dims), T) == T


def test_projection_gives_easy_cw():
    for q in (1, 2, 4):
        P = cw_projection(q)
        assert apply_restriction(RestrictionOperator.uniform(P), make_cw_tensor(q)) == make_cw_easy_tensor(q)


def test_rank_one_restriction():
    T = make_cw_tensor(2)
    u = Matrix([[1, 2, 0, -1]], Q)
    v = Matrix([[0, 1, 1, 3]], Q)
    img = apply_restriction(RestrictionOperator(u, v, u), T)
    assert img.dims == (1, 1, 1) and img.nnz <= 1


@pytest.mark.parametrize("seed", range(8))
def test_restriction_matches_einsum(seed):
    rng = random.Random(seed)
    T = rand_tensor(rng, (3, 3, 2))
    op = RestrictionOperator(rand_matrix(rng, 2, 3), rand_matrix(rng, 4, 3), rand_matrix(rng, 3, 2))
    assert same_dense(dense(apply_restriction(op, T)), restrict_dense(op.maps, dense(T)))


@pytest.mark.parametrize("seed", range(8))
def test_composition_law(seed):
    rng = random.Random(seed)
    T = rand_tensor(rng, (3, 2, 3))
    op1 = RestrictionOperator(rand_matrix(rng, 2, 3), rand_matrix(rng, 3, 2), rand_matrix(rng, 2, 3))
    op2 = RestrictionOperator(rand_matrix(rng, 3, 2), rand_matrix(rng, 2, 3), rand_matrix(rng, 2, 2))
    assert apply_restriction(op2, apply_restriction(op1, T)) == apply_restriction(compose(op2, op1), T)


def test_composition_law_over_eps():
    rng = random.Random(11)
    T = rand_tensor(rng, (2, 2, 2)).promote()
    op1 = RestrictionOperator(*(rand_eps_matrix(rng, 2, 2) for _ in range(3)))
    op2 = RestrictionOperator(*(rand_eps_matrix(rng, 2, 2) for _ in range(3)))
    assert apply_restriction(op2, apply_restriction(op1, T)) == apply_restriction(compose(op2, op1), T)


def test_restriction_format_checked():
    with pytest.raises(DimensionMismatch):
        apply_restriction(RestrictionOperator.identity((2, 2, 2)), diag_tensor(3))


# -- flattening and conciseness ---------------------------------------------------------

def test_flattening_examples():
    for m in (1, 2, 3):
        assert flattening_rank(diag_tensor(5), m) == 5
        assert flattening_rank(make_cw_tensor(2), m) == 4
        assert flattening_rank(make_cw_easy_tensor(2), m) == 3


def test_flattening_matches_minor_rank():
    T = make_cw_tensor(2)
    A = dense(T)
    assert minor_rank(A.reshape(4, 16).tolist()) == flattening_rank(T, 1)


def test_conciseness():
    for q in (1, 2, 3, 5):
        assert is_concise(make_cw_tensor(q))
    assert not is_concise(Tensor3((2, 2, 2), {}, Q))
    assert is_concise(diag_tensor(4))


# -- kron ---------------------------------------------------------------------------------

def test_kron_diag():
    assert kron(diag_tensor(2), diag_tensor(3)) == diag_tensor(6)


def test_kron_count_and_convention():
    Tc = make_cw_easy_tensor(2)
    K = kron(Tc, Tc)
    assert Tc.nnz == 6 and K.dims == (9, 9, 9) and K.nnz == 36
    full = kron(make_cw_tensor(2), make_cw_tensor(2))
    assert full.dims == (16, 16, 16) and full.nnz == 81
    # row-major pairing (i, i') -> 3 i + i'
    A, B = dense(Tc), dense(K)
    for idx in np.ndindex(3, 3, 3, 3, 3, 3):
        i, j, k, a, b, c = idx
        assert B[3 * i + a, 3 * j + b, 3 * k + c] == A[i, j, k] * A[a, b, c]


def test_kron_with_unit():
    T = make_cw_tensor(2)
    assert kron(T, unit_tensor()) == T
    assert kron(unit_tensor(), T) == T


def test_kron_flattening_submultiplicative():
    rng = random.Random(9)
    T = rand_tensor(rng, (2, 3, 2))
    S = rand_tensor(rng, (2, 2, 2))
    for m in (1, 2, 3):
        assert flattening_rank(kron(T, S), m) <= flattening_rank(T, m) * flattening_rank(S, m)
        assert flattening_rank(kron(diag_tensor(2), diag_tensor(3)), m) == 6


def test_kron_budget():
    with pytest.raises(DimensionOverflow):
        kron_power(make_cw_tensor(2), 3, max_entries=500)


# -- binding --------------------------------------------------------------------------------

def test_binding_cw():
    for q in (1, 2, 4):
        a0 = unit_vector(q + 2, 0)
        assert find_binding_covectors(make_cw_tensor(q)) == (a0, a0)


def test_binding_diag_and_zero():
    one = (Fraction(1),) * 3
    assert find_binding_covectors(diag_tensor(3)) == (one, one)
    assert find_binding_covectors(Tensor3((3, 3, 3), {}, Q), max_attempts=20) is None


@pytest.mark.parametrize("seed", range(5))
def test_binding_result_rechecks(seed):
    rng = random.Random(seed)
    T = rand_tensor(rng, (3, 3, 3), density=0.6)
    found = find_binding_covectors(T, seed=seed)
    if found is not None:
        a1, a2 = found
        assert matrix_rank(contract(T, 1, a1)) == 3
        assert matrix_rank(contract(T, 2, a2)) == 3


def test_tensor_entries_sorted_and_clean():
    T = Tensor3((2, 2, 2), {(1, 1, 1): 2, (0, 0, 0): 0, (0, 1, 0): Fraction(1, 3)}, Q)
    assert list(k for k, _ in T.items()) == [(0, 1, 0), (1, 1, 1)]
    with pytest.raises(DimensionMismatch):
        Tensor3((2, 2, 2), {(2, 0, 0): 1}, Q)
