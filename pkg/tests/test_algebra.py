import random
from fractions import Fraction
from itertools import permutations

import pytest

from tensordegen.algebra import (
    AlgebraStruct,
    check_properties,
    cw_easy_relabeling,
    find_identity,
    left_mult,
    make_cw_algebra,
    make_cw_easy_map,
    make_cw_easy_tensor,
    make_cw_tensor,
    make_diag_algebra,
    make_monomial_quotient,
    right_mult,
    structure_tensor,
)
from tensordegen.errors import InfiniteDimensional
from tensordegen.tensor3 import Matrix, apply_restriction, contract, diag_tensor, matrix_rank

ONE = Fraction(1)


def vec(A, name):
    return A.basis_vector(A.basis_names.index(name))


def brute_associative(A):
    n = A.dim
    b = [A.basis_vector(i) for i in range(n)]
    return all(A.mul(A.mul(b[i], b[j]), b[k]) == A.mul(b[i], A.mul(b[j], b[k]))
               for i in range(n) for j in range(n) for k in range(n))


# -- identity and properties ------------------------------------------------

def test_identity_examples():
    assert find_identity(make_diag_algebra(4)) == (ONE,) * 4
    for q in (1, 2, 5):
        A = make_cw_algebra(q)
        assert find_identity(A) == vec(A, "1")
    zero = AlgebraStruct([[[0, 0], [0, 0]], [[0, 0], [0, 0]]])
    assert find_identity(zero) is None


def test_properties_cw3():
    A = make_cw_algebra(3)
    assert check_properties(A) == {"associative": True, "commutative": True, "unital": True}
    assert brute_associative(A)


def test_properties_diag():
    assert all(check_properties(make_diag_algebra(3)).values())


def test_non_associative_table():
    # b1 b1 = b2, b2 b1 = b1, all else zero
    table = [[[0, 1], [0, 0]], [[1, 0], [0, 0]]]
    A = AlgebraStruct(table)
    assert check_properties(A)["associative"] is False
    assert not brute_associative(A)


# -- structure tensor and multiplication operators ---------------------------------

def test_structure_tensor_diag():
    for n in (1, 2, 5):
        assert structure_tensor(make_diag_algebra(n)) == diag_tensor(n)


def test_structure_tensor_slices_are_left_mult():
    A = make_cw_algebra(2)
    T = structure_tensor(A)
    for i in range(A.dim):
        # mode-1 slice rows index b_j, columns the output; left_mult columns are b_i b_j
        assert contract(T, 1, A.basis_vector(i)).T == left_mult(A, A.basis_vector(i))


def test_left_mult_examples():
    assert left_mult(make_diag_algebra(3), (ONE,) * 3) == Matrix.identity(3)
    A = make_cw_algebra(2)
    L = left_mult(A, vec(A, "x1"))
    images = [L.column(j) for j in range(4)]
    assert images == [vec(A, "x1"), vec(A, "x1^2"), (0, 0, 0, 0), (0, 0, 0, 0)]


def test_mult_operators_compose():
    rng = random.Random(4)
    A = make_cw_algebra(3)
    for _ in range(10):
        a = tuple(Fraction(rng.randint(-3, 3)) for _ in range(A.dim))
        b = tuple(Fraction(rng.randint(-3, 3)) for _ in range(A.dim))
        assert left_mult(A, a) @ left_mult(A, b) == left_mult(A, A.mul(a, b))
        assert right_mult(A, b) @ right_mult(A, a) == right_mult(A, A.mul(a, b))


def test_unital_structure_tensors_are_binding():
    algebras = [make_diag_algebra(3), make_cw_algebra(2), make_cw_algebra(4),
                make_monomial_quotient(2, [(2, 0), (0, 3)])]
    for A in algebras:
        T = structure_tensor(A)
        e = find_identity(A)
        # the coordinate covector of the identity in the dual basis of the product side
        n = A.dim
        alpha = tuple(ONE if e[i] else Fraction(0) for i in range(n))
        assert matrix_rank(contract(T, 1, alpha)) == n
        assert matrix_rank(contract(T, 2, alpha)) == n


# -- constructors -------------------------------------------------------------------

def test_cw_constructors():
    T = make_cw_tensor(2)
    assert T.dims == (4, 4, 4) and T.nnz == 9 and all(v == 1 for _, v in T.items())
    Tc = make_cw_easy_tensor(2)
    assert Tc.dims == (3, 3, 3) and Tc.nnz == 6
    # symmetric, as the decomposition formula forces
    assert T.permute_modes((1, 0, 2)) == T and T.permute_modes((2, 1, 0)) == T


def test_cw_algebra_relations():
    A = make_cw_algebra(2)
    assert A.dim == 4
    x1, x2, sq = vec(A, "x1"), vec(A, "x2"), vec(A, "x1^2")
    assert A.mul(x1, x2) == (0, 0, 0, 0)
    assert A.mul(x1, x1) == A.mul(x2, x2) == sq
    assert A.mul(x1, sq) == (0, 0, 0, 0)


@pytest.mark.parametrize("q", range(1, 11))
def test_cw_algebra_properties_up_to_10(q):
    A = make_cw_algebra(q)
    assert all(check_properties(A).values())


def test_monomial_examples():
    A = make_monomial_quotient(1, [(3,)])
    assert A.dim == 3 and A.basis_names == ["1", "x", "x^2"]
    assert A.mul(vec(A, "x"), vec(A, "x^2")) == (0, 0, 0)
    assert make_monomial_quotient(2, [(2, 0), (1, 1), (0, 2)]).dim == 3
    with pytest.raises(InfiniteDimensional):
        make_monomial_quotient(2, [(2, 0)])


@pytest.mark.parametrize("gens", [
    [(4, 0), (0, 1)],
    [(3, 0), (1, 1), (0, 2)],
    [(2, 0), (0, 2)],
    [(1, 0), (0, 4)],
    [(2, 0), (1, 1), (0, 3)],
    [(2, 1), (3, 0), (0, 2)],
    [(1, 1), (5, 0), (0, 5)],
])
def test_monomial_quotients_smoothable_shape(gens):
    A = make_monomial_quotient(2, gens)
    assert all(check_properties(A).values())
    assert brute_associative(A)


def _staircases_dim4():
    return [
        [(4, 0), (0, 1)],
        [(0, 4), (1, 0)],
        [(3, 0), (1, 1), (0, 2)],
        [(2, 0), (1, 1), (0, 3)],
        [(2, 0), (0, 2)],
    ]


def test_cw_algebra_not_monomial_q2():
    A = make_cw_algebra(2)
    n = A.dim
    target = A.table
    for gens in _staircases_dim4():
        B = make_monomial_quotient(2, gens)
        assert B.dim == 4
        for perm in permutations(range(n)):
            # relabel basis b_i -> b'_{perm[i]}
            relabeled = [[None] * n for _ in range(n)]
            for i in range(n):
                for j in range(n):
                    v = B.table[i][j]
                    relabeled[perm[i]][perm[j]] = tuple(v[perm.index(k)] for k in range(n))
            assert tuple(tuple(r) for r in relabeled) != target


# -- easy map -------------------------------------------------------------------------

def test_cw_easy_map_values():
    q = 3
    phi = make_cw_easy_map(q)
    M = [tuple(Fraction(int(i == j)) for j in range(q + 1)) for i in range(q + 1)]  # 1, x1..xq
    R = lambda j: tuple(Fraction(int(i == j)) for i in range(q + 1))  # x1..xq, x1^2
    for i in range(1, q + 1):
        assert phi(M[0], M[i]) == R(i - 1)
        assert phi(M[i], M[i]) == R(q)
        for j in range(1, q + 1):
            if i != j:
                assert phi(M[i], M[j]) == tuple([Fraction(0)] * (q + 1))


@pytest.mark.parametrize("q", range(1, 6))
def test_cw_easy_map_is_relabeled_tensor(q):
    assert make_cw_easy_map(q).tensor == apply_restriction(cw_easy_relabeling(q), make_cw_easy_tensor(q))
