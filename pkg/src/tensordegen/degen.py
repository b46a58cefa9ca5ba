"""Restriction and degeneration certificates and the transformations on them.

A degeneration operator may have poles at ``e = 0``; only its image has to
be regular there.  Reports list the first offending entry in lexicographic
index order.

Conventions for bilinear maps: a triple of maps ``F*, G*, H`` with
``phi(x, y) = H(Fx * Gy)`` is the restriction operator ``(F^T, G^T, H)``
acting on the structure tensor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .algebra import (
    AlgebraStruct,
    BilinearMap,
    cw_dictionary,
    find_identity,
    left_mult,
    right_mult,
    structure_tensor,
)
from .errors import (
    DimensionMismatch,
    DimensionOverflow,
    InvalidParameter,
    NotADegeneration,
    NotBindingWitness,
    NotInvertibleElement,
    NotUnital,
    PipelineAssertionFailed,
    SingularMatrix,
)
from .scalar import EPS_ZERO, EpsScalar, format_scalar, to_eps, valuation
from .tensor3 import (
    Q,
    QEPS,
    Matrix,
    RestrictionOperator,
    Tensor3,
    apply_restriction,
    compose,
    contract,
    kron_vec,
    matrix_rank,
)

MAX_CERT_TERMS = 10**5


@dataclass(frozen=True)
class DecompCert:
    """Claim ``T + O(e) = sum_s v1_s x v2_s x v3_s``."""

    terms: tuple
    target_dims: tuple
    description: str = ""

    def __post_init__(self):
        terms = tuple(tuple(tuple(to_eps(x) for x in v) for v in t) for t in self.terms)
        for t in terms:
            if len(t) != 3 or tuple(len(v) for v in t) != tuple(self.target_dims):
                raise DimensionMismatch(f"term vector lengths do not match {self.target_dims}")
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "target_dims", tuple(self.target_dims))

    @property
    def r(self) -> int:
        return len(self.terms)


@dataclass
class DegenReport:
    valid: bool
    min_error_valuation: float
    first_mismatch: Optional[dict] = None
    detail: str = ""

    def to_dict(self) -> dict:
        v = self.min_error_valuation
        return {
            "valid": self.valid,
            "min_error_valuation": "inf" if v == math.inf else v,
            "first_mismatch": self.first_mismatch,
            "detail": self.detail,
        }


@dataclass(frozen=True)
class SandwichOperator:
    """``S`` with ``S^-1 (Sx * Sy)|_{e=0} = phi(x, y)``; plus pipeline diagnostics."""

    S: Matrix
    Q: Optional[Matrix] = None
    P: Optional[Matrix] = None

    def operator(self) -> RestrictionOperator:
        return RestrictionOperator(self.S.T, self.S.T, self.S.inverse())


# -- comparison core ---------------------------------------------------------

def compare_with_target(claimed: Tensor3, target: Tensor3) -> DegenReport:
    """Report on ``claimed == target + O(e)``."""
    if claimed.dims != target.dims:
        return DegenReport(False, -math.inf, None, f"format {claimed.dims} != {target.dims}")
    keys = sorted(set(k for k, _ in claimed.items()) | set(k for k, _ in target.items()))
    min_val = math.inf
    first = None
    for key in keys:
        actual = to_eps(claimed[key])
        expected = target[key]
        v = valuation(actual - expected)
        if v < min_val:
            min_val = v
        if v < 1 and first is None:
            first = {"index": list(key), "expected": format_scalar(expected), "actual": format_scalar(actual)}
    valid = first is None
    return DegenReport(valid, min_val, first, "" if valid else "image differs from target at e=0")


def verify_restriction(op: RestrictionOperator, T: Tensor3, T_target: Tensor3) -> bool:
    if op.source_dims != T.dims:
        raise DimensionMismatch(f"operator source {op.source_dims} != tensor format {T.dims}")
    if op.target_dims != T_target.dims:
        return False
    return apply_restriction(op, T) == T_target


def verify_degeneration(op: RestrictionOperator, T: Tensor3, T_target: Tensor3) -> DegenReport:
    """Check ``op T = T_target + O(e)`` over Q(e)."""
    if op.source_dims != T.dims:
        raise DimensionMismatch(f"operator source {op.source_dims} != tensor format {T.dims}")
    if op.target_dims != T_target.dims:
        return DegenReport(False, -math.inf, None, f"operator target {op.target_dims} != {T_target.dims}")
    image = apply_restriction(op, T.promote())
    return compare_with_target(image, T_target)


def certificate_tensor(cert: DecompCert) -> Tensor3:
    """Exact sum of the rank-one terms over Q(e)."""
    out: dict = {}
    for v1, v2, v3 in cert.terms:
        n1 = [(i, x) for i, x in enumerate(v1) if x]
        n2 = [(j, y) for j, y in enumerate(v2) if y]
        n3 = [(k, z) for k, z in enumerate(v3) if z]
        for i, x in n1:
            for j, y in n2:
                xy = x * y
                for k, z in n3:
                    key = (i, j, k)
                    out[key] = out.get(key, EPS_ZERO) + xy * z
    return Tensor3(cert.target_dims, {k: v for k, v in out.items() if v}, QEPS)


def verify_decomposition(cert: DecompCert, T: Tensor3) -> DegenReport:
    if cert.target_dims != T.dims:
        raise DimensionMismatch(f"certificate format {cert.target_dims} != tensor format {T.dims}")
    rep = compare_with_target(certificate_tensor(cert), T)
    rep.detail = f"r={cert.r}; " + (rep.detail or "border rank <= r certified")
    return rep


def certificate_operator(cert: DecompCert) -> RestrictionOperator:
    """The restriction operator from ``k^r`` whose columns are the term vectors."""
    return RestrictionOperator(*(Matrix.from_columns([t[m] for t in cert.terms], QEPS) for m in range(3)))


def cert_from_operator(op: RestrictionOperator, description: str = "") -> DecompCert:
    r = op.f1.cols
    if op.source_dims != (r, r, r):
        raise DimensionMismatch("operator does not start from a unit tensor")
    terms = [tuple(f.column(s) for f in op.maps) for s in range(r)]
    return DecompCert(tuple(terms), op.target_dims, description)


# -- constructions -----------------------------------------------------------

def cw_certificate(q: int) -> DecompCert:
    """The (q+2)-term approximate decomposition of T_CW(q).

    Coefficients are folded into the first vector of each triple.
    """
    if not isinstance(q, int) or q < 1:
        raise InvalidParameter(f"q must be a positive integer, got {q!r}")
    n = q + 2
    e = EpsScalar.eps
    zero = EPS_ZERO

    def vec(pairs):
        v = [zero] * n
        for idx, val in pairs:
            v[idx] = v[idx] + val
        return tuple(v)

    terms = []
    for i in range(1, q + 1):
        base = vec([(0, 1), (i, e(1))])
        terms.append((tuple(e(-2) * x for x in base), base, base))
    base = vec([(0, 1)] + [(i, e(2)) for i in range(1, q + 1)])
    terms.append((tuple(e(-3, -1) * x for x in base), base, base))
    base = vec([(0, 1), (q + 1, e(3))])
    coeff = e(-3) - e(-2, q)
    terms.append((tuple(coeff * x for x in base), base, base))
    return DecompCert(tuple(terms), (n, n, n), f"cw:q={q}")


def diag_certificate(n: int) -> DecompCert:
    """Exact n-term decomposition of the unit tensor of k^n."""
    terms = []
    for s in range(n):
        v = tuple(EpsScalar.const(int(i == s)) for i in range(n))
        terms.append((v, v, v))
    return DecompCert(tuple(terms), (n, n, n), f"diag:n={n}")


def kron_certificate(a: DecompCert, b: DecompCert) -> DecompCert:
    if a.r * b.r > MAX_CERT_TERMS:
        raise DimensionOverflow(f"{a.r * b.r} terms exceed the limit {MAX_CERT_TERMS}")
    terms = []
    for s in a.terms:
        for t in b.terms:
            terms.append(tuple(kron_vec(u, v) for u, v in zip(s, t)))
    dims = tuple(x * y for x, y in zip(a.target_dims, b.target_dims))
    return DecompCert(tuple(terms), dims, f"kron({a.description},{b.description})")


def power_certificate(cert: DecompCert, n: int) -> DecompCert:
    """Factor-wise Kronecker products of all n-tuples of terms (r^n terms)."""
    if n < 1:
        raise InvalidParameter("power must be at least 1")
    if cert.r ** n > MAX_CERT_TERMS:
        raise DimensionOverflow(f"{cert.r ** n} terms exceed the limit {MAX_CERT_TERMS}")
    out = cert
    for _ in range(n - 1):
        out = kron_certificate(out, cert)
    return DecompCert(out.terms, out.target_dims, f"pow:{cert.description}:n={n}")


def restrict_certificate(cert: DecompCert, op: RestrictionOperator, description: str = "") -> DecompCert:
    """Image of a certificate under an e-free restriction operator."""
    if op.source_dims != cert.target_dims:
        raise DimensionMismatch("operator does not act on the certificate's format")
    if op.field != Q:
        raise InvalidParameter("only constant operators preserve O(e) error terms here")
    terms = [tuple(f.apply(v) for f, v in zip(op.maps, t)) for t in cert.terms]
    return DecompCert(tuple(terms), op.target_dims, description or cert.description)


# -- unitalization -----------------------------------------------------------

@dataclass
class UnitalizeResult:
    phi: BilinearMap
    operator: RestrictionOperator
    identity: tuple


def unitalize(T: Tensor3, alpha1: Sequence, alpha2: Sequence) -> UnitalizeResult:
    """Equivalent unital bilinear map of a binding tensor (Q only).

    With ``P1 = (T alpha1)^T : V2* -> V3`` and ``P2 = (T alpha2)^T : V1* -> V3``
    the map ``phi(x, y) = T(P2^-1 x, P1^-1 y)`` has identity ``P2 alpha1 == P1 alpha2``.
    """
    n = T.dims[0]
    if T.dims != (n, n, n):
        raise DimensionMismatch(f"binding needs an n x n x n tensor, got {T.dims}")
    P1 = contract(T, 1, alpha1).T
    P2 = contract(T, 2, alpha2).T
    for name, P in (("alpha1", P1), ("alpha2", P2)):
        if matrix_rank(P) != n:
            raise NotBindingWitness(f"contraction with {name} is singular")
    op = RestrictionOperator(P2.inverse().T, P1.inverse().T, Matrix.identity(n, T.field))
    phi_t = apply_restriction(op, T)
    e1 = P2.apply(alpha1)
    e2 = P1.apply(alpha2)
    if e1 != e2:
        raise PipelineAssertionFailed(f"identity candidates differ: {e1} vs {e2}")
    phi = BilinearMap(phi_t, e1)
    if not phi.is_unital_with(e1):
        raise PipelineAssertionFailed("unitalized map fails the unit law")
    return UnitalizeResult(phi, op, e1)


def cw_unitalization_operator(q: int) -> RestrictionOperator:
    """Constant operator carrying T_CW(q) onto the structure tensor of A_CW(q).

    Unitalization at (alpha0, alpha0) first, then the relabeling
    e2 -> 1, e1_i -> x_i, e0 -> x1^2.
    """
    from .algebra import make_cw_tensor

    T = make_cw_tensor(q)
    a0 = tuple(Fraction(int(i == 0)) for i in range(q + 2))
    U = unitalize(T, a0, a0).operator
    D = cw_dictionary(q)
    return compose(RestrictionOperator(D, D, D), U)


# -- sandwiching -------------------------------------------------------------

def _invert(M: Matrix, what: str) -> Matrix:
    try:
        return M.inverse()
    except SingularMatrix as exc:
        raise NotInvertibleElement(f"{what} is not invertible") from exc


def sandwich_triple(A: AlgebraStruct, a, b, c) -> RestrictionOperator:
    """Isotropy element from ``xy = a^-1 (a x b)(b^-1 y c) c^-1``."""
    La, Rb, Lb, Rc = left_mult(A, a), right_mult(A, b), left_mult(A, b), right_mult(A, c)
    if not Rb.is_invertible():
        raise NotInvertibleElement("b is not invertible")
    La_inv = _invert(La, "a")
    Lb_inv = _invert(Lb, "b")
    Rc_inv = _invert(Rc, "c")
    op = RestrictionOperator((La @ Rb).T, (Lb_inv @ Rc).T, La_inv @ Rc_inv)
    T = structure_tensor(A)
    if op.field == QEPS:
        T = T.promote()
    image = apply_restriction(op, T)
    if (image - T).nnz:
        raise PipelineAssertionFailed("sandwich triple does not fix the structure tensor")
    return op


def sandwich_report(A: AlgebraStruct, phi_tensor: Tensor3, S: Matrix) -> DegenReport:
    """Check ``S^-1 (Sx * Sy)|_{e=0} == phi(x, y)`` on all basis pairs."""
    n = A.dim
    if S.shape != (n, n):
        raise DimensionMismatch(f"S has shape {S.shape}, expected {(n, n)}")
    S = S.promote()
    if not S.is_invertible():
        return DegenReport(False, -math.inf, None, "S is singular over Q(e)")
    op = RestrictionOperator(S.T, S.T, S.inverse())
    return verify_degeneration(op, structure_tensor(A), phi_tensor)


def degeneration_maps_from_certificate(cert: DecompCert, post: RestrictionOperator):
    """``(F, G, H)`` for ``phi(x, y) = H(Fx * Gy)|_{e=0}`` on k^r.

    The certificate's operator from the unit tensor is applied first, then
    the constant operator ``post``; factor-wise ``f_m = post_m @ C_m`` and
    ``F = f1^T, G = f2^T, H = f3``.
    """
    ops = compose(post, certificate_operator(cert))
    return ops.f1.T, ops.f2.T, ops.f3


def normalize_unital_degeneration(A: AlgebraStruct, phi: BilinearMap, F: Matrix, G: Matrix, H: Matrix) -> SandwichOperator:
    """Turn a degeneration ``phi <= A`` into a sandwich form ``S* x S* x S^-1``.

    ``A`` must be associative.  Raises ``NotUnital`` when ``phi`` has no
    identity, ``NotADegeneration`` when ``(F*, G*, H)`` does not degenerate
    ``A`` to ``phi``, and ``PipelineAssertionFailed`` if an intermediate
    invariant breaks.
    """
    n = A.dim
    if phi.tensor.dims != (n, n, n):
        raise DimensionMismatch("phi and A must live on spaces of equal dimension")
    F, G, H = F.promote(), G.promote(), H.promote()
    TA = structure_tensor(A)

    def check(Fm, Gm, Hm, stage):
        rep = verify_degeneration(RestrictionOperator(Fm.T, Gm.T, Hm), TA, phi.tensor)
        if not rep.valid:
            if stage == "input":
                raise NotADegeneration(f"(F*, G*, H) is not a degeneration operator: {rep.first_mismatch}")
            raise PipelineAssertionFailed(f"degeneration lost after {stage}: {rep.first_mismatch}")

    check(F, G, H, "input")
    e = phi.identity
    if e is None:
        e = _identity_of_map(phi)
    if e is None or not phi.is_unital_with(e):
        raise NotUnital("phi has no identity element")

    Fe = F.apply(e)
    L_Fe = left_mult(A, Fe)
    Qm = H @ L_Fe @ G
    if not Qm.is_identity_mod_eps():
        raise PipelineAssertionFailed("Q = H L_{Fe} G is not id + O(e)")
    G_hat = G @ Qm.inverse()
    check(F, G_hat, H, "Q-correction")

    Ge = G_hat.apply(e)
    R_Ge = right_mult(A, Ge)
    Pm = H @ R_Ge @ F
    if not Pm.is_identity_mod_eps():
        raise PipelineAssertionFailed("P = H R_{Ge} F is not id + O(e)")
    F_hat = F @ Pm.inverse()
    check(F_hat, G_hat, H, "P-correction")

    try:
        S = (H @ L_Fe @ R_Ge).inverse()
    except SingularMatrix as exc:
        raise PipelineAssertionFailed("H L_{Fe} R_{Ge} is singular") from exc
    rep = sandwich_report(A, phi.tensor, S)
    if not rep.valid:
        raise PipelineAssertionFailed(f"sandwich form fails: {rep.first_mismatch}")
    return SandwichOperator(S, Qm, Pm)


def _identity_of_map(phi: BilinearMap):
    n = phi.tensor.dims[0]
    table = [[[phi.tensor[(i, j, k)] for k in range(n)] for j in range(n)] for i in range(n)]
    return find_identity(AlgebraStruct(table))


def cw_normalization_inputs(q: int):
    """``(A, phi, F, G, H)`` for k^{q+2} degenerating to A_CW(q), from the CW certificate."""
    from .algebra import make_cw_algebra, make_diag_algebra

    A = make_diag_algebra(q + 2)
    alg = make_cw_algebra(q)
    phi = BilinearMap(structure_tensor(alg), find_identity(alg), alg.basis_names, alg.basis_names)
    F, G, H = degeneration_maps_from_certificate(cw_certificate(q), cw_unitalization_operator(q))
    return A, phi, F, G, H


# -- smoothing matrix --------------------------------------------------------

def cw_smoothing_matrix(q: int) -> Matrix:
    """Point matrix S: A_CW(e) -> k(e)^{q+2} in the basis (1, x1..xq, x1^2)."""
    if not isinstance(q, int) or q < 1:
        raise InvalidParameter(f"q must be a positive integer, got {q!r}")
    e = EpsScalar.eps
    n = q + 2
    rows = []
    for i in range(1, q + 1):
        r = [EPS_ZERO] * n
        r[0] = e(0)
        r[i] = e(1)
        r[n - 1] = e(3, -1)
        rows.append(r)
    rows.append([e(0)] + [e(2)] * q + [e(3, -1)])
    rows.append([e(0)] + [EPS_ZERO] * (q + 1))
    return Matrix(rows, QEPS)


def cw_smoothing_check(q: int, S: Optional[Matrix] = None) -> DegenReport:
    """Verify that ``S`` (default: the point matrix) smooths A_CW(q) inside k^{q+2}."""
    from .algebra import make_cw_algebra, make_diag_algebra

    if S is None:
        S = cw_smoothing_matrix(q)
    return sandwich_report(make_diag_algebra(q + 2), structure_tensor(make_cw_algebra(q)), S)
