"""Border-rank lower bounds by the substitution method.

For ``T`` in ``U* x V x W`` with ``dim U = n``::

    R_(T) >= n - 1 + m(T),    m(T) = min over u != 0 of rk(T u).

Lower bounds on ``m`` are *proved* only by structural rules on the
expression tree (the easy-CW product rule, and ``m >= 1`` when the slicing
map is injective).  Upper bounds on ``m`` come from explicit witnesses.
Finite-field sweeps are recorded as evidence and never raise ``lower``.
"""

from __future__ import annotations

import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .errors import (
    BadPrime,
    BudgetExceeded,
    CertificateInvalid,
    DependentBasis,
    DimensionMismatch,
    InvalidParameter,
    RuleNotApplicable,
    TensorDegenError,
    ZeroVector,
)
from .expr import CWEasy, Diag, Kron, Literal, Pow, TensorExpr, materialize
from .fileio import dumps, tensor_fingerprint
from .tensor3 import MAX_ENTRIES, Q, Matrix, Tensor3, contract, flattening_rank, kron_vec, matrix_rank, unit_vector

PROVED = "proved"
WITNESS = "witness"
FF_EVIDENCE = "finite-field-evidence"
CONDITIONAL = "conditional"
ASSERTED = "asserted"

FF_BUDGET = 10**7

CITE_SUBSTITUTION = "substitution method, one-dimensional case: R_(T) >= n - 1 + min_u rk(Tu)"
CITE_SUBSPACE = "substitution method: R_(T) >= n - d + min over d-dim U' of R_(T|U')"
CITE_CW_PRODUCT = "easy Coppersmith-Winograd product rule: m(phi_cw (x) psi) >= 2 m(psi) for q >= 2"
CITE_KRON_ORDER = "Kronecker factors reorder by an index permutation in every mode; m is invariant"
CITE_UNIT = "the 1x1x1 unit tensor has m = 1"
CITE_INJECTIVE = "m >= 1 iff the mode-1 unfolding has full row rank"
CITE_FLATTENING = "flattening bound: R_(T) >= rank of every unfolding"
CITE_CERT = "approximate decomposition with r terms: R_(T) <= r"
CITE_SLICE = "rk(Tu) for an explicit u bounds m from above"


@dataclass
class ProofNode:
    rule: str
    claim: str
    value: int
    grade: str
    citation: str
    premises: list = field(default_factory=list)
    data: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "rule": self.rule,
            "claim": self.claim,
            "value": self.value,
            "grade": self.grade,
            "citation": self.citation,
            "data": self.data,
            "premises": [p.to_dict() for p in self.premises],
        }

    def walk(self):
        yield self
        for p in self.premises:
            yield from p.walk()


@dataclass
class MWitness:
    u: tuple
    rank_value: int


@dataclass
class BoundReport:
    subject: dict
    lower: int
    upper: Optional[int] = None
    m: Optional[dict] = None
    derivation: list = field(default_factory=list)
    evidence: list = field(default_factory=list)

    def nodes(self):
        for root in self.derivation + self.evidence:
            yield from root.walk()

    @property
    def exact(self) -> bool:
        return self.upper is not None and self.upper == self.lower

    def to_dict(self) -> dict:
        return {
            "subject": self.subject,
            "lower": self.lower,
            "upper": self.upper,
            "exact": self.exact,
            "m": self.m,
            "derivation": [n.to_dict() for n in self.derivation],
            "evidence": [n.to_dict() for n in self.evidence],
        }

    def to_json(self) -> str:
        return dumps(self.to_dict())

    def to_text(self) -> str:
        s = self.subject
        lines = [f"subject: {s.get('expr', '?')} format {s.get('dims')}"]
        up = "?" if self.upper is None else self.upper
        lines.append(f"border rank: {self.lower} <= R_ <= {up}" + ("  (exact)" if self.exact else ""))
        if self.m is not None:
            lines.append(f"m: {self.m}")
        lines.append("derivation:")
        for root in self.derivation:
            _render(root, 1, lines)
        if self.evidence:
            lines.append("evidence:")
            for root in self.evidence:
                _render(root, 1, lines)
        return "\n".join(lines) + "\n"


def _render(node: ProofNode, depth: int, lines: list) -> None:
    lines.append(f"{'  ' * depth}[{node.grade}] {node.claim}  -- {node.citation}")
    for p in node.premises:
        _render(p, depth + 1, lines)


def _subject(expr, T: Tensor3, mode: int = 1) -> dict:
    return {"expr": str(expr), "dims": list(T.dims), "mode": mode, "fingerprint": tensor_fingerprint(T)}


# -- m upper bounds ----------------------------------------------------------

def m_upper(T: Tensor3, u: Sequence) -> MWitness:
    """Rank of the slice ``T u`` (factor 1); an upper bound on m(T)."""
    if len(u) != T.dims[0]:
        raise DimensionMismatch(f"vector length {len(u)} != {T.dims[0]}")
    if not any(u):
        raise ZeroVector("m witnesses must be nonzero")
    return MWitness(tuple(u), matrix_rank(contract(T, 1, u)))


def _best_basis_witness(T: Tensor3) -> MWitness:
    best = None
    for i in range(T.dims[0]):
        w = m_upper(T, unit_vector(T.dims[0], i))
        if best is None or w.rank_value < best.rank_value:
            best = w
    return best


def _factor_witness(expr) -> Optional[tuple]:
    """Pure-tensor witness vector for Pow/Kron expressions."""
    if isinstance(expr, Pow):
        base = _factor_witness(expr.base)
        if base is None:
            return None
        out = base
        for _ in range(expr.n - 1):
            out = kron_vec(out, base)
        return out
    if isinstance(expr, Kron):
        a, b = _factor_witness(expr.left), _factor_witness(expr.right)
        if a is None or b is None:
            return None
        return kron_vec(a, b)
    try:
        return _best_basis_witness(materialize(expr)).u
    except TensorDegenError:
        return None


def witness_schedule(expr, T: Tensor3, seed: int = 0, random_witnesses: int = 100):
    n = T.dims[0]
    for i in range(n):
        yield "basis", unit_vector(n, i)
    if isinstance(expr, (Pow, Kron)):
        u = _factor_witness(expr)
        if u is not None and len(u) == n:
            yield "product", tuple(Fraction(x) for x in u)
    rng = random.Random(seed)
    k = 0
    while k < random_witnesses:
        v = tuple(Fraction(rng.randint(-3, 3)) for _ in range(n))
        if any(v):
            k += 1
            yield "random", v


# -- proved m lower bounds ---------------------------------------------------

def cw_product_rule(expr: TensorExpr):
    """Proved ``m >= value`` for ``Kron(CWEasy(q), psi)`` or ``Pow(CWEasy(q), n)``, q >= 2.

    Returns ``(value, ProofNode)``; raises RuleNotApplicable otherwise.
    """
    if isinstance(expr, Pow) and isinstance(expr.base, CWEasy):
        q = expr.base.q
        if q < 2:
            raise RuleNotApplicable(f"product rule needs q >= 2, got q = {q}")
        if expr.n < 1:
            raise RuleNotApplicable("power must be at least 1")
        if expr.n == 1:
            psi_val, psi_node = 1, ProofNode("unit", "m(unit) >= 1", 1, PROVED, CITE_UNIT)
        else:
            psi_val, psi_node = cw_product_rule(Pow(expr.base, expr.n - 1))
        val = 2 * psi_val
        node = ProofNode("cw-product", f"m({expr}) >= 2 * {psi_val} = {val}", val, PROVED,
                         CITE_CW_PRODUCT, [psi_node], {"q": q})
        return val, node
    if isinstance(expr, Kron):
        for cw, psi, swapped in ((expr.left, expr.right, False), (expr.right, expr.left, True)):
            if isinstance(cw, CWEasy):
                if cw.q < 2:
                    continue
                psi_val, psi_node = m_lower_proved(psi)
                val = 2 * psi_val
                node = ProofNode("cw-product", f"m({expr}) >= 2 * {psi_val} = {val}", val, PROVED,
                                 CITE_CW_PRODUCT, [psi_node], {"q": cw.q})
                if swapped:
                    node = ProofNode("kron-reorder", f"m({expr}) = m(kron({cw},{psi})) >= {val}", val,
                                     PROVED, CITE_KRON_ORDER, [node])
                return val, node
        raise RuleNotApplicable(f"no easy-CW factor with q >= 2 in {expr}")
    raise RuleNotApplicable(f"product rule does not match {expr}")


def m_lower_proved(expr, T: Optional[Tensor3] = None):
    """Best proved lower bound on m from the structural rules."""
    try:
        return cw_product_rule(expr)
    except RuleNotApplicable:
        pass
    if isinstance(expr, CWEasy) and expr.q >= 2:
        val, node = cw_product_rule(Pow(expr, 1))
        return val, ProofNode("first-power", f"m({expr}) = m(pow:{expr}:n=1) >= {val}", val, PROVED,
                              "a tensor is its own first Kronecker power", [node])
    if isinstance(expr, Diag) and expr.n == 1:
        return 1, ProofNode("unit", "m(unit) >= 1", 1, PROVED, CITE_UNIT)
    if T is None:
        T = materialize(expr)
    r = flattening_rank(T, 1)
    if r == T.dims[0]:
        return 1, ProofNode("injective-slicing", f"m({expr}) >= 1", 1, PROVED, CITE_INJECTIVE,
                            data={"mode1_rank": r})
    return 0, ProofNode("kernel", f"m({expr}) = 0 (mode-1 unfolding rank {r} < {T.dims[0]})", 0,
                        PROVED, CITE_INJECTIVE, data={"mode1_rank": r})


# -- classical bounds --------------------------------------------------------

def flattening_bound(T: Tensor3) -> int:
    return max(flattening_rank(T, m) for m in (1, 2, 3))


def _flattening_node(T: Tensor3, label: str) -> ProofNode:
    ranks = [flattening_rank(T, m) for m in (1, 2, 3)]
    return ProofNode("flattening", f"R_({label}) >= max{tuple(ranks)} = {max(ranks)}", max(ranks),
                     PROVED, CITE_FLATTENING, data={"ranks": ranks})


def _mode_first(T: Tensor3, mode: int) -> Tensor3:
    if mode == 1:
        return T
    m = mode - 1
    return T.permute_modes([m] + [x for x in range(3) if x != m])


def substitution_bound(expr: TensorExpr, mode: int = 1, seed: int = 0, random_witnesses: int = 100,
                       max_entries: int = MAX_ENTRIES) -> BoundReport:
    """Substitution-method report, slicing factor ``mode``.

    Structural rules apply only in mode 1, the factor their statements slice.
    """
    if mode not in (1, 2, 3):
        raise InvalidParameter(f"mode must be 1, 2 or 3, got {mode}")
    T0 = materialize(expr, max_entries)
    T = _mode_first(T0, mode)
    n = T.dims[0]
    if mode == 1:
        m_lo, m_node = m_lower_proved(expr, T)
    else:
        m_lo, m_node = m_lower_proved(Literal(T, f"mode{mode}({expr})"), T)

    best = None
    best_kind = None
    for kind, u in witness_schedule(expr if mode == 1 else None, T, seed, random_witnesses):
        w = m_upper(T, u)
        if best is None or w.rank_value < best.rank_value:
            best, best_kind = w, kind
        if best.rank_value <= m_lo:
            break
    m_hi = best.rank_value
    if m_hi < m_lo:
        raise AssertionError(f"witness rank {m_hi} below proved bound {m_lo}")
    m_info = {"exact": m_lo} if m_lo == m_hi else {"interval": [m_lo, m_hi]}

    sub_val = n - 1 + m_lo
    sub_node = ProofNode("substitution", f"R_({expr}) >= {n} - 1 + {m_lo} = {sub_val}", sub_val, PROVED,
                         CITE_SUBSTITUTION, [m_node], {"n": n, "mode": mode})
    flat_node = _flattening_node(T0, str(expr))
    lower = max(sub_val, flat_node.value)
    root = ProofNode("max", f"R_({expr}) >= {lower}", lower, PROVED, "larger of two proved lower bounds",
                     [sub_node, flat_node])
    wit_node = ProofNode("slice-witness", f"m({expr}) <= rk(T u) = {m_hi}", m_hi, WITNESS, CITE_SLICE,
                         data={"u": [str(x) for x in best.u], "schedule": best_kind})
    return BoundReport(_subject(expr, T0, mode), lower, None, m_info, [root], [wit_node])


def subspace_restriction_bound(T: Tensor3, basis: Sequence[Sequence], inner_bound=None,
                               assert_minimal: bool = False) -> BoundReport:
    """Compose ``R_(T) >= n - d + R_(T|U')`` for a supplied subspace ``U'``.

    The inequality needs the minimum over all d-dimensional subspaces, so the
    result is graded ``conditional`` unless ``d == n`` (``asserted`` when the
    caller vouches for minimality).  ``inner_bound`` may be an int, a
    BoundReport for the restricted tensor, or None (flattening bound of the
    restriction is used).
    """
    n = T.dims[0]
    d = len(basis)
    if d < 1 or any(len(u) != n for u in basis):
        raise DimensionMismatch(f"need 1..{n} vectors of length {n}")
    if matrix_rank(Matrix([list(u) for u in basis], Q)) != d:
        raise DependentBasis("subspace basis is linearly dependent")
    slices = [contract(T, 1, u) for u in basis]
    ent = {}
    for t, S in enumerate(slices):
        for j in range(S.rows):
            for k in range(S.cols):
                if S[j, k]:
                    ent[(t, j, k)] = S[j, k]
    R = Tensor3((d, T.dims[1], T.dims[2]), ent, T.field)
    flat_inner = flattening_bound(R) if not R.is_zero() else 0

    if inner_bound is None:
        inner_val, inner_grade = flat_inner, PROVED
        inner_node = _flattening_node(R, "T|U'")
    elif isinstance(inner_bound, BoundReport):
        fp = inner_bound.subject.get("fingerprint")
        if fp is not None and fp != tensor_fingerprint(R):
            raise InvalidParameter("inner bound was computed for a different tensor than T|U'")
        inner_val = inner_bound.lower
        grades = {nd.grade for root in inner_bound.derivation for nd in root.walk()}
        inner_grade = PROVED if fp is not None and grades <= {PROVED} else CONDITIONAL
        if inner_val <= flat_inner:
            inner_grade = PROVED
        inner_node = ProofNode("inner", f"R_(T|U') >= {inner_val}", inner_val, inner_grade,
                               "supplied inner bound", [r for r in inner_bound.derivation])
    else:
        inner_val = int(inner_bound)
        inner_grade = PROVED if inner_val <= flat_inner else CONDITIONAL
        inner_node = ProofNode("inner", f"R_(T|U') >= {inner_val}", inner_val, inner_grade,
                               "supplied inner bound" + (" (implied by flattening)" if inner_grade == PROVED else ""),
                               data={"restriction_flattening_bound": flat_inner})

    lower = n - d + inner_val
    if d == n and inner_grade == PROVED:
        grade = PROVED
    elif assert_minimal and inner_grade == PROVED:
        grade = ASSERTED
    else:
        grade = CONDITIONAL
    note = "" if grade == PROVED else " (conditional on U' minimizing)"
    node = ProofNode("subspace", f"R_(T) >= {n} - {d} + {inner_val} = {lower}{note}", lower, grade,
                     CITE_SUBSPACE, [inner_node], {"n": n, "d": d})
    subj = _subject("restricted", T)
    subj["restriction_fingerprint"] = tensor_fingerprint(R)
    return BoundReport(subj, lower, None, None, [node], [])


def upper_bound_from_cert(expr: TensorExpr, cert, report: Optional[BoundReport] = None,
                          max_entries: int = MAX_ENTRIES) -> BoundReport:
    """Merge ``upper = r`` from a verified approximate decomposition."""
    from .degen import verify_decomposition

    T = materialize(expr, max_entries)
    if cert.target_dims != T.dims:
        raise CertificateInvalid(f"certificate format {cert.target_dims} != {T.dims}")
    rep = verify_decomposition(cert, T)
    if not rep.valid:
        raise CertificateInvalid(f"certificate rejected: {rep.first_mismatch}")
    if report is None:
        flat = _flattening_node(T, str(expr))
        report = BoundReport(_subject(expr, T), flat.value, None, None, [flat], [])
    elif report.subject.get("fingerprint") not in (None, tensor_fingerprint(T)):
        raise InvalidParameter("report and certificate concern different tensors")
    upper = cert.r if report.upper is None else min(report.upper, cert.r)
    if upper < report.lower:
        raise AssertionError(f"upper {upper} below proved lower {report.lower}")
    report.upper = upper
    report.derivation.append(ProofNode("certificate", f"R_({expr}) <= {cert.r}", cert.r, PROVED, CITE_CERT,
                                       data={"r": cert.r, "min_error_valuation": rep.to_dict()["min_error_valuation"]}))
    return report


# -- finite-field evidence ---------------------------------------------------

def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


def batched_rank_mod_p(M: np.ndarray, p: int) -> np.ndarray:
    """Ranks over GF(p) of a stack of matrices, shape (B, r, c), entries in [0, p)."""
    small = (p - 1) ** 2 * 2 <= np.iinfo(np.int16).max // 2
    dtype = np.int16 if small else np.int64
    limit = np.iinfo(dtype).max // 2
    if (p - 1) ** 2 * 2 > limit:
        raise BadPrime(f"p = {p} is too large for the vectorized sweep")
    M = M.astype(dtype, copy=True)
    B, r, c = M.shape
    used = np.zeros((B, r), dtype=bool)
    rank = np.zeros(B, dtype=np.int64)
    inv = np.array([0] + [pow(x, p - 2, p) for x in range(1, p)], dtype=M.dtype)
    ar = np.arange(B)
    bound = p - 1
    for col in range(c):
        colv = M[:, :, col] % p
        cand = (colv != 0) & ~used
        has = cand.any(axis=1)
        piv = cand.argmax(axis=1)
        rank += has
        used[ar, piv] |= has
        if col == c - 1:
            break
        prow = M[ar, piv, col + 1:] % p
        f = (colv * inv[colv[ar, piv]][:, None]) % p
        f[ar, piv] = 0
        f[~has] = 0
        # lazy reduction: each update grows magnitudes by at most (p-1)^2
        if bound + (p - 1) ** 2 > limit:
            M[:, :, col + 1:] %= p
            bound = p - 1
        M[:, :, col + 1:] -= f[:, :, None] * prow[:, None, :]
        bound += (p - 1) ** 2
    return rank


def _tensor_mod_p(T: Tensor3, p: int) -> np.ndarray:
    n1, n2, n3 = T.dims
    A = np.zeros((n1, n2 * n3), dtype=np.int64)
    for (i, j, k), v in T.items():
        v = Fraction(v.to_rational() if hasattr(v, "to_rational") else v)
        if v.denominator % p == 0:
            raise BadPrime(f"p = {p} divides a denominator of T")
        A[i, j * n3 + k] = (v.numerator * pow(v.denominator, p - 2, p)) % p
    return A


def _projective_chunks(n: int, p: int, chunk: int):
    """Yield (leading index, start, stop) ranges covering one vector per line."""
    for lead in range(n):
        free = n - 1 - lead
        total = p ** free
        for a in range(0, total, chunk):
            yield lead, a, min(a + chunk, total)


def _chunk_vectors(n: int, p: int, lead: int, a: int, b: int) -> np.ndarray:
    free = n - 1 - lead
    idx = np.arange(a, b, dtype=np.int64)
    U = np.zeros((b - a, n), dtype=np.int64)
    U[:, lead] = 1
    for t in range(free):
        U[:, n - 1 - t] = idx % p
        idx //= p
    return U


def m_exhaustive_ff(T: Tensor3, p: int, budget: int = FF_BUDGET, jobs: int = 1, chunk: int = 500_000,
                    backend: str = "compiled") -> int:
    """Minimum slice rank over all nonzero u in GF(p)^n (one per line through 0).

    Evidence for m over the closure, never a proof.  ``backend`` is
    ``"compiled"`` (numba kernel) or ``"numpy"`` (batched elimination).
    """
    p = int(p)
    if not _is_prime(p):
        raise BadPrime(f"{p} is not prime")
    if T.field != Q and not all(v.is_constant() for _, v in T.items()):
        raise InvalidParameter("finite-field sweep needs a tensor with rational entries")
    n1, n2, n3 = T.dims
    count = (p ** n1 - 1) // (p - 1)
    if count > budget:
        raise BudgetExceeded(f"{count} slice ranks exceed the budget {budget}")
    A = _tensor_mod_p(T, p)
    tasks = list(_projective_chunks(n1, p, chunk))

    if backend == "compiled":
        from ._ffsweep import sweep_min_rank

        inv = np.array([0] + [pow(x, p - 2, p) for x in range(1, p)], dtype=np.int64)

        def run(task):
            lead, a, b = task
            return int(sweep_min_rank(A, n1, n2, n3, p, lead, a, b, inv))
    elif backend == "numpy":
        def run(task):
            lead, a, b = task
            U = _chunk_vectors(n1, p, lead, a, b)
            S = (U @ A) % p
            return int(batched_rank_mod_p(S.reshape(-1, n2, n3), p).min())
    else:
        raise InvalidParameter(f"unknown backend {backend!r}")

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run, tasks))
    else:
        results = []
        for t in tasks:
            results.append(run(t))
            if results[-1] == 0:
                break
    return min(results)


def ff_evidence_node(T: Tensor3, p: int, label: str, **kw) -> ProofNode:
    v = m_exhaustive_ff(T, p, **kw)
    return ProofNode("ff-sweep", f"min rk(Tu) over GF({p}) = {v}", v, FF_EVIDENCE,
                     "exhaustive sweep over a finite field; evidence only", data={"p": p, "expr": label})
