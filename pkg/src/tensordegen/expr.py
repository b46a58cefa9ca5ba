"""Tensor expressions over named constructors.

Named-constructor grammar::

    diag:n=4   cw:q=2   cweasy:q=2   cwalg:q=2   pow:<inner>:n=2

``cwalg`` is the structure tensor of A_CW(q).  Structural bound rules match
on these trees, never on raw entries.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .errors import BudgetExceeded, DimensionOverflow, InvalidParameter, ParseError
from .tensor3 import MAX_ENTRIES, Tensor3, diag_tensor, kron, kron_power


@dataclass(frozen=True)
class Diag:
    n: int

    def __str__(self):
        return f"diag:n={self.n}"


@dataclass(frozen=True)
class CW:
    q: int

    def __str__(self):
        return f"cw:q={self.q}"


@dataclass(frozen=True)
class CWEasy:
    q: int

    def __str__(self):
        return f"cweasy:q={self.q}"


@dataclass(frozen=True)
class CWAlg:
    q: int

    def __str__(self):
        return f"cwalg:q={self.q}"


@dataclass(frozen=True)
class StructTensor:
    """Structure tensor of an arbitrary algebra, referenced by name."""

    algebra: object
    name: str = "algebra"

    def __str__(self):
        return f"struct:{self.name}"


@dataclass(frozen=True)
class Literal:
    """A tensor read from a file."""

    tensor: Tensor3
    name: str = "tensor"

    def __str__(self):
        return f"file:{self.name}"


@dataclass(frozen=True)
class Pow:
    base: "TensorExpr"
    n: int

    def __str__(self):
        return f"pow:{self.base}:n={self.n}"


@dataclass(frozen=True)
class Kron:
    left: "TensorExpr"
    right: "TensorExpr"

    def __str__(self):
        return f"kron({self.left},{self.right})"


TensorExpr = Union[Diag, CW, CWEasy, CWAlg, StructTensor, Literal, Pow, Kron]


def parse_expr(text: str) -> TensorExpr:
    toks = text.strip().split(":")
    try:
        return _parse(toks)
    except (ValueError, IndexError) as exc:
        raise ParseError(f"cannot parse tensor expression {text!r}: {exc}") from exc


def _param(tok: str, name: str) -> int:
    key, sep, val = tok.partition("=")
    if key.strip() != name or not sep:
        raise ValueError(f"expected {name}=<int>, got {tok!r}")
    return int(val)


def _parse(toks):
    head = toks[0].strip().lower()
    if head == "pow":
        if len(toks) < 3:
            raise ValueError("pow needs an inner expression and n=")
        return Pow(_parse(toks[1:-1]), _param(toks[-1], "n"))
    if len(toks) != 2:
        raise ValueError(f"unexpected tokens {toks}")
    if head == "diag":
        return Diag(_param(toks[1], "n"))
    if head == "cw":
        return CW(_param(toks[1], "q"))
    if head == "cweasy":
        return CWEasy(_param(toks[1], "q"))
    if head == "cwalg":
        return CWAlg(_param(toks[1], "q"))
    raise ValueError(f"unknown constructor {head!r}")


def estimated_nnz(expr: TensorExpr) -> int:
    if isinstance(expr, Diag):
        return expr.n
    if isinstance(expr, CW):
        return 3 * expr.q + 3
    if isinstance(expr, CWEasy):
        return 3 * expr.q
    if isinstance(expr, CWAlg):
        return 3 * expr.q + 3
    if isinstance(expr, (StructTensor, Literal)):
        return materialize(expr).nnz
    if isinstance(expr, Pow):
        return estimated_nnz(expr.base) ** expr.n
    if isinstance(expr, Kron):
        return estimated_nnz(expr.left) * estimated_nnz(expr.right)
    raise InvalidParameter(f"not a tensor expression: {expr!r}")


def materialize(expr: TensorExpr, max_entries: int = MAX_ENTRIES) -> Tensor3:
    from .algebra import make_cw_algebra, make_cw_easy_tensor, make_cw_tensor, structure_tensor

    if isinstance(expr, (Pow, Kron)) and estimated_nnz(expr) > max_entries:
        raise BudgetExceeded(f"{expr} has more than {max_entries} entries")
    try:
        if isinstance(expr, Diag):
            return diag_tensor(expr.n)
        if isinstance(expr, CW):
            return make_cw_tensor(expr.q)
        if isinstance(expr, CWEasy):
            return make_cw_easy_tensor(expr.q)
        if isinstance(expr, CWAlg):
            return structure_tensor(make_cw_algebra(expr.q))
        if isinstance(expr, StructTensor):
            return structure_tensor(expr.algebra)
        if isinstance(expr, Literal):
            return expr.tensor
        if isinstance(expr, Pow):
            return kron_power(materialize(expr.base, max_entries), expr.n, max_entries)
        if isinstance(expr, Kron):
            return kron(materialize(expr.left, max_entries), materialize(expr.right, max_entries), max_entries)
    except DimensionOverflow as exc:
        raise BudgetExceeded(str(exc)) from exc
    raise InvalidParameter(f"not a tensor expression: {expr!r}")


def builtin_certificate(expr: TensorExpr):
    """Border-rank certificate shipped for a named expression, or None."""
    from .algebra import cw_projection
    from .degen import (
        cw_certificate,
        cw_unitalization_operator,
        diag_certificate,
        kron_certificate,
        power_certificate,
        restrict_certificate,
    )
    from .tensor3 import RestrictionOperator

    if isinstance(expr, Diag):
        return diag_certificate(expr.n)
    if isinstance(expr, CW):
        return cw_certificate(expr.q)
    if isinstance(expr, CWEasy):
        proj = RestrictionOperator.uniform(cw_projection(expr.q))
        return restrict_certificate(cw_certificate(expr.q), proj, str(expr))
    if isinstance(expr, CWAlg):
        return restrict_certificate(cw_certificate(expr.q), cw_unitalization_operator(expr.q), str(expr))
    if isinstance(expr, Pow):
        inner = builtin_certificate(expr.base)
        return None if inner is None else power_certificate(inner, expr.n)
    if isinstance(expr, Kron):
        a, b = builtin_certificate(expr.left), builtin_certificate(expr.right)
        return None if a is None or b is None else kron_certificate(a, b)
    return None
