"""JSON file formats for tensors, operators, algebras and certificates.

Tensor::

    {"dims": [n1, n2, n3], "field": "Q" | "Q(eps)",
     "entries": [{"i": 0, "j": 1, "k": 1, "v": "1"}, ...]}

Indices are 0-based; entries are written in lexicographic order.

Operator::

    {"field": ..., "f1": [[...]], "f2": [[...]], "f3": [[...]]}

Algebra::

    {"dim": n, "basis": [names], "table": [[[rationals]]]}

Certificate::

    {"target": "<tensor file or named constructor>", "r": int,
     "terms": [{"v1": [...], "v2": [...], "v3": [...]}]}

Every scalar is a string in the grammar of :mod:`tensordegen.scalar`.
Serialization is deterministic: ``dumps(loads(s)) == s`` for files written
by this module.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any

from .algebra import AlgebraStruct
from .degen import DecompCert
from .errors import ParseError
from .scalar import format_scalar, parse_scalar
from .tensor3 import Q, QEPS, Matrix, RestrictionOperator, Tensor3

FIELDS = (Q, QEPS)


def dumps(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _loads(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc


def _field(d: dict) -> str:
    f = d.get("field", Q)
    if f not in FIELDS:
        raise ParseError(f"unknown field {f!r}")
    return f


# -- tensors -----------------------------------------------------------------

def tensor_to_dict(T: Tensor3) -> dict:
    return {
        "dims": list(T.dims),
        "field": T.field,
        "entries": [{"i": i, "j": j, "k": k, "v": format_scalar(v)} for (i, j, k), v in T.items()],
    }


def tensor_from_dict(d: dict) -> Tensor3:
    try:
        fld = _field(d)
        entries = {}
        for e in d["entries"]:
            key = (int(e["i"]), int(e["j"]), int(e["k"]))
            if key in entries:
                raise ParseError(f"duplicate entry {key}")
            entries[key] = parse_scalar(e["v"], fld)
        return Tensor3(d["dims"], entries, fld)
    except (KeyError, TypeError) as exc:
        raise ParseError(f"malformed tensor file: {exc}") from exc
    except ValueError as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"malformed tensor file: {exc}") from exc


def dump_tensor(T: Tensor3) -> str:
    return dumps(tensor_to_dict(T))


def load_tensor(text: str) -> Tensor3:
    return tensor_from_dict(_loads(text))


def tensor_fingerprint(T: Tensor3) -> str:
    return hashlib.sha256(dump_tensor(T).encode()).hexdigest()[:16]


# -- operators ---------------------------------------------------------------

def _matrix_rows(M: Matrix) -> list:
    return [[format_scalar(v) for v in r] for r in M.entries]


def operator_to_dict(op: RestrictionOperator) -> dict:
    return {"field": op.field, "f1": _matrix_rows(op.f1), "f2": _matrix_rows(op.f2), "f3": _matrix_rows(op.f3)}


def _matrix_from_rows(rows, fld) -> Matrix:
    if not rows:
        raise ParseError("empty matrix")
    return Matrix([[parse_scalar(v, fld) for v in r] for r in rows], fld)


def operator_from_dict(d: dict) -> RestrictionOperator:
    try:
        fld = _field(d)
        return RestrictionOperator(*(_matrix_from_rows(d[k], fld) for k in ("f1", "f2", "f3")))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"malformed operator file: {exc}") from exc


def dump_operator(op: RestrictionOperator) -> str:
    return dumps(operator_to_dict(op))


def load_operator(text: str) -> RestrictionOperator:
    return operator_from_dict(_loads(text))


# -- algebras ----------------------------------------------------------------

def algebra_to_dict(A: AlgebraStruct) -> dict:
    return {
        "dim": A.dim,
        "basis": list(A.basis_names),
        "table": [[[format_scalar(c) for c in vec] for vec in row] for row in A.table],
    }


def algebra_from_dict(d: dict) -> AlgebraStruct:
    try:
        table = [[[parse_scalar(c, Q) for c in vec] for vec in row] for row in d["table"]]
        A = AlgebraStruct(table, d.get("basis"))
        if "dim" in d and int(d["dim"]) != A.dim:
            raise ParseError(f"dim {d['dim']} does not match table size {A.dim}")
        return A
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"malformed algebra file: {exc}") from exc


def dump_algebra(A: AlgebraStruct) -> str:
    return dumps(algebra_to_dict(A))


def load_algebra(text: str) -> AlgebraStruct:
    return algebra_from_dict(_loads(text))


# -- certificates ------------------------------------------------------------

def cert_to_dict(cert: DecompCert, target: str = "") -> dict:
    return {
        "target": target or cert.description,
        "r": cert.r,
        "terms": [{f"v{m + 1}": [format_scalar(x) for x in t[m]] for m in range(3)} for t in cert.terms],
    }


def cert_from_dict(d: dict, target_dims=None) -> DecompCert:
    try:
        terms = []
        for t in d["terms"]:
            terms.append(tuple(tuple(parse_scalar(x) for x in t[f"v{m}"]) for m in (1, 2, 3)))
        if not terms:
            raise ParseError("certificate has no terms")
        if int(d.get("r", len(terms))) != len(terms):
            raise ParseError(f"r = {d['r']} but {len(terms)} terms given")
        dims = tuple(target_dims) if target_dims is not None else tuple(len(v) for v in terms[0])
        return DecompCert(tuple(terms), dims, str(d.get("target", "")))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(f"malformed certificate file: {exc}") from exc


def dump_cert(cert: DecompCert, target: str = "") -> str:
    return dumps(cert_to_dict(cert, target))


def load_cert(text: str) -> DecompCert:
    return cert_from_dict(_loads(text))


def read_text(path) -> str:
    return Path(path).read_text()


def write_text(path, text: str) -> None:
    Path(path).write_text(text)
