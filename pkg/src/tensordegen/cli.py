"""Command-line front-end.

Exit codes: 0 success, 1 verification failed, 2 parse or usage error,
3 budget exceeded.  Every randomized step is driven by ``--seed``.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path
from typing import Optional

from . import fileio
from .algebra import (
    BilinearMap,
    check_properties,
    find_identity,
    make_cw_algebra,
    make_diag_algebra,
    make_monomial_quotient,
)
from .bounds import (
    FF_BUDGET,
    ff_evidence_node,
    m_exhaustive_ff,
    m_upper,
    subspace_restriction_bound,
    substitution_bound,
    upper_bound_from_cert,
    witness_schedule,
)
from .degen import (
    DecompCert,
    cw_certificate,
    cw_normalization_inputs,
    cw_smoothing_check,
    diag_certificate,
    normalize_unital_degeneration,
    power_certificate,
    unitalize,
    verify_decomposition,
    verify_degeneration,
    verify_restriction,
)
from .errors import (
    BadPrime,
    BudgetExceeded,
    DimensionOverflow,
    InvalidParameter,
    ParseError,
    TensorDegenError,
)
from .expr import Literal, builtin_certificate, materialize, parse_expr
from .scalar import format_scalar, parse_scalar
from .tensor3 import MAX_ENTRIES, Q, Tensor3, find_binding_covectors, flattening_rank, is_concise

EXIT_OK, EXIT_FAILED, EXIT_PARSE, EXIT_BUDGET = 0, 1, 2, 3

VERBS = ("gen", "info", "verify-decomp", "verify-degen", "verify-restriction", "unitalize",
         "normalize", "smooth-check", "bound", "m-search", "power")


class Outcome:
    """What a verb produced: a JSON report, a text summary, and whether it passed."""

    def __init__(self, report: dict, text: str, ok: bool = True, artifact: Optional[str] = None):
        self.report = report
        self.text = text
        self.ok = ok
        self.artifact = artifact


# -- input resolution --------------------------------------------------------

def _looks_like_file(spec: str) -> bool:
    return spec.endswith(".json") or Path(spec).is_file()


def _read_json_file(path: str) -> str:
    try:
        return fileio.read_text(path)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc


def resolve_expr(spec: str, args):
    """A named-constructor expression, or a tensor file wrapped as a literal."""
    if _looks_like_file(spec):
        return Literal(fileio.load_tensor(_read_json_file(spec)), Path(spec).name)
    return parse_expr(spec)


def resolve_tensor(spec: str, args) -> tuple:
    expr = resolve_expr(spec, args)
    return expr, materialize(expr, args.max_entries)


def _dims_to_param(dims, offset: int, name: str) -> int:
    n = dims[0]
    if tuple(dims) != (n, n, n) or n - offset < 1:
        raise InvalidParameter(f"cannot infer {name} from target format {tuple(dims)}")
    return n - offset


def resolve_cert(spec: str, target: Optional[Tensor3], target_expr=None) -> DecompCert:
    """``builtin:cw`` / ``builtin:diag`` infer their parameter from the target."""
    if spec.startswith("builtin:"):
        name = spec[len("builtin:"):]
        if name == "cw":
            if target is None:
                raise InvalidParameter("builtin:cw needs a target to infer q")
            return cw_certificate(_dims_to_param(target.dims, 2, "q"))
        if name == "diag":
            if target is None:
                raise InvalidParameter("builtin:diag needs a target to infer n")
            return diag_certificate(_dims_to_param(target.dims, 0, "n"))
        if name == "":
            if target_expr is None or isinstance(target_expr, Literal):
                raise InvalidParameter("builtin: without a name needs a named target expression")
            expr = target_expr
        else:
            expr = parse_expr(name)
        cert = builtin_certificate(expr)
        if cert is None:
            raise InvalidParameter(f"no builtin certificate for {expr}")
        return cert
    text = _read_json_file(spec)
    cert = fileio.load_cert(text)
    return cert


def _cert_target_spec(spec: str) -> Optional[str]:
    """Target recorded inside a certificate file, resolved relative to it."""
    if spec.startswith("builtin:"):
        return None
    d = json.loads(_read_json_file(spec))
    tgt = str(d.get("target", ""))
    if not tgt:
        return None
    if tgt.endswith(".json"):
        p = Path(tgt)
        if not p.is_absolute():
            p = Path(spec).parent / p
        return str(p)
    return tgt


def parse_vector(text: str, field: str = Q) -> tuple:
    parts = [s for s in text.replace(";", ",").split(",") if s.strip()]
    if not parts:
        raise ParseError(f"empty vector {text!r}")
    return tuple(parse_scalar(s, field) for s in parts)


def parse_vectors(text: str) -> list:
    return [parse_vector(chunk) for chunk in text.split(";") if chunk.strip()]


def _val(v):
    return "inf" if v == math.inf else ("-inf" if v == -math.inf else v)


# -- verbs -------------------------------------------------------------------

def _gen_algebra(spec: str):
    head, _, rest = spec.partition(":")
    params = dict(p.split("=", 1) for p in rest.split(":") if p) if rest else {}
    try:
        if head in ("cw", "cwalg"):
            return make_cw_algebra(int(params["q"]))
        if head == "diag":
            return make_diag_algebra(int(params["n"]))
        if head == "monomial":
            gens = json.loads(params["gens"])
            return make_monomial_quotient(int(params["d"]), gens)
    except (KeyError, ValueError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot parse algebra spec {spec!r}: {exc}") from exc
    raise ParseError(f"unknown algebra constructor {head!r}")


def cmd_gen(args) -> Outcome:
    if args.algebra:
        A = _gen_algebra(args.spec)
        text = fileio.dump_algebra(A)
        return Outcome({"kind": "algebra", "spec": args.spec, "dim": A.dim}, f"algebra {args.spec}: dim {A.dim}\n",
                       artifact=text)
    if args.cert:
        expr = parse_expr(args.spec)
        cert = builtin_certificate(expr)
        if cert is None:
            raise InvalidParameter(f"no builtin certificate for {expr}")
        text = fileio.dump_cert(cert, str(expr))
        return Outcome({"kind": "certificate", "spec": str(expr), "r": cert.r},
                       f"certificate for {expr}: r={cert.r}\n", artifact=text)
    expr, T = resolve_tensor(args.spec, args)
    text = fileio.dump_tensor(T)
    rep = {"kind": "tensor", "spec": str(expr), "dims": list(T.dims), "nnz": T.nnz,
           "fingerprint": fileio.tensor_fingerprint(T)}
    return Outcome(rep, f"tensor {expr}: format {list(T.dims)}, {T.nnz} nonzero entries\n", artifact=text)


def cmd_info(args) -> Outcome:
    spec = args.spec
    if _looks_like_file(spec):
        d = json.loads(_read_json_file(spec))
        if "table" in d:
            A = fileio.algebra_from_dict(d)
            props = check_properties(A)
            e = find_identity(A)
            rep = {"kind": "algebra", "dim": A.dim, "basis": list(A.basis_names),
                   "properties": props, "identity": None if e is None else [format_scalar(x) for x in e]}
            lines = [f"algebra: dim {A.dim}, basis {', '.join(A.basis_names)}"]
            lines += [f"  {k}: {v}" for k, v in sorted(props.items())]
            return Outcome(rep, "\n".join(lines) + "\n")
        if "terms" in d:
            cert = fileio.cert_from_dict(d)
            rep = {"kind": "certificate", "r": cert.r, "format": list(cert.target_dims), "target": d.get("target")}
            return Outcome(rep, f"certificate: r={cert.r}, format {list(cert.target_dims)}\n")
        if "f1" in d:
            op = fileio.operator_from_dict(d)
            rep = {"kind": "operator", "field": op.field, "source": list(op.source_dims), "target": list(op.target_dims)}
            return Outcome(rep, f"operator over {op.field}: {list(op.source_dims)} -> {list(op.target_dims)}\n")
    expr, T = resolve_tensor(spec, args)
    flats = [flattening_rank(T, m) for m in (1, 2, 3)]
    rep = {"kind": "tensor", "spec": str(expr), "dims": list(T.dims), "field": T.field, "nnz": T.nnz,
           "flattening_ranks": flats, "concise": is_concise(T), "fingerprint": fileio.tensor_fingerprint(T)}
    text = (f"tensor {expr}: format {list(T.dims)} over {T.field}, {T.nnz} nonzero entries\n"
            f"  flattening ranks {flats}, concise: {rep['concise']}\n")
    return Outcome(rep, text)


def cmd_verify_decomp(args) -> Outcome:
    target_spec = args.target or _cert_target_spec(args.cert)
    if not target_spec:
        raise InvalidParameter("no target given and the certificate does not name one")
    expr, T = resolve_tensor(target_spec, args)
    cert = resolve_cert(args.cert, T, expr)
    rep = verify_decomposition(cert, T)
    d = rep.to_dict()
    d.update({"r": cert.r, "target": str(expr)})
    status = "valid" if rep.valid else "INVALID"
    text = f"decomposition of {expr}: {status}, r={cert.r}, min error valuation {_val(rep.min_error_valuation)}\n"
    if rep.first_mismatch:
        text += f"  first mismatch: {rep.first_mismatch}\n"
    return Outcome(d, text, rep.valid)


def _load_op(path: str):
    return fileio.load_operator(_read_json_file(path))


def cmd_verify_degen(args) -> Outcome:
    op = _load_op(args.op)
    _, T = resolve_tensor(args.source, args)
    _, T2 = resolve_tensor(args.target, args)
    rep = verify_degeneration(op, T, T2)
    d = rep.to_dict()
    status = "valid" if rep.valid else "INVALID"
    text = f"degeneration: {status}, min error valuation {_val(rep.min_error_valuation)}\n"
    if rep.first_mismatch:
        text += f"  first mismatch: {rep.first_mismatch}\n"
    return Outcome(d, text, rep.valid)


def cmd_verify_restriction(args) -> Outcome:
    op = _load_op(args.op)
    _, T = resolve_tensor(args.source, args)
    _, T2 = resolve_tensor(args.target, args)
    ok = verify_restriction(op, T, T2)
    return Outcome({"valid": ok}, f"restriction: {'valid' if ok else 'INVALID'}\n", ok)


def cmd_unitalize(args) -> Outcome:
    expr, T = resolve_tensor(args.tensor, args)
    if args.alpha1 and args.alpha2:
        a1, a2 = parse_vector(args.alpha1), parse_vector(args.alpha2)
    elif args.alpha1 or args.alpha2:
        raise InvalidParameter("give both --alpha1 and --alpha2, or neither")
    else:
        found = find_binding_covectors(T, seed=args.seed)
        if found is None:
            return Outcome({"binding": False, "tensor": str(expr)}, f"{expr}: no binding covectors found\n", False)
        a1, a2 = found
    res = unitalize(T, a1, a2)
    rep = {
        "tensor": str(expr),
        "alpha1": [format_scalar(x) for x in a1],
        "alpha2": [format_scalar(x) for x in a2],
        "identity": [format_scalar(x) for x in res.identity],
        "fingerprint": fileio.tensor_fingerprint(res.phi.tensor),
    }
    text = f"unital map from {expr}: identity ({', '.join(rep['identity'])})\n"
    return Outcome(rep, text, artifact=fileio.dump_tensor(res.phi.tensor))


def cmd_normalize(args) -> Outcome:
    if args.q is not None:
        A, phi, F, G, H = cw_normalization_inputs(args.q)
        label = f"k^{args.q + 2} -> A_CW({args.q})"
    else:
        if not (args.algebra and args.map and args.op):
            raise InvalidParameter("normalize needs --q, or all of --algebra, --map and --op")
        A = fileio.load_algebra(_read_json_file(args.algebra))
        phi_t = fileio.load_tensor(_read_json_file(args.map))
        phi = BilinearMap(phi_t, None)
        op = _load_op(args.op)
        F, G, H = op.f1.T, op.f2.T, op.f3
        label = f"{args.algebra} -> {args.map}"
    res = normalize_unital_degeneration(A, phi, F, G, H)
    rows = [[format_scalar(x) for x in r] for r in res.S.entries]
    rep = {"subject": label, "valid": True, "S": rows,
           "Q_identity_mod_eps": True, "P_identity_mod_eps": True}
    text = f"normalization {label}: sandwich form valid\n  S =\n" + "".join(f"    [{', '.join(r)}]\n" for r in rows)
    return Outcome(rep, text)


def cmd_smooth_check(args) -> Outcome:
    rep = cw_smoothing_check(args.q)
    d = rep.to_dict()
    d["q"] = args.q
    status = "valid" if rep.valid else "INVALID"
    return Outcome(d, f"smoothing matrix for A_CW({args.q}): {status}\n", rep.valid)


def cmd_bound(args) -> Outcome:
    expr = resolve_expr(args.expr, args)
    if args.subspace:
        T = materialize(expr, args.max_entries)
        report = subspace_restriction_bound(T, parse_vectors(args.subspace), args.inner, args.assert_minimal)
    else:
        report = substitution_bound(expr, args.mode, args.seed, args.witnesses, args.max_entries)
    if args.cert:
        T = materialize(expr, args.max_entries)
        cert = resolve_cert(args.cert, T, expr)
        report = upper_bound_from_cert(expr, cert, report, args.max_entries)
    for p in args.prime or []:
        T = materialize(expr, args.max_entries)
        report.evidence.append(ff_evidence_node(T, p, str(expr), budget=args.ff_budget, jobs=args.jobs))
    return Outcome(report.to_dict(), report.to_text())


def cmd_m_search(args) -> Outcome:
    expr, T = resolve_tensor(args.expr, args)
    rep = {"subject": str(expr), "dims": list(T.dims)}
    lines = [f"m-search on {expr} (format {list(T.dims)})"]
    best = None
    for kind, u in witness_schedule(expr, T, args.seed, args.witnesses):
        w = m_upper(T, u)
        if best is None or w.rank_value < best[1].rank_value:
            best = (kind, w)
    rep["witness"] = {"rank": best[1].rank_value, "u": [format_scalar(x) for x in best[1].u], "schedule": best[0],
                      "grade": "witness"}
    lines.append(f"  witness ({best[0]}): m <= {best[1].rank_value}")
    ff = []
    for p in args.prime or []:
        v = m_exhaustive_ff(T, p, budget=args.ff_budget, jobs=args.jobs)
        ff.append({"p": p, "min_rank": v, "grade": "finite-field-evidence"})
        lines.append(f"  GF({p}) exhaustive: min rank {v} (evidence)")
    rep["finite_field"] = ff
    return Outcome(rep, "\n".join(lines) + "\n")


def cmd_power(args) -> Outcome:
    target = None
    expr = None
    if args.target:
        expr, target = resolve_tensor(args.target, args)
    base_expr, base_target = resolve_tensor(args.base, args) if args.base else (None, None)
    cert = resolve_cert(args.cert, base_target, base_expr)
    pc = power_certificate(cert, args.n)
    rep = {"r": pc.r, "n": args.n, "format": list(pc.target_dims)}
    text = f"power certificate: n={args.n}, r={pc.r}, format {list(pc.target_dims)}\n"
    ok = True
    if target is not None:
        v = verify_decomposition(pc, target)
        rep["verification"] = v.to_dict()
        ok = v.valid
        text += f"  against {expr}: {'valid' if ok else 'INVALID'}, min error valuation {_val(v.min_error_valuation)}\n"
    desc = str(expr) if expr is not None else pc.description
    return Outcome(rep, text, ok, artifact=fileio.dump_cert(pc, desc))


HANDLERS = {
    "gen": cmd_gen,
    "info": cmd_info,
    "verify-decomp": cmd_verify_decomp,
    "verify-degen": cmd_verify_degen,
    "verify-restriction": cmd_verify_restriction,
    "unitalize": cmd_unitalize,
    "normalize": cmd_normalize,
    "smooth-check": cmd_smooth_check,
    "bound": cmd_bound,
    "m-search": cmd_m_search,
    "power": cmd_power,
}


# -- argument parsing --------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for every randomized schedule")
    common.add_argument("--jobs", type=int, default=1, help="worker threads for finite-field sweeps")
    common.add_argument("--format", choices=("json", "text"), default="text", help="standard output format")
    common.add_argument("--report", help="write the JSON report to this file")
    common.add_argument("--max-entries", type=int, default=MAX_ENTRIES, help="materialized tensor size budget")
    common.add_argument("--ff-budget", type=int, default=FF_BUDGET, help="finite-field slice-rank budget")

    ap = argparse.ArgumentParser(prog="tensordegen", description="Exact border-rank certificates and bounds.")
    sub = ap.add_subparsers(dest="verb", required=True, metavar="VERB")

    p = sub.add_parser("gen", parents=[common], help="materialize a named tensor, algebra or builtin certificate")
    p.add_argument("spec")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--algebra", action="store_true", help="spec names an algebra: cw:q=2, diag:n=3, monomial:d=2:gens=[[2,0],[0,2]]")
    g.add_argument("--cert", action="store_true", help="emit the builtin certificate for the expression")
    p.add_argument("-o", "--output", help="write the generated file here instead of standard output")

    p = sub.add_parser("info", parents=[common], help="summarize a tensor, algebra, operator or certificate")
    p.add_argument("spec")
    p.add_argument("-o", "--output", dest="report_alias")

    p = sub.add_parser("verify-decomp", parents=[common], help="check an approximate decomposition")
    p.add_argument("--cert", required=True, help="certificate file or builtin:cw, builtin:diag, builtin:<expr>")
    p.add_argument("--target", help="tensor file or expression (default: the certificate's target)")
    p.add_argument("-o", "--output", dest="report_alias")

    for verb, helptext in (("verify-degen", "check T' + O(e) = op(T)"), ("verify-restriction", "check T' = op(T) exactly")):
        p = sub.add_parser(verb, parents=[common], help=helptext)
        p.add_argument("--op", required=True, help="operator file")
        p.add_argument("--source", required=True, help="tensor file or expression")
        p.add_argument("--target", required=True, help="tensor file or expression")
        p.add_argument("-o", "--output", dest="report_alias")

    p = sub.add_parser("unitalize", parents=[common], help="equivalent unital map of a binding tensor")
    p.add_argument("--tensor", required=True)
    p.add_argument("--alpha1", help="comma-separated covector on factor 1")
    p.add_argument("--alpha2", help="comma-separated covector on factor 2")
    p.add_argument("-o", "--output", help="write the unital map's tensor here")

    p = sub.add_parser("normalize", parents=[common], help="run the sandwich normalization of a unital degeneration")
    p.add_argument("--q", type=int, help="use k^(q+2) degenerating to A_CW(q)")
    p.add_argument("--algebra", help="algebra file for A")
    p.add_argument("--map", help="tensor file of the unital map phi")
    p.add_argument("--op", help="operator file holding (F^T, G^T, H)")
    p.add_argument("-o", "--output", dest="report_alias")

    p = sub.add_parser("smooth-check", parents=[common], help="verify the point matrix smoothing A_CW(q)")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("-o", "--output", dest="report_alias")

    p = sub.add_parser("bound", parents=[common], help="border-rank bounds with a derivation tree")
    p.add_argument("--expr", required=True, help="expression or tensor file")
    p.add_argument("--mode", type=int, default=1, help="slicing factor (1, 2 or 3)")
    p.add_argument("--witnesses", type=int, default=100, help="seeded random slice witnesses")
    p.add_argument("--cert", help="certificate for an upper bound (file or builtin:...)")
    p.add_argument("--prime", type=int, action="append", help="attach a finite-field sweep (repeatable)")
    p.add_argument("--subspace", help="basis of U' as 'a,b,c;d,e,f'")
    p.add_argument("--inner", type=int, help="lower bound on the restriction to U'")
    p.add_argument("--assert-minimal", action="store_true", help="vouch that U' is a minimizing subspace")
    p.add_argument("-o", "--output", dest="report_alias")

    p = sub.add_parser("m-search", parents=[common], help="witnesses and finite-field evidence for m")
    p.add_argument("--expr", required=True)
    p.add_argument("--prime", type=int, action="append")
    p.add_argument("--witnesses", type=int, default=100)
    p.add_argument("-o", "--output", dest="report_alias")

    p = sub.add_parser("power", parents=[common], help="Kronecker power of a certificate")
    p.add_argument("--cert", required=True, help="certificate file or builtin:...")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--base", help="base tensor (lets builtin:cw infer q)")
    p.add_argument("--target", help="verify the power against this tensor or expression")
    p.add_argument("-o", "--output", help="write the power certificate here")
    return ap


def _emit(outcome: Outcome, args, out) -> None:
    if outcome.artifact is not None and getattr(args, "output", None):
        fileio.write_text(args.output, outcome.artifact)
    report_path = args.report or getattr(args, "report_alias", None)
    if report_path:
        fileio.write_text(report_path, fileio.dumps(outcome.report))
    if outcome.artifact is not None and not getattr(args, "output", None) and args.verb == "gen":
        out.write(outcome.artifact)
    elif args.format == "json":
        out.write(fileio.dumps(outcome.report))
    else:
        out.write(outcome.text)


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else EXIT_OK
    try:
        outcome = HANDLERS[args.verb](args)
    except (ParseError, InvalidParameter, BadPrime) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_PARSE
    except (BudgetExceeded, DimensionOverflow) as exc:
        err.write(f"budget exceeded: {exc}\n")
        return EXIT_BUDGET
    except TensorDegenError as exc:
        err.write(f"verification failed: {type(exc).__name__}: {exc}\n")
        return EXIT_FAILED
    except json.JSONDecodeError as exc:
        err.write(f"error: invalid JSON: {exc}\n")
        return EXIT_PARSE
    _emit(outcome, args, out)
    return EXIT_OK if outcome.ok else EXIT_FAILED


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
