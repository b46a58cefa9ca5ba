import json

import pytest

from tensordegen import fileio
from tensordegen.algebra import make_cw_algebra, make_cw_tensor, make_monomial_quotient
from tensordegen.degen import certificate_operator, cw_certificate, power_certificate
from tensordegen.errors import ParseError
from tensordegen.expr import CW, CWAlg, CWEasy, Diag, Kron, Pow, materialize, parse_expr
from tensordegen.tensor3 import kron_power


def test_tensor_roundtrip_bytes():
    for T in (make_cw_tensor(3), kron_power(make_cw_tensor(1), 2), make_cw_tensor(2).promote()):
        s = fileio.dump_tensor(T)
        T2 = fileio.load_tensor(s)
        assert T2 == T and T2.field == T.field
        assert fileio.dump_tensor(T2) == s


def test_tensor_format_shape():
    d = json.loads(fileio.dump_tensor(make_cw_tensor(2)))
    assert d["dims"] == [4, 4, 4] and d["field"] == "Q"
    assert d["entries"][0] == {"i": 0, "j": 0, "k": 3, "v": "1"}
    keys = [(t["i"], t["j"], t["k"]) for t in d["entries"]]
    assert keys == sorted(keys)


def test_cert_roundtrip_bytes():
    for cert in (cw_certificate(2), power_certificate(cw_certificate(1), 2)):
        s = fileio.dump_cert(cert)
        c2 = fileio.load_cert(s)
        assert c2.terms == cert.terms
        assert fileio.dump_cert(c2) == s


def test_cert_scalars_in_grammar():
    d = json.loads(fileio.dump_cert(cw_certificate(2)))
    assert d["target"] == "cw:q=2" and d["r"] == 4
    assert d["terms"][3]["v1"][0] == "(1 - 2*e)/e^3"


def test_operator_and_algebra_roundtrip():
    op = certificate_operator(cw_certificate(2))
    s = fileio.dump_operator(op)
    assert fileio.dump_operator(fileio.load_operator(s)) == s
    assert fileio.load_operator(s) == op
    for A in (make_cw_algebra(3), make_monomial_quotient(2, [(2, 0), (0, 2)])):
        s = fileio.dump_algebra(A)
        B = fileio.load_algebra(s)
        assert B == A and B.basis_names == A.basis_names
        assert fileio.dump_algebra(B) == s


@pytest.mark.parametrize("text", [
    "not json",
    '{"dims": [2, 2, 2], "field": "Q", "entries": [{"i": 0, "j": 0, "k": 0, "v": "e"}]}',
    '{"dims": [2, 2, 2], "field": "R", "entries": []}',
    '{"dims": [2, 2, 2], "entries": [{"i": 0, "j": 0, "v": "1"}]}',
    '{"dims": [2, 2, 2], "entries": [{"i": 0, "j": 0, "k": 0, "v": "1"}, {"i": 0, "j": 0, "k": 0, "v": "2"}]}',
    '{"dims": [2, 2, 2], "entries": [{"i": 5, "j": 0, "k": 0, "v": "1"}]}',
])
def test_bad_tensor_files(text):
    with pytest.raises(ParseError):
        fileio.load_tensor(text)


def test_bad_cert_files():
    with pytest.raises(ParseError):
        fileio.load_cert('{"r": 2, "terms": [{"v1": ["1"], "v2": ["1"], "v3": ["1"]}]}')
    with pytest.raises(ParseError):
        fileio.load_cert('{"terms": []}')


@pytest.mark.parametrize("text, expr", [
    ("diag:n=4", Diag(4)),
    ("cw:q=2", CW(2)),
    ("cweasy:q=3", CWEasy(3)),
    ("cwalg:q=2", CWAlg(2)),
    ("pow:cweasy:q=2:n=3", Pow(CWEasy(2), 3)),
    ("pow:pow:cw:q=1:n=2:n=2", Pow(Pow(CW(1), 2), 2)),
])
def test_expression_grammar(text, expr):
    assert parse_expr(text) == expr
    assert str(expr) == text


@pytest.mark.parametrize("text", ["", "cw", "cw:n=2", "foo:q=2", "pow:cw:q=2", "diag:n=x"])
def test_expression_errors(text):
    with pytest.raises(ParseError):
        parse_expr(text)


def test_materialize_kron():
    assert materialize(Kron(CW(1), Diag(2))).dims == (6, 6, 6)


def test_fingerprint_stable():
    a = fileio.tensor_fingerprint(make_cw_tensor(2))
    assert a == fileio.tensor_fingerprint(fileio.load_tensor(fileio.dump_tensor(make_cw_tensor(2))))
    assert a != fileio.tensor_fingerprint(make_cw_tensor(3))
