"""Exact scalars: rationals and rational functions in an infinitesimal ``e``.

Rationals are plain :class:`fractions.Fraction`.  An :class:`EpsScalar` is a
ratio ``num/den`` of polynomials in ``e`` with rational coefficients, kept in
a canonical form:

* ``gcd(num, den) == 1``;
* the lowest nonzero coefficient of ``den`` is 1 (so ``den(0) == 1`` whenever
  ``den(0) != 0``);
* zero is ``0/1``.

Polynomials are stored dense, as tuples of coefficients indexed by exponent,
with no trailing zeros.  Poles at ``e = 0`` live in the denominator; there
are no negative exponents in storage.

String grammar (used by every file format)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | '+' unary | power
    power  := atom ('^' ['-'] INT)?
    atom   := INT | 'e' | '(' expr ')'

Whitespace is ignored.  ``"(1 - 2*e)/e^3"`` and ``"e^-3 - 2*e^-2"`` denote
the same value.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Union

from .errors import DivisionByZero, NotRegularAtZero, ParseError

Rational = Fraction
Poly = tuple  # tuple[Fraction, ...], no trailing zeros

_ZERO: Poly = ()
_ONE: Poly = (Fraction(1),)


def _trim(coeffs) -> Poly:
    c = list(coeffs)
    while c and c[-1] == 0:
        c.pop()
    return tuple(Fraction(x) for x in c)


def _low(p: Poly) -> int:
    for i, c in enumerate(p):
        if c:
            return i
    return -1


def _is_monomial(p: Poly) -> bool:
    return len(p) > 0 and _low(p) == len(p) - 1


def _padd(a: Poly, b: Poly) -> Poly:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] += c
    return _trim(out)


def _pneg(a: Poly) -> Poly:
    return tuple(-c for c in a)


def _pscale(a: Poly, s: Fraction) -> Poly:
    if s == 0:
        return _ZERO
    return tuple(c * s for c in a)


def _pmul(a: Poly, b: Poly) -> Poly:
    if not a or not b:
        return _ZERO
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return _trim(out)


def _pshift_down(a: Poly, k: int) -> Poly:
    return a[k:]


def _pdivmod(a: Poly, b: Poly) -> tuple[Poly, Poly]:
    if not b:
        raise DivisionByZero("polynomial division by zero")
    r = list(a)
    db = len(b) - 1
    lead = b[-1]
    if len(r) <= db:
        return _ZERO, _trim(r)
    q = [Fraction(0)] * (len(r) - db)
    for i in range(len(r) - 1, db - 1, -1):
        c = r[i]
        if c:
            f = c / lead
            q[i - db] = f
            for j in range(db + 1):
                r[i - db + j] -= f * b[j]
    return _trim(q), _trim(r[:db])


def _pmonic(a: Poly) -> Poly:
    return _pscale(a, 1 / a[-1])


def _pgcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd; ``()`` only when both inputs are zero."""
    if not a:
        return _pmonic(b) if b else _ZERO
    if not b:
        return _pmonic(a)
    # e^k against anything: the gcd is a power of e
    if _is_monomial(a):
        return (Fraction(0),) * min(_low(a), _low(b)) + _ONE
    if _is_monomial(b):
        return (Fraction(0),) * min(_low(a), _low(b)) + _ONE
    a, b = _pmonic(a), _pmonic(b)
    while b:
        _, r = _pdivmod(a, b)
        a, b = b, (_pmonic(r) if r else _ZERO)
    return a


def _peval(p: Poly, t: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(p):
        acc = acc * t + c
    return acc


class EpsScalar:
    """An element of Q(e) in canonical form.  Immutable and hashable."""

    __slots__ = ("num", "den")

    def __init__(self, num=(), den=(1,)):
        num = _trim(num)
        den = _trim(den)
        if not den:
            raise DivisionByZero("zero denominator")
        if not num:
            object.__setattr__(self, "num", _ZERO)
            object.__setattr__(self, "den", _ONE)
            return
        if _is_monomial(den):
            k = min(_low(num), len(den) - 1)
            num = _pshift_down(num, k)
            s = den[-1]
            den = (Fraction(0),) * (len(den) - 1 - k) + _ONE
            if s != 1:
                num = _pscale(num, 1 / s)
        else:
            g = _pgcd(num, den)
            if len(g) > 1:
                num, _ = _pdivmod(num, g)
                den, _ = _pdivmod(den, g)
            s = den[_low(den)]
            if s != 1:
                num = _pscale(num, 1 / s)
                den = _pscale(den, 1 / s)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, name, value):
        raise AttributeError("EpsScalar is immutable")

    # -- constructors -----------------------------------------------------
    @classmethod
    def const(cls, x) -> "EpsScalar":
        x = Fraction(x)
        return cls((x,) if x else ())

    @classmethod
    def eps(cls, k: int = 1, coeff=1) -> "EpsScalar":
        """``coeff * e**k`` for any integer ``k``."""
        c = Fraction(coeff)
        if k >= 0:
            return cls((Fraction(0),) * k + (c,))
        return cls((c,), (Fraction(0),) * (-k) + _ONE)

    @classmethod
    def parse(cls, text: str) -> "EpsScalar":
        return _Parser(text).parse()

    # -- queries ----------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.num

    def is_constant(self) -> bool:
        return len(self.num) <= 1 and self.den == _ONE

    def valuation(self) -> Union[int, float]:
        if not self.num:
            return math.inf
        return _low(self.num) - _low(self.den)

    def eval_at_zero(self) -> Fraction:
        v = self.valuation()
        if v < 0:
            raise NotRegularAtZero(f"{self} has a pole of order {-v} at e=0")
        if v > 0:
            return Fraction(0)
        return self.num[0] / self.den[0]

    def __call__(self, t) -> Fraction:
        t = Fraction(t)
        d = _peval(self.den, t)
        if d == 0:
            raise DivisionByZero(f"denominator of {self} vanishes at {t}")
        return _peval(self.num, t) / d

    def to_rational(self) -> Fraction:
        if not self.is_constant():
            raise ValueError(f"{self} is not a constant")
        return self.num[0] if self.num else Fraction(0)

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        if not other.num:
            return self
        if not self.num:
            return other
        if self.den == other.den:
            return EpsScalar(_padd(self.num, other.num), self.den)
        return EpsScalar(
            _padd(_pmul(self.num, other.den), _pmul(other.num, self.den)),
            _pmul(self.den, other.den),
        )

    __radd__ = __add__

    def __neg__(self):
        return EpsScalar._raw(_pneg(self.num), self.den)

    def __pos__(self):
        return self

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return other + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        if not self.num or not other.num:
            return EPS_ZERO
        if other.is_constant():
            return EpsScalar._raw(_pscale(self.num, other.num[0]), self.den)
        if self.is_constant():
            return EpsScalar._raw(_pscale(other.num, self.num[0]), other.den)
        return EpsScalar(_pmul(self.num, other.num), _pmul(self.den, other.den))

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        if not other.num:
            raise DivisionByZero(f"division of {self} by zero")
        return EpsScalar(_pmul(self.num, other.den), _pmul(self.den, other.num))

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return other / self

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            if not self.num:
                raise DivisionByZero("zero to a negative power")
            base = EpsScalar(self.den, self.num)
            k = -k
        else:
            base = self
        out = EPS_ONE
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    # -- comparison -------------------------------------------------------
    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return other
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        if self.den == _ONE and len(self.num) <= 1:
            return hash(self.num[0] if self.num else Fraction(0))
        return hash((self.num, self.den))

    def __bool__(self):
        return bool(self.num)

    def __repr__(self):
        return f"EpsScalar({str(self)!r})"

    def __str__(self):
        ns = format_poly(self.num)
        if self.den == _ONE:
            return ns
        if sum(1 for c in self.num if c) > 1:
            ns = f"({ns})"
        ds = format_poly(self.den)
        if sum(1 for c in self.den if c) > 1:
            ds = f"({ds})"
        return f"{ns}/{ds}"

    @classmethod
    def _raw(cls, num: Poly, den: Poly) -> "EpsScalar":
        # caller guarantees canonical form
        obj = object.__new__(cls)
        object.__setattr__(obj, "num", num)
        object.__setattr__(obj, "den", den)
        return obj


EPS_ZERO = EpsScalar()
EPS_ONE = EpsScalar((1,))
EPS = EpsScalar.eps(1)


def _coerce(x):
    if isinstance(x, EpsScalar):
        return x
    if isinstance(x, (int, Fraction)):
        return EpsScalar.const(x)
    return NotImplemented


def to_eps(x) -> EpsScalar:
    if isinstance(x, EpsScalar):
        return x
    return EpsScalar.const(x)


def format_poly(p: Poly) -> str:
    if not p:
        return "0"
    parts = []
    for k, c in enumerate(p):
        if not c:
            continue
        neg = c < 0
        a = -c if neg else c
        if k == 0:
            body = str(a)
        else:
            mono = "e" if k == 1 else f"e^{k}"
            body = mono if a == 1 else f"{a}*{mono}"
        if not parts:
            parts.append(f"-{body}" if neg else body)
        else:
            parts.append(f" - {body}" if neg else f" + {body}")
    return "".join(parts)


# -- generic helpers over Fraction | EpsScalar ------------------------------

Scalar = Union[Fraction, EpsScalar]


def valuation(x) -> Union[int, float]:
    if isinstance(x, EpsScalar):
        return x.valuation()
    return math.inf if x == 0 else 0


def eval_at_zero(x) -> Fraction:
    if isinstance(x, EpsScalar):
        return x.eval_at_zero()
    return Fraction(x)


def eps_arith(a, b, op: str) -> EpsScalar:
    """Field operation ``op`` in {'add', 'sub', 'mul', 'div'} on two scalars."""
    a, b = to_eps(a), to_eps(b)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown op {op!r}")


def parse_scalar(text: str, field: str = "Q(eps)") -> Scalar:
    """Parse a scalar string; over ``"Q"`` the result must be constant."""
    if isinstance(text, int):
        v = EpsScalar.const(text)
    else:
        v = EpsScalar.parse(str(text))
    if field == "Q":
        if not v.is_constant():
            raise ParseError(f"{text!r} is not a rational constant")
        return v.to_rational()
    return v


def format_scalar(x) -> str:
    if isinstance(x, EpsScalar):
        return str(x)
    return str(Fraction(x))


_TOKEN = re.compile(r"\s*(?:(\d+)|(.))")


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = []
        for m in _TOKEN.finditer(text):
            if m.group(1) is not None:
                self.toks.append(("int", int(m.group(1))))
            elif m.group(2) is not None and not m.group(2).isspace():
                ch = m.group(2)
                if ch not in "e+-*/^()":
                    raise ParseError(f"unexpected character {ch!r} in {text!r}")
                self.toks.append((ch, None))
        self.pos = 0

    def _peek(self):
        return self.toks[self.pos][0] if self.pos < len(self.toks) else None

    def _take(self, kind=None):
        if self.pos >= len(self.toks):
            raise ParseError(f"unexpected end of input in {self.text!r}")
        tok = self.toks[self.pos]
        if kind is not None and tok[0] != kind:
            raise ParseError(f"expected {kind!r}, got {tok[0]!r} in {self.text!r}")
        self.pos += 1
        return tok

    def parse(self) -> EpsScalar:
        if not self.toks:
            raise ParseError("empty scalar")
        v = self._expr()
        if self.pos != len(self.toks):
            raise ParseError(f"trailing input in {self.text!r}")
        return v

    def _expr(self):
        v = self._term()
        while self._peek() in ("+", "-"):
            op = self._take()[0]
            rhs = self._term()
            v = v + rhs if op == "+" else v - rhs
        return v

    def _term(self):
        v = self._unary()
        while self._peek() in ("*", "/"):
            op = self._take()[0]
            rhs = self._unary()
            if op == "*":
                v = v * rhs
            else:
                if rhs.is_zero():
                    raise ParseError(f"division by zero in {self.text!r}")
                v = v / rhs
        return v

    def _unary(self):
        if self._peek() == "-":
            self._take()
            return -self._unary()
        if self._peek() == "+":
            self._take()
            return self._unary()
        return self._power()

    def _power(self):
        base = self._atom()
        if self._peek() == "^":
            self._take()
            sign = 1
            if self._peek() == "-":
                self._take()
                sign = -1
            _, k = self._take("int")
            if sign < 0 and base.is_zero():
                raise ParseError(f"zero to a negative power in {self.text!r}")
            return base ** (sign * k)
        return base

    def _atom(self):
        kind = self._peek()
        if kind == "int":
            return EpsScalar.const(self._take()[1])
        if kind == "e":
            self._take()
            return EPS
        if kind == "(":
            self._take()
            v = self._expr()
            self._take(")")
            return v
        raise ParseError(f"unexpected token {kind!r} in {self.text!r}")
