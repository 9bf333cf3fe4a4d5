"""Exact Gaussian rationals Q(i).

Coefficients throughout the package are ``int``, ``Fraction`` or :class:`QI`.
All three interoperate, so linear algebra code can stay duck-typed.
"""

from __future__ import annotations

import re
from fractions import Fraction
from numbers import Rational
from typing import Union

Scalar = Union[int, Fraction, "QI"]


class QI:
    """An element ``re + im*i`` with exact rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @staticmethod
    def coerce(x) -> QI:
        if isinstance(x, QI):
            return x
        if isinstance(x, (int, Rational)):
            return QI(x)
        if isinstance(x, str):
            return parse_scalar(x)
        raise TypeError(f"cannot coerce {x!r} to QI")

    def __repr__(self):
        return f"QI({format_scalar(self)!r})"

    def __str__(self):
        return format_scalar(self)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if isinstance(other, QI):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Rational)):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __neg__(self):
        return QI(-self.re, -self.im)

    def __pos__(self):
        return self

    def __add__(self, other):
        if isinstance(other, QI):
            return QI(self.re + other.re, self.im + other.im)
        if isinstance(other, (int, Rational)):
            return QI(self.re + other, self.im)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, QI):
            return QI(self.re - other.re, self.im - other.im)
        if isinstance(other, (int, Rational)):
            return QI(self.re - other, self.im)
        return NotImplemented

    def __rsub__(self, other):
        if isinstance(other, (int, Rational)):
            return QI(other - self.re, -self.im)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, QI):
            return QI(self.re * other.re - self.im * other.im,
                      self.re * other.im + self.im * other.re)
        if isinstance(other, (int, Rational)):
            return QI(self.re * other, self.im * other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Rational)):
            if other == 0:
                raise ZeroDivisionError("QI division by zero")
            return QI(self.re / other, self.im / other)
        if isinstance(other, QI):
            n = other.re * other.re + other.im * other.im
            if n == 0:
                raise ZeroDivisionError("QI division by zero")
            return self * QI(other.re / n, -other.im / n)
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Rational)):
            return QI(other) / self
        return NotImplemented

    def conjugate(self) -> QI:
        return QI(self.re, -self.im)


I = QI(0, 1)


def simplify(x):
    """Demote a QI with zero imaginary part to ``Fraction`` (or ``int``)."""
    if isinstance(x, QI):
        if x.im:
            return x
        x = x.re
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x.numerator)
    return x


def _fmt_q(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_scalar(x) -> str:
    """Serialize as ``"a/b+c/d*i"``; the imaginary part is omitted when zero."""
    x = QI.coerce(x)
    if x.im == 0:
        return _fmt_q(x.re)
    im = _fmt_q(abs(x.im))
    sign = "-" if x.im < 0 else "+"
    if x.re == 0:
        return f"{'-' if x.im < 0 else ''}{im}*i"
    return f"{_fmt_q(x.re)}{sign}{im}*i"


def _parse_rational(txt: str) -> Fraction:
    if not re.fullmatch(r"[+-]?\d+(?:/\d+)?", txt):
        raise ValueError(txt)
    return Fraction(txt)


def parse_scalar(text) -> Scalar:
    """Inverse of :func:`format_scalar`. Also accepts plain ints and ``"i"``."""
    if isinstance(text, (int, Rational, QI)):
        return simplify(text)
    s = str(text).replace(" ", "")
    try:
        if not s.endswith("i"):
            return simplify(_parse_rational(s))
        body = s[:-1]
        if body.endswith("*"):
            body = body[:-1]
        cut = max(body.rfind("+"), body.rfind("-"))
        if cut > 0:
            re_txt, im_txt = body[:cut], body[cut:]
        else:
            re_txt, im_txt = "0", body
        if im_txt in ("", "+"):
            im_txt = "1"
        elif im_txt == "-":
            im_txt = "-1"
        return simplify(QI(_parse_rational(re_txt), _parse_rational(im_txt)))
    except ValueError:
        raise ValueError(f"malformed Q(i) scalar: {text!r}") from None
