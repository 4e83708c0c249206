"""Exact complex rationals.

``QQi`` is a Gaussian rational ``re + i*im`` with ``Fraction`` parts. Floats
are rejected on construction; use :func:`as_rational` to convert a float
through its decimal representation when that is what you mean.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational

__all__ = ["QQi", "as_rational", "as_qqi", "I"]


def as_rational(x) -> Fraction:
    """Convert ``x`` to a ``Fraction``.

    Integers, fractions and strings ("3/4", "0.7") convert exactly. Floats are
    converted through ``repr``, so ``0.7`` becomes ``7/10`` rather than the
    binary expansion of the double.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        return Fraction(repr(float(x)))
    # numpy scalars
    if hasattr(x, "item"):
        return as_rational(x.item())
    raise TypeError(f"cannot convert {type(x).__name__} to an exact rational")


class QQi:
    """Gaussian rational number with exact ``Fraction`` components."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        if isinstance(re, QQi):
            if im:
                raise TypeError("QQi(QQi, im) is ambiguous")
            self.re, self.im = re.re, re.im
            return
        if isinstance(re, (float, complex)) or isinstance(im, (float, complex)):
            raise TypeError("QQi does not accept floating point input; use as_qqi")
        self.re = Fraction(re)
        self.im = Fraction(im)

    @classmethod
    def _make(cls, re: Fraction, im: Fraction) -> "QQi":
        obj = object.__new__(cls)
        obj.re = re
        obj.im = im
        return obj

    def conjugate(self) -> "QQi":
        return QQi._make(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    @property
    def is_real(self) -> bool:
        return self.im == 0

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __eq__(self, other) -> bool:
        if isinstance(other, QQi):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self) -> int:
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __neg__(self) -> "QQi":
        return QQi._make(-self.re, -self.im)

    def __pos__(self) -> "QQi":
        return self

    def __add__(self, other) -> "QQi":
        if isinstance(other, QQi):
            return QQi._make(self.re + other.re, self.im + other.im)
        if isinstance(other, (int, Fraction)):
            return QQi._make(self.re + other, self.im)
        return NotImplemented

    __radd__ = __add__

    def __sub__(self, other) -> "QQi":
        if isinstance(other, QQi):
            return QQi._make(self.re - other.re, self.im - other.im)
        if isinstance(other, (int, Fraction)):
            return QQi._make(self.re - other, self.im)
        return NotImplemented

    def __rsub__(self, other) -> "QQi":
        return (-self).__add__(other)

    def __mul__(self, other) -> "QQi":
        if isinstance(other, QQi):
            a, b, c, d = self.re, self.im, other.re, other.im
            return QQi._make(a * c - b * d, a * d + b * c)
        if isinstance(other, (int, Fraction)):
            return QQi._make(self.re * other, self.im * other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other) -> "QQi":
        if isinstance(other, (int, Fraction)):
            other = QQi._make(Fraction(other), Fraction(0))
        if not isinstance(other, QQi):
            return NotImplemented
        den = other.abs2()
        if den == 0:
            raise ZeroDivisionError("QQi division by zero")
        num = self * other.conjugate()
        return QQi._make(num.re / den, num.im / den)

    def __rtruediv__(self, other) -> "QQi":
        return as_qqi(other) / self

    def __pow__(self, k: int) -> "QQi":
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        out = ONE
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __repr__(self) -> str:
        return f"QQi({self.re!s}, {self.im!s})"

    def __str__(self) -> str:
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            if self.im == 1:
                return "i"
            if self.im == -1:
                return "-i"
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        mag = abs(self.im)
        im = "i" if mag == 1 else f"{mag}i"
        return f"({self.re}{sign}{im})"


ONE = QQi(1)
I = QQi(0, 1)


def as_qqi(x) -> QQi:
    """Explicitly convert ``x`` (including floats and complex) to ``QQi``."""
    if isinstance(x, QQi):
        return x
    if isinstance(x, complex):
        return QQi._make(as_rational(x.real), as_rational(x.imag))
    if hasattr(x, "item") and not isinstance(x, (int, Fraction, str)):
        return as_qqi(x.item())
    return QQi._make(as_rational(x), Fraction(0))
