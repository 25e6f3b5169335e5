"""Exact scalars: rationals, optionally extended to Gaussian rationals a+bi."""
from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Union


class GaussianRational:
    """a + b*i with rational a, b. Never constructed with b == 0 via `gauss`."""

    __slots__ = ("re", "im")

    def __init__(self, re, im):
        self.re = Fraction(re)
        self.im = Fraction(im)

    def _coerce(self, other):
        if isinstance(other, GaussianRational):
            return other
        if isinstance(other, (int, Rational)):
            return GaussianRational(other, 0)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return gauss(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return gauss(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return gauss(o.re - self.re, o.im - self.im)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return gauss(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def inverse(self):
        n = self.re * self.re + self.im * self.im
        if n == 0:
            raise ZeroDivisionError("GaussianRational division by zero")
        return gauss(self.re / n, -self.im / n)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result: Scalar = Fraction(1)
        base: Scalar = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __repr__(self):
        return f"GaussianRational({self.re}, {self.im})"

    def __str__(self):
        return format_scalar(self)


Scalar = Union[Fraction, GaussianRational]


def gauss(re, im) -> Scalar:
    """Build a scalar, collapsing to a Fraction when the imaginary part is 0."""
    im = Fraction(im)
    if im == 0:
        return Fraction(re)
    return GaussianRational(re, im)


def as_scalar(x) -> Scalar:
    if isinstance(x, GaussianRational):
        return gauss(x.re, x.im)
    if isinstance(x, complex):
        raise TypeError("floating point complex numbers are not exact scalars")
    if isinstance(x, float):
        raise TypeError("floats are not exact scalars")
    return Fraction(x)


def _fmt_q(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def format_scalar(x: Scalar) -> str:
    """Canonical text: `3`, `-3/2`, `(1/2+3i)`, `(0-1i)`."""
    if isinstance(x, GaussianRational):
        sign = "-" if x.im < 0 else "+"
        return f"({_fmt_q(x.re)}{sign}{_fmt_q(abs(x.im))}i)"
    return _fmt_q(Fraction(x))


def is_negative_real(x: Scalar) -> bool:
    return not isinstance(x, GaussianRational) and x < 0
