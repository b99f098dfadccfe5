"""Complex scalars with an exact (Gaussian rational) and a floating backend.

Exact values are :class:`GaussianRational` instances; floating values are plain
Python ``complex``.  Helpers in this module accept either and dispatch on type,
so the rest of the package can be written once for both backends.
"""
from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Union

# A floating value z is treated as zero iff |z| <= ZERO_TOL * (1 + scale).
ZERO_TOL = 1e-9


class GaussianRational:
    """Complex number whose real and imaginary parts are rationals."""

    __slots__ = ("re", "im")

    def __init__(self, re: Rational | int | str = 0, im: Rational | int | str = 0):
        self.re = re if type(re) is Fraction else Fraction(re)
        self.im = im if type(im) is Fraction else Fraction(im)

    @classmethod
    def _raw(cls, re: Fraction, im: Fraction) -> GaussianRational:
        z = object.__new__(cls)
        z.re = re
        z.im = im
        return z

    # arithmetic -----------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, GaussianRational):
            return other
        if isinstance(other, (int, Fraction)):
            return GaussianRational._raw(Fraction(other), Fraction(0))
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return complex(self) + other
        return GaussianRational._raw(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return complex(self) - other
        return GaussianRational._raw(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return other - complex(self)
        return GaussianRational._raw(o.re - self.re, o.im - self.im)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return complex(self) * other
        return GaussianRational._raw(
            self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return complex(self) / other
        d = o.re * o.re + o.im * o.im
        if d == 0:
            raise ZeroDivisionError("division by exact zero")
        return GaussianRational._raw(
            (self.re * o.re + self.im * o.im) / d, (self.im * o.re - self.re * o.im) / d
        )

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return other / complex(self)
        return o / self

    def __neg__(self):
        return GaussianRational._raw(-self.re, -self.im)

    def __pos__(self):
        return self

    def conjugate(self) -> GaussianRational:
        return GaussianRational._raw(self.re, -self.im)

    @property
    def real(self) -> Fraction:
        return self.re

    @property
    def imag(self) -> Fraction:
        return self.im

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __abs__(self) -> float:
        return modulus(self)

    # comparison / conversion ----------------------------------------------
    def __eq__(self, other):
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        if isinstance(other, (float, complex)):
            return complex(self) == other
        return NotImplemented

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussianRational({fraction_str(self.re)!r}, {fraction_str(self.im)!r})"

    def __str__(self):
        if self.im == 0:
            return fraction_str(self.re)
        sign = "+" if self.im >= 0 else "-"
        return f"{fraction_str(self.re)}{sign}{fraction_str(abs(self.im))}i"


Scalar = Union[GaussianRational, complex]

I_UNIT = GaussianRational(0, 1)
ONE = GaussianRational(1, 0)
ZERO = GaussianRational(0, 0)


def fraction_str(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def parse_rational(text: str | int | Fraction) -> Fraction:
    """Parse ``"p/q"``, an integer or a finite decimal string into a Fraction."""
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    try:
        return Fraction(str(text).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational literal: {text!r}") from exc


def is_exact(z) -> bool:
    return isinstance(z, (GaussianRational, int, Fraction))


def to_exact(z) -> GaussianRational:
    if isinstance(z, GaussianRational):
        return z
    if isinstance(z, (int, Fraction)):
        return GaussianRational(z)
    if isinstance(z, str):
        return GaussianRational(parse_rational(z))
    raise TypeError(f"cannot represent {z!r} exactly")


def to_float(z) -> complex:
    return complex(z)


def coerce(z) -> Scalar:
    """Normalize a user value: rationals become exact, floats become complex."""
    if isinstance(z, (GaussianRational, int, Fraction, str)):
        return to_exact(z)
    if isinstance(z, (float, complex)):
        return complex(z)
    if hasattr(z, "__complex__"):
        return complex(z)
    raise TypeError(f"unsupported scalar {z!r}")


def conj(z):
    return z.conjugate()


def abs2(z):
    if isinstance(z, GaussianRational):
        return z.abs2()
    if isinstance(z, (int, Fraction)):
        return Fraction(z) ** 2
    return z.real * z.real + z.imag * z.imag


def modulus(z) -> float:
    if isinstance(z, GaussianRational):
        a2 = z.re * z.re + z.im * z.im
        if a2 == 0:
            return 0.0
        try:
            ratio = a2.numerator / a2.denominator  # int true division rounds correctly
        except OverflowError:
            ratio = math.inf
        if 1e-300 < ratio < 1e300:
            return math.sqrt(ratio)
        return math.exp(0.5 * (math.log(a2.numerator) - math.log(a2.denominator)))
    return abs(z)


def log_modulus(z) -> float:
    """Natural log of |z|, robust for exact values far outside float range."""
    if isinstance(z, GaussianRational):
        a2 = z.re * z.re + z.im * z.im
        if a2 == 0:
            return -math.inf
        return 0.5 * (math.log(a2.numerator) - math.log(a2.denominator))
    a = abs(z)
    return math.log(a) if a > 0 else -math.inf


def is_zero(z, scale: float = 0.0) -> bool:
    if isinstance(z, GaussianRational):
        return not z
    if isinstance(z, (int, Fraction)):
        return z == 0
    return abs(z) <= ZERO_TOL * (1.0 + scale)


def rotate_i(z, k: int):
    """Multiply z by i**k using the k mod 4 table; exact for both backends."""
    k %= 4
    if k == 0:
        return z
    if isinstance(z, GaussianRational):
        re, im = z.re, z.im
        if k == 1:
            return GaussianRational._raw(-im, re)
        if k == 2:
            return GaussianRational._raw(-re, -im)
        return GaussianRational._raw(im, -re)
    z = complex(z)
    if k == 1:
        return complex(-z.imag, z.real)
    if k == 2:
        return complex(-z.real, -z.imag)
    return complex(z.imag, -z.real)


def real_part(z):
    return z.re if isinstance(z, GaussianRational) else z.real


def imag_part(z):
    return z.im if isinstance(z, GaussianRational) else z.imag
