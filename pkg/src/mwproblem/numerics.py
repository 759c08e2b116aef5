"""Exact rational/dyadic arithmetic, digit expansions and enclosures.

Every evaluator in the package works on :class:`fractions.Fraction` values.
Points with a terminating binary expansion are carried as
:class:`DyadicPoint`; everything else is evaluated through truncated digit
expansions whose error is certified by an :class:`Enclosure`.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import total_ordering
from typing import Iterator, Union

Rational = Fraction


class MWError(Exception):
    """Base class for all errors raised by the package."""


class DomainError(MWError, ValueError):
    """An argument lies outside the domain of the operation."""


class ModeError(MWError):
    """Exact evaluation was requested where only an enclosure is available."""


class ResourceError(MWError):
    """A configured size cap would be exceeded."""


def to_fraction(x: Union["DyadicPoint", Fraction, int, str]) -> Fraction:
    if isinstance(x, DyadicPoint):
        return x.value
    if isinstance(x, str):
        return parse_rational(x)
    if isinstance(x, float):
        raise TypeError("floats are not accepted; pass a Fraction or a 'num/den' string")
    return Fraction(x)


def check_unit(x: Fraction) -> Fraction:
    if not 0 <= x <= 1:
        raise DomainError(f"x = {x} is outside [0, 1]")
    return x


def is_power_of_two(n: int) -> bool:
    return n > 0 and n & (n - 1) == 0


def is_dyadic(x: Fraction) -> bool:
    return is_power_of_two(x.denominator)


_DYADIC_RE = re.compile(r"^\s*(\d+)\s*/\s*2\s*\^\s*(\d+)\s*$")
_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")


def parse_rational(text: str) -> Fraction:
    """Parse ``"num/den"``, ``"k/2^n"``, an integer or a decimal into a Fraction."""
    m = _DYADIC_RE.match(text)
    if m:
        return Fraction(int(m.group(1)), 2 ** int(m.group(2)))
    m = _RATIONAL_RE.match(text)
    if not m:
        try:
            return Fraction(text.strip())
        except ValueError:
            raise ValueError(f"not a rational number: {text!r}") from None
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return Fraction(int(m.group(1)), den)


def format_rational(x: Fraction) -> str:
    """Serialize as ``"num/den"``; always two parts, so the form is uniform."""
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


@total_ordering
@dataclass(frozen=True)
class DyadicPoint:
    """The point ``numerator / 2**level`` of [0, 1], stored in canonical form."""

    numerator: int
    level: int = 0

    def __post_init__(self) -> None:
        if self.level < 0:
            raise DomainError("level must be nonnegative")
        if not 0 <= self.numerator <= 1 << self.level:
            raise DomainError(f"{self.numerator}/2^{self.level} is outside [0, 1]")
        num, lev = self.numerator, self.level
        while lev > 0 and num % 2 == 0:
            num //= 2
            lev -= 1
        object.__setattr__(self, "numerator", num)
        object.__setattr__(self, "level", lev)

    @classmethod
    def from_fraction(cls, x: Fraction) -> "DyadicPoint":
        x = Fraction(x)
        if not is_dyadic(x):
            raise DomainError(f"{x} is not a dyadic rational")
        return cls(x.numerator, x.denominator.bit_length() - 1)

    @classmethod
    def parse(cls, text: str) -> "DyadicPoint":
        return cls.from_fraction(parse_rational(text))

    @property
    def value(self) -> Fraction:
        return Fraction(self.numerator, 1 << self.level)

    def __lt__(self, other: "DyadicPoint") -> bool:
        return self.value < other.value

    def __str__(self) -> str:
        return f"{self.numerator}/2^{self.level}"


def dyadic_grid(level: int) -> list[Fraction]:
    """All points ``k / 2**level``, ``k = 0..2**level``, ascending."""
    if level < 0:
        raise DomainError("level must be nonnegative")
    den = 1 << level
    return [Fraction(k, den) for k in range(den + 1)]


@dataclass(frozen=True)
class DigitString:
    """A finite prefix of a base-``2**m`` expansion of a point of [0, 1].

    ``exact`` is true when the digits are the complete (terminating)
    expansion; otherwise further digits follow.
    """

    base: int
    digits: tuple[int, ...]
    exact: bool

    def value(self) -> Fraction:
        total = Fraction(0)
        scale = Fraction(1)
        for d in self.digits:
            scale /= self.base
            total += d * scale
        return total

    def __len__(self) -> int:
        return len(self.digits)

    def __iter__(self) -> Iterator[int]:
        return iter(self.digits)


def expand(x: Union[DyadicPoint, Fraction, int, str], base: int, max_digits: int) -> DigitString:
    """Digits of ``x`` in ``base`` (a power of two, at least 2).

    Points with a terminating expansion use it; ``x = 1`` uses the
    all-``(base - 1)`` expansion and is therefore never exact.
    """
    x = check_unit(to_fraction(x))
    if base < 2 or not is_power_of_two(base):
        raise DomainError(f"base must be a power of two >= 2, got {base}")
    if max_digits < 0:
        raise DomainError("max_digits must be nonnegative")
    if x == 1:
        return DigitString(base, (base - 1,) * max_digits, False)
    digits = []
    num, den = x.numerator, x.denominator
    while num and len(digits) < max_digits:
        d, num = divmod(num * base, den)
        digits.append(d)
    return DigitString(base, tuple(digits), num == 0)


def binomial(n: int, j: int) -> int:
    if n < 0 or j < 0:
        raise DomainError("binomial arguments must be nonnegative")
    if j > n:
        raise DomainError(f"binomial({n}, {j}) requires j <= n")
    return math.comb(n, j)


@dataclass(frozen=True)
class Enclosure:
    """Certified bounds ``lo <= value <= hi``.

    ``quadrature_tol`` is nonzero only when a (non-rigorous) quadrature
    estimate went into the bounds; it records the widening that was applied.
    """

    lo: Fraction
    hi: Fraction
    quadrature_tol: float = field(default=0.0, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "lo", Fraction(self.lo))
        object.__setattr__(self, "hi", Fraction(self.hi))
        if self.lo > self.hi:
            raise DomainError(f"empty enclosure [{self.lo}, {self.hi}]")

    @classmethod
    def exact(cls, value: Fraction) -> "Enclosure":
        return cls(value, value)

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    @property
    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def is_exact(self) -> bool:
        return self.lo == self.hi

    def outward(self, bits: int) -> "Enclosure":
        """Round the bounds outward to multiples of ``2**-bits``."""
        den = 1 << bits
        lo = Fraction(math.floor(self.lo * den), den)
        hi = Fraction(math.ceil(self.hi * den), den)
        return Enclosure(lo, hi, self.quadrature_tol)

    def __contains__(self, value: Fraction) -> bool:
        return self.lo <= value <= self.hi

    def contains_enclosure(self, other: "Enclosure") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def __add__(self, other: Union["Enclosure", Fraction, int]) -> "Enclosure":
        if isinstance(other, Enclosure):
            return Enclosure(self.lo + other.lo, self.hi + other.hi,
                             self.quadrature_tol + other.quadrature_tol)
        return Enclosure(self.lo + other, self.hi + other, self.quadrature_tol)

    __radd__ = __add__

    def __neg__(self) -> "Enclosure":
        return Enclosure(-self.hi, -self.lo, self.quadrature_tol)

    def __sub__(self, other: Union["Enclosure", Fraction, int]) -> "Enclosure":
        return self + (-other)

    def scale(self, factor: Fraction) -> "Enclosure":
        factor = Fraction(factor)
        tol = self.quadrature_tol * abs(float(factor))
        if factor >= 0:
            return Enclosure(self.lo * factor, self.hi * factor, tol)
        return Enclosure(self.hi * factor, self.lo * factor, tol)

    def __str__(self) -> str:
        return f"[{format_rational(self.lo)}, {format_rational(self.hi)}]"


def enclosure_sum(parts) -> Enclosure:
    total = Enclosure.exact(Fraction(0))
    for part in parts:
        total = total + part
    return total
