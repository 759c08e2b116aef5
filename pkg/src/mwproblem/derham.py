"""The de Rham family ``p -> phi_p`` on [0, 1].

``phi_p`` is the unique bounded solution of

    phi_p(x / 2)       = p * phi_p(x)
    phi_p((x + 1) / 2) = (1 - p) * phi_p(x) + p

and is evaluated here through its binary digit formula

    phi_p(sum x_n / 2^n) = sum x_n * p^(n - s_{n-1}) * (1 - p)^(s_{n-1}),
    s_{n-1} = x_1 + ... + x_{n-1},

which is a finite sum on dyadic points.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Union

from .numerics import (
    DomainError,
    DyadicPoint,
    Enclosure,
    check_unit,
    expand,
    is_dyadic,
    to_fraction,
)

PointLike = Union[DyadicPoint, Fraction, int, str]


def check_param(p) -> Fraction:
    p = to_fraction(p)
    if not 0 < p < 1:
        raise DomainError(f"de Rham parameter must lie in (0, 1), got {p}")
    return p


def _digit_sum(p: Fraction, digits) -> tuple[Fraction, Fraction]:
    """Partial sum over ``digits`` and the mass ``p^#0 (1-p)^#1`` left over."""
    q = 1 - p
    total = Fraction(0)
    weight = Fraction(1)
    for d in digits:
        if d:
            total += weight * p
            weight *= q
        else:
            weight *= p
    return total, weight


def eval_derham(p, x: PointLike) -> Fraction:
    """Exact ``phi_p(x)`` for a dyadic ``x``."""
    p = check_param(p)
    x = check_unit(to_fraction(x))
    if x == 1:
        return Fraction(1)
    if not is_dyadic(x):
        raise DomainError(f"{x} is not dyadic; use eval_derham_enclosed")
    level = x.denominator.bit_length() - 1
    total, _ = _digit_sum(p, expand(x, 2, level).digits)
    return total


def eval_derham_enclosed(p, x: PointLike, digits: int) -> Enclosure:
    """Bounds for ``phi_p(x)`` from the first ``digits`` binary digits of x.

    The width is the exact increment of ``phi_p`` over the dyadic interval
    of length ``2**-digits`` containing ``x``.
    """
    p = check_param(p)
    x = check_unit(to_fraction(x))
    if digits < 1:
        raise DomainError("digits must be >= 1")
    if x == 1:
        return Enclosure.exact(Fraction(1))
    ds = expand(x, 2, digits)
    lo, rest = _digit_sum(p, ds.digits)
    if ds.exact:
        return Enclosure.exact(lo)
    return Enclosure(lo, lo + rest)


def reflect_check(p, x: PointLike) -> tuple[Fraction, Fraction]:
    """Return ``(phi_p(x), 1 - phi_{1-p}(1-x))``; the two agree exactly."""
    p = check_param(p)
    x = to_fraction(x)
    return eval_derham(p, x), 1 - eval_derham(1 - p, 1 - x)
