"""Iterated function systems with probabilities on [0, 1].

For ``m >= 1`` the system consists of the ``2**m`` maps
``f_k(x) = (x + k) / 2**m`` with weights ``P = (p_0, ..., p_{2^m - 1})``.
``Phi_P`` is the distribution function of the invariant measure and is
computed from the base-``2**m`` digits ``d_1 d_2 ...`` of ``x`` by unrolling

    Phi_P((x + l) / 2**m) = (p_0 + ... + p_{l-1}) + p_l * Phi_P(x)

into ``Phi_P(x) = sum_n S_{d_n} * p_{d_1} * ... * p_{d_{n-1}}``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from itertools import accumulate
from typing import Iterable, Sequence

from .numerics import (
    DomainError,
    Enclosure,
    ModeError,
    ResourceError,
    check_unit,
    expand,
    format_rational,
    is_dyadic,
    to_fraction,
)

DEFAULT_INTERVAL_CAP = 1 << 16


@dataclass(frozen=True)
class ProbabilityVector:
    m: int
    weights: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if self.m < 1:
            raise DomainError("m must be a positive integer")
        weights = tuple(to_fraction(w) for w in self.weights)
        object.__setattr__(self, "weights", weights)
        if len(weights) != self.base:
            raise DomainError(f"expected {self.base} weights for m={self.m}, got {len(weights)}")
        for w in weights:
            if not 0 <= w < 1:
                raise DomainError(f"weight {w} is outside [0, 1)")
        if sum(weights) != 1:
            raise DomainError(f"weights sum to {sum(weights)}, not 1")
        # Each weight < 1 and total 1 already force two nonzero weights.
        object.__setattr__(self, "_cumulative", (Fraction(0),) + tuple(accumulate(weights)))

    @classmethod
    def of(cls, *weights) -> "ProbabilityVector":
        n = len(weights)
        m = n.bit_length() - 1
        if n < 2 or 1 << m != n:
            raise DomainError(f"number of weights must be 2**m with m >= 1, got {n}")
        return cls(m, tuple(weights))

    @classmethod
    def uniform_on(cls, m: int, support: Iterable[int]) -> "ProbabilityVector":
        support = sorted(set(support))
        base = 1 << m
        if any(not 0 <= k < base for k in support):
            raise DomainError(f"support digits must lie in 0..{base - 1}")
        if len(support) < 2:
            raise DomainError("support needs at least two digits")
        w = Fraction(1, len(support))
        return cls(m, tuple(w if k in support else Fraction(0) for k in range(base)))

    @classmethod
    def cantor_family(cls, m: int, p) -> "ProbabilityVector":
        """``(0, ..., 0, p, 1 - p)`` in dimension ``2**m``."""
        p = to_fraction(p)
        return cls(m, (Fraction(0),) * ((1 << m) - 2) + (p, 1 - p))

    @property
    def base(self) -> int:
        return 1 << self.m

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(k for k, w in enumerate(self.weights) if w)

    @property
    def full_support(self) -> bool:
        return len(self.support) == self.base

    def prefix_sum(self, l: int) -> Fraction:
        """``p_0 + ... + p_{l-1}``."""
        return self._cumulative[l]

    def is_cantor_family(self) -> bool:
        return all(w == 0 for w in self.weights[:-2]) and 0 < self.weights[-2] < 1

    def __str__(self) -> str:
        return f"m={self.m}:P=" + ",".join(_short(w) for w in self.weights)


def _short(x: Fraction) -> str:
    return str(x) if x.denominator != 1 else str(x.numerator)


def _phi_digits(P: ProbabilityVector, digits: Iterable[int]) -> tuple[Fraction, Fraction]:
    total = Fraction(0)
    weight = Fraction(1)
    for d in digits:
        total += weight * P.prefix_sum(d)
        weight *= P.weights[d]
        if not weight:
            break
    return total, weight


def eval_phi(P: ProbabilityVector, x) -> Fraction:
    """Exact ``Phi_P(x)`` for ``x`` with a terminating base-``2**m`` expansion."""
    x = check_unit(to_fraction(x))
    if x == 1:
        return Fraction(1)
    if not is_dyadic(x):
        raise ModeError(f"{x} has no terminating base-{P.base} expansion; use eval_phi_enclosed")
    level = x.denominator.bit_length() - 1
    ndigits = -(-level // P.m)
    total, _ = _phi_digits(P, expand(x, P.base, ndigits).digits)
    return total


def eval_phi_enclosed(P: ProbabilityVector, x, digits: int) -> Enclosure:
    """Bounds for ``Phi_P(x)`` from the first ``digits`` base-``2**m`` digits.

    The width is the ``mu_P`` mass of the level-``digits`` cylinder holding
    ``x``; it drops to zero once a digit with zero weight is read.
    """
    x = check_unit(to_fraction(x))
    if digits < 1:
        raise DomainError("digits must be >= 1")
    if x == 1:
        return Enclosure.exact(Fraction(1))
    ds = expand(x, P.base, digits)
    lo, rest = _phi_digits(P, ds.digits)
    if ds.exact or not rest:
        return Enclosure.exact(lo)
    return Enclosure(lo, lo + rest)


def self_replication_residual(P: ProbabilityVector, x) -> Fraction:
    """``Phi_P(x) - sum_k [Phi_P((x + k)/2^m) - Phi_P(k/2^m)]``, which is 0."""
    x = check_unit(to_fraction(x))
    b = P.base
    rhs = sum((eval_phi(P, (x + k) / b) - eval_phi(P, Fraction(k, b)) for k in range(b)), Fraction(0))
    return eval_phi(P, x) - rhs


@dataclass(frozen=True)
class IntervalSet:
    """Sorted, pairwise disjoint closed intervals inside [0, 1]."""

    intervals: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self) -> None:
        prev_hi = None
        for lo, hi in self.intervals:
            if not 0 <= lo <= hi <= 1:
                raise DomainError(f"bad interval [{lo}, {hi}]")
            if prev_hi is not None and lo <= prev_hi:
                raise DomainError("intervals must be sorted and disjoint")
            prev_hi = hi

    @classmethod
    def merged(cls, pieces: Iterable[tuple[Fraction, Fraction]]) -> "IntervalSet":
        out: list[list[Fraction]] = []
        for lo, hi in sorted(pieces):
            if out and lo <= out[-1][1]:
                out[-1][1] = max(out[-1][1], hi)
            else:
                out.append([lo, hi])
        return cls(tuple((lo, hi) for lo, hi in out))

    def __len__(self) -> int:
        return len(self.intervals)

    def __iter__(self):
        return iter(self.intervals)

    def __contains__(self, x) -> bool:
        x = to_fraction(x)
        return any(lo <= x <= hi for lo, hi in self.intervals)

    def measure(self) -> Fraction:
        return sum((hi - lo for lo, hi in self.intervals), Fraction(0))

    def gaps(self) -> list[tuple[Fraction, Fraction]]:
        """Components ``(a, b)`` of the complement in [0, 1], as open intervals."""
        out = []
        cursor = Fraction(0)
        for lo, hi in self.intervals:
            if lo > cursor:
                out.append((cursor, lo))
            cursor = hi
        if cursor < 1:
            out.append((cursor, Fraction(1)))
        return out

    def csv_rows(self) -> list[str]:
        return [f"{lo.numerator},{lo.denominator},{hi.numerator},{hi.denominator}"
                for lo, hi in self.intervals]

    def __str__(self) -> str:
        return " U ".join(f"[{format_rational(lo)}, {format_rational(hi)}]" for lo, hi in self.intervals)


def attractor_approx(P: ProbabilityVector, n: int, cap: int = DEFAULT_INTERVAL_CAP) -> IntervalSet:
    """``A_n``: start from [0, 1] and apply ``union_{k in K_P} f_k`` n times."""
    if n < 0:
        raise DomainError("n must be nonnegative")
    b = P.base
    current = IntervalSet(((Fraction(0), Fraction(1)),))
    for _ in range(n):
        if len(current) * len(P.support) > cap:
            raise ResourceError(f"A_{n} needs more than {cap} intervals")
        current = IntervalSet.merged(
            ((lo + k) / b, (hi + k) / b) for k in P.support for lo, hi in current
        )
    return current


class Membership(enum.Enum):
    INSIDE = "inside"
    OUTSIDE = "outside"
    UNDECIDED = "undecided"


@dataclass(frozen=True)
class MembershipResult:
    status: Membership
    level: int | None = None

    def __str__(self) -> str:
        if self.status is Membership.OUTSIDE:
            return f"outside_at_level_{self.level}"
        return self.status.value


def _first_bad(prefix: Sequence[int], tail: Sequence[int], allowed: set[int]) -> int | None:
    """1-based index of the first digit outside ``allowed`` in prefix + tail*inf."""
    for i, d in enumerate(prefix, 1):
        if d not in allowed:
            return i
    for i, d in enumerate(tail, len(prefix) + 1):
        if d not in allowed:
            return i
    return None


def membership(P: ProbabilityVector, x, depth: int) -> MembershipResult:
    """Decide whether ``x`` lies in the attractor, looking at most ``depth`` digits deep.

    A point is in the attractor iff one of its base-``2**m`` expansions uses
    only digits of ``K_P``. Rational expansions are eventually periodic, so
    the question is settled once the period is found within ``depth`` digits.
    """
    x = check_unit(to_fraction(x))
    allowed = set(P.support)
    b = P.base

    if x == 0 or x == 1:
        expansions = [((), (0,) if x == 0 else (b - 1,))]
    else:
        digits: list[int] = []
        seen: dict[int, int] = {}
        num, den = x.numerator, x.denominator
        period = None
        while num and len(digits) < depth:
            if num in seen:
                period = seen[num]
                break
            seen[num] = len(digits)
            d, num = divmod(num * b, den)
            digits.append(d)
        if num == 0:
            prefix = tuple(digits)
            alt = prefix[:-1] + (prefix[-1] - 1,)
            expansions = [(prefix, (0,)), (alt, (b - 1,))]
        elif period is not None:
            expansions = [(tuple(digits[:period]), tuple(digits[period:]))]
        else:
            bad = _first_bad(digits, (), allowed)
            if bad is not None:
                return MembershipResult(Membership.OUTSIDE, bad)
            return MembershipResult(Membership.UNDECIDED)

    failures = [_first_bad(prefix, tail, allowed) for prefix, tail in expansions]
    if any(f is None for f in failures):
        return MembershipResult(Membership.INSIDE)
    # x leaves A_j once every expansion has left the allowed digits.
    level = max(failures)
    if level > depth:
        return MembershipResult(Membership.UNDECIDED)
    return MembershipResult(Membership.OUTSIDE, level)


def phi_zero_threshold(P: ProbabilityVector) -> Fraction:
    """Right end of the zero set ``{Phi_P = 0}`` for ``P = (0, ..., 0, p, 1 - p)``."""
    if not P.is_cantor_family():
        raise DomainError("zero-set threshold is only known for P = (0, ..., 0, p, 1-p)")
    b = P.base
    return Fraction(b - 2, b - 1)


def zero_set_sequences(m: int, q_max: int) -> tuple[list[Fraction], list[Fraction]]:
    """The sequences x_q (increasing) and y_q (decreasing) converging to the threshold.

    ``x_0 = (2^m - 2)/2^m``, ``y_0 = (2^m - 1)/2^m`` and both follow
    ``t -> (t + 2^m - 2) / 2^m``.
    """
    b = 1 << m
    xs = [Fraction(b - 2, b)]
    ys = [Fraction(b - 1, b)]
    for _ in range(q_max):
        xs.append((xs[-1] + b - 2) / b)
        ys.append((ys[-1] + b - 2) / b)
    return xs, ys
