"""Moment sequences and the dyadic samples ``phi(2^-j)`` of solutions.

For an integral-form solution ``phi_mu`` the samples ``phi_mu(2^-j)`` are
exactly the moments of ``mu``, so they form a completely monotone sequence
whose alternating sums ``L(n) = sum_j (-1)^j C(n, j) c_j`` tend to zero.
The helpers here tabulate those quantities in exact arithmetic and recover
finitely-atomic measures from their moments.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .numerics import DomainError, MWError, binomial, format_rational, to_fraction
from .solutions import Integral, MeasureSpec, SolutionExpr, eval_solution


class NotAtomicError(MWError, ValueError):
    """The sequence is not the moment sequence of an r-atomic measure on (0, 1)."""


@dataclass(frozen=True)
class MomentSequence:
    values: tuple[Fraction, ...]
    tolerance: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", tuple(to_fraction(v) for v in self.values))

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, j):
        return self.values[j]

    def __iter__(self):
        return iter(self.values)


def _as_sequence(c) -> MomentSequence:
    return c if isinstance(c, MomentSequence) else MomentSequence(tuple(c))


def dyadic_samples(s: SolutionExpr, N: int) -> MomentSequence:
    """``(phi(2^-j))_{j=0..N}``, exact."""
    if N < 0:
        raise DomainError("N must be nonnegative")
    return MomentSequence(tuple(eval_solution(s, Fraction(1, 1 << j)) for j in range(N + 1)))


def moments_of_measure(mu: MeasureSpec, N: int) -> MomentSequence:
    """``c_j = int p^j dmu(p)`` for ``j = 0..N``; quadrature for the density part."""
    if N < 0:
        raise DomainError("N must be nonnegative")
    values = [sum((w * p ** j for p, w in mu.atoms), Fraction(0)) for j in range(N + 1)]
    tol = 0.0
    if mu.density is not None:
        for j in range(N + 1):
            got, err = mu.density.integrate(lambda p, j=j: p ** j)
            values[j] += got
            tol = max(tol, err)
    return MomentSequence(tuple(values), tol)


def forward_difference(c, k: int, n: int) -> Fraction:
    """``sum_{j=0}^n (-1)^j C(n, j) c_{k+j}``."""
    c = _as_sequence(c)
    if k + n >= len(c):
        raise DomainError(f"need c_{k + n}, sequence has length {len(c)}")
    total = Fraction(0)
    for j in range(n + 1):
        term = binomial(n, j) * c[k + j]
        total += -term if j % 2 else term
    return total


@dataclass(frozen=True)
class MonotonicityTable:
    """Differences ``Delta(k, n)`` over the tested index set and the verdict on it."""

    entries: tuple[tuple[int, int, Fraction], ...]
    tested: str

    @property
    def passed(self) -> bool:
        return all(v >= 0 for _, _, v in self.entries)

    @property
    def verdict(self) -> str:
        return "PASS" if self.passed else "FAIL"

    def get(self, k: int, n: int) -> Fraction:
        for kk, nn, v in self.entries:
            if (kk, nn) == (k, n):
                return v
        raise KeyError((k, n))

    def negative(self) -> list[tuple[int, int, Fraction]]:
        return [e for e in self.entries if e[2] < 0]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["k", "n", "delta_num", "delta_den", "sign"])
        for k, n, v in self.entries:
            sign = "+" if v > 0 else "-" if v < 0 else "0"
            writer.writerow([k, n, v.numerator, v.denominator, sign])
        return buf.getvalue()


def complete_monotonicity_table(c, K: Optional[int] = None, Nmax: Optional[int] = None) -> MonotonicityTable:
    """All ``Delta(k, n)`` for ``k <= K, n <= Nmax``.

    With ``K`` and ``Nmax`` omitted, the triangle ``k + n <= len(c) - 1`` is
    tabulated instead. Passing only covers the tested range; complete
    monotonicity itself is an infinite condition.
    """
    c = _as_sequence(c)
    last = len(c) - 1
    if K is None and Nmax is None:
        idx = [(k, n) for k in range(last + 1) for n in range(last + 1 - k)]
        tested = f"k+n<={last}"
    else:
        if K is None or Nmax is None:
            raise DomainError("give both K and Nmax, or neither")
        if K < 0 or Nmax < 0 or K + Nmax > last:
            raise DomainError(f"K + Nmax = {K + Nmax} exceeds sequence length - 1 = {last}")
        idx = [(k, n) for k in range(K + 1) for n in range(Nmax + 1)]
        tested = f"k<={K},n<={Nmax}"
    return MonotonicityTable(tuple((k, n, forward_difference(c, k, n)) for k, n in idx), tested)


def limit_condition_partial_sums(c) -> list[Fraction]:
    """``L(n) = Delta(0, n)`` for ``n = 0..len(c)-1``."""
    c = _as_sequence(c)
    return [forward_difference(c, 0, n) for n in range(len(c))]


@dataclass(frozen=True)
class ForcedInequalities:
    rows: tuple[tuple[int, Fraction, Fraction, Fraction, bool], ...]

    @property
    def passed(self) -> bool:
        return all(v0 >= 0 and v1 >= 0 and v2 >= 0 and same for _, v0, v1, v2, same in self.rows)

    @property
    def verdict(self) -> str:
        return "PASS" if self.passed else "FAIL"


def monotonicity_forced_inequalities(s: SolutionExpr, K: int) -> ForcedInequalities:
    """Differences of order 0, 1 and 2 of the dyadic samples, for ``k <= K``.

    Monotonicity alone makes these nonnegative: the second difference equals
    ``phi(2^-(k+1) + 1/2) - phi(2^-(k+2) + 1/2)`` by the functional equation,
    and that identity is checked as well.
    """
    if K < 0:
        raise DomainError("K must be nonnegative")
    c = dyadic_samples(s, K + 2)
    half = Fraction(1, 2)
    rows = []
    for k in range(K + 1):
        d0 = c[k]
        d1 = c[k] - c[k + 1]
        d2 = c[k] - 2 * c[k + 1] + c[k + 2]
        via_shift = eval_solution(s, Fraction(1, 1 << (k + 1)) + half) - eval_solution(s, Fraction(1, 1 << (k + 2)) + half)
        rows.append((k, d0, d1, d2, d2 == via_shift))
    return ForcedInequalities(tuple(rows))


def _solve(matrix: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    """Gaussian elimination over the rationals; raises on a singular system."""
    n = len(matrix)
    a = [row[:] + [b] for row, b in zip(matrix, rhs)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if a[r][col] != 0), None)
        if pivot is None:
            raise NotAtomicError("singular Hankel/Vandermonde system")
        a[col], a[pivot] = a[pivot], a[col]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col] / a[col][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [a[i][n] / a[i][i] for i in range(n)]


def _rational_roots(coeffs: Sequence[Fraction]) -> list[Fraction]:
    """Roots of the monic polynomial ``t^r + coeffs[r-1] t^(r-1) + ... + coeffs[0]``.

    All roots must be rational and simple; anything else raises.
    """
    import sympy

    t = sympy.Symbol("t")
    r = len(coeffs)
    poly = sympy.Poly([sympy.Rational(1)] + [sympy.Rational(c.numerator, c.denominator) for c in reversed(coeffs)], t)
    roots = sympy.roots(poly, filter="Q", multiple=False)
    if sum(roots.values()) != r:
        raise NotAtomicError("atoms are not rational (or not all found exactly)")
    if any(mult > 1 for mult in roots.values()):
        raise NotAtomicError("repeated atom location")
    return sorted(Fraction(int(x.p), int(x.q)) for x in roots)


def recover_discrete_measure(c, r: int) -> MeasureSpec:
    """Find the r-atomic probability measure on (0, 1) with moments ``c``.

    The atoms are the roots of the polynomial annihilating the Hankel
    recurrence of ``c``, the masses solve the Vandermonde system, and every
    supplied moment is re-checked exactly.
    """
    c = _as_sequence(c)
    if r < 1:
        raise DomainError("r must be >= 1")
    if len(c) < 2 * r:
        raise DomainError(f"need at least {2 * r} moments for r = {r}")
    if c[0] != 1:
        raise NotAtomicError(f"c_0 = {c[0]}, a probability measure needs 1")
    hankel = [[c[i + j] for i in range(r)] for j in range(r)]
    coeffs = _solve(hankel, [-c[r + j] for j in range(r)])
    atoms = _rational_roots(coeffs)
    if any(not 0 < p < 1 for p in atoms):
        raise NotAtomicError(f"atom locations {[str(p) for p in atoms]} are not all in (0, 1)")
    vander = [[p ** j for p in atoms] for j in range(r)]
    masses = _solve(vander, list(c.values[:r]))
    if any(w <= 0 for w in masses):
        raise NotAtomicError("recovered masses are not all positive")
    for j, cj in enumerate(c):
        if sum((w * p ** j for p, w in zip(atoms, masses)), Fraction(0)) != cj:
            raise NotAtomicError(f"moment c_{j} is not matched by {r} atoms")
    return MeasureSpec(tuple(zip(atoms, masses)))


def sequence_moments(s: SolutionExpr, N: int) -> MomentSequence:
    """Moments of the measure behind an integral solution, else its dyadic samples."""
    if isinstance(s, Integral):
        return moments_of_measure(s.mu, N)
    return dyadic_samples(s, N)


def format_sequence(c) -> list[str]:
    return [format_rational(v) for v in _as_sequence(c)]
