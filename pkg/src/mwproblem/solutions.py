"""Solutions of phi(x) = phi(x/2) + phi((x+1)/2) - phi(1/2), phi(0)=0, phi(1)=1.

A solution is described by a small expression tree:

* :class:`DeRham` -- the de Rham function ``phi_p``;
* :class:`Averaged` -- the Cantor-type solution built from ``Phi_P``,
  ``phi_P(x) = (1/m) sum_{i<m} sum_{k<2^i} [Phi_P((x+k)/2^i) - Phi_P(k/2^i)]``;
* :class:`Integral` -- ``int phi_p(x) dmu(p)`` for a measure on (0, 1);
* :class:`Convex` and :class:`Series` -- convex combinations of the above.

Every node evaluates exactly on dyadic points (except integrals against a
density) and to a certified enclosure anywhere in [0, 1].
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Union

import numpy as np

from . import derham
from .ifs import ProbabilityVector, eval_phi, eval_phi_enclosed
from .numerics import (
    DomainError,
    Enclosure,
    ModeError,
    check_unit,
    enclosure_sum,
    is_dyadic,
    to_fraction,
)

QUADRATURE_RULES = ("gauss-legendre",)


def _uniform_pdf(p: float) -> float:
    return 1.0


def _beta_pdf(a: float, b: float) -> Callable[[float], float]:
    norm = math.gamma(a + b) / (math.gamma(a) * math.gamma(b))
    return lambda p: norm * p ** (a - 1) * (1 - p) ** (b - 1)


def named_density(name: str) -> Callable[[float], float]:
    """``uniform`` or ``beta(a,b)``; both are probability densities on (0, 1)."""
    if name == "uniform":
        return _uniform_pdf
    if name.startswith("beta(") and name.endswith(")"):
        try:
            a, b = (float(t) for t in name[5:-1].split(","))
        except ValueError:
            raise DomainError(f"bad beta density {name!r}") from None
        if a <= 0 or b <= 0:
            raise DomainError("beta parameters must be positive")
        return _beta_pdf(a, b)
    raise DomainError(f"unknown density {name!r}")


@dataclass(frozen=True)
class Density:
    """Absolutely continuous part ``mass * pdf(p) dp`` of a measure on (0, 1)."""

    name: str
    mass: Fraction = Fraction(1)
    nodes: int = 32
    rule: str = "gauss-legendre"
    pdf: Callable[[float], float] = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "mass", to_fraction(self.mass))
        if self.pdf is None:
            object.__setattr__(self, "pdf", named_density(self.name))
        if self.rule not in QUADRATURE_RULES:
            raise DomainError(f"unknown quadrature rule {self.rule!r}")
        if self.nodes < 2:
            raise DomainError("quadrature needs at least 2 nodes")
        if not 0 < self.mass <= 1:
            raise DomainError("density mass must lie in (0, 1]")

    def quadrature(self, nodes: Optional[int] = None) -> list[tuple[Fraction, Fraction]]:
        """Nodes in (0, 1) and weights (including ``mass * pdf``), as exact Fractions."""
        n = nodes or self.nodes
        t, w = np.polynomial.legendre.leggauss(n)
        out = []
        for ti, wi in zip(t, w):
            p = (ti + 1) / 2
            out.append((Fraction(float(p)), Fraction(float(wi / 2 * self.pdf(p))) * self.mass))
        return out

    def integrate(self, f: Callable[[Fraction], Fraction]) -> tuple[Fraction, float]:
        """Quadrature value and a (non-rigorous) error estimate from halving the rule."""
        full = sum((w * f(p) for p, w in self.quadrature()), Fraction(0))
        half = sum((w * f(p) for p, w in self.quadrature(max(self.nodes // 2, 1))), Fraction(0))
        return full, abs(float(full - half)) + 1e-14


@dataclass(frozen=True)
class MeasureSpec:
    """A probability measure on (0, 1): finitely many atoms plus an optional density."""

    atoms: tuple[tuple[Fraction, Fraction], ...] = ()
    density: Optional[Density] = None

    def __post_init__(self) -> None:
        atoms = tuple((to_fraction(p), to_fraction(w)) for p, w in self.atoms)
        object.__setattr__(self, "atoms", atoms)
        locs = [p for p, _ in atoms]
        if len(set(locs)) != len(locs):
            raise DomainError("atom locations must be distinct")
        for p, w in atoms:
            if not 0 < p < 1:
                raise DomainError(f"atom location {p} is outside (0, 1)")
            if w < 0:
                raise DomainError(f"atom mass {w} is negative")
        total = sum((w for _, w in atoms), Fraction(0))
        if self.density is not None:
            total += self.density.mass
            got, tol = self.density.integrate(lambda p: Fraction(1))
            if abs(float(got - self.density.mass)) > max(tol, 1e-9):
                raise DomainError(f"density integrates to {float(got)}, expected {self.density.mass}")
        if total != 1:
            raise DomainError(f"total mass is {total}, not 1")

    @classmethod
    def point(cls, p) -> "MeasureSpec":
        return cls(((to_fraction(p), Fraction(1)),))

    @property
    def is_atomic(self) -> bool:
        return self.density is None


class SolutionExpr:
    """Base class of the solution expression tree."""

    def eval(self, x) -> Fraction:
        return eval_solution(self, x)

    def enclose(self, x, digits: int) -> Enclosure:
        return eval_solution_enclosed(self, x, digits)

    def __str__(self) -> str:
        from .expr import format_expr

        return format_expr(self)


@dataclass(frozen=True)
class DeRham(SolutionExpr):
    p: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "p", derham.check_param(self.p))


@dataclass(frozen=True)
class Averaged(SolutionExpr):
    P: ProbabilityVector


@dataclass(frozen=True)
class Integral(SolutionExpr):
    mu: MeasureSpec


@dataclass(frozen=True)
class Convex(SolutionExpr):
    """``alpha * left + (1 - alpha) * right``."""

    alpha: Fraction
    left: SolutionExpr
    right: SolutionExpr

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", to_fraction(self.alpha))
        if not 0 <= self.alpha <= 1:
            raise DomainError(f"convex weight {self.alpha} is outside [0, 1]")


@dataclass(frozen=True)
class Series(SolutionExpr):
    """A finite convex combination ``sum alpha_n * s_n``.

    ``tail`` is the weight of omitted terms of a truncated infinite series;
    it keeps ``sum alpha_n + tail = 1`` and only widens enclosures.
    """

    terms: tuple[tuple[Fraction, SolutionExpr], ...]
    tail: Fraction = Fraction(0)

    def __post_init__(self) -> None:
        terms = tuple((to_fraction(a), s) for a, s in self.terms)
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "tail", to_fraction(self.tail))
        if not terms:
            raise DomainError("series needs at least one term")
        if any(a < 0 for a, _ in terms) or self.tail < 0:
            raise DomainError("series weights must be nonnegative")
        if sum((a for a, _ in terms), Fraction(0)) + self.tail != 1:
            raise DomainError("series weights (with tail) must sum to 1")


Expr = Union[DeRham, Averaged, Integral, Convex, Series]


def _averaged_terms(P: ProbabilityVector, x: Fraction):
    for i in range(P.m):
        den = 1 << i
        for k in range(den):
            yield (x + k) / den, Fraction(k, den)


def eval_averaged(P: ProbabilityVector, x) -> Fraction:
    x = check_unit(to_fraction(x))
    total = sum((eval_phi(P, a) - eval_phi(P, b) for a, b in _averaged_terms(P, x)), Fraction(0))
    return total / P.m


def eval_solution(s: SolutionExpr, x) -> Fraction:
    """Exact value on a dyadic ``x``."""
    x = check_unit(to_fraction(x))
    if not is_dyadic(x):
        raise ModeError(f"{x} is not dyadic; use eval_solution_enclosed")
    if isinstance(s, DeRham):
        return derham.eval_derham(s.p, x)
    if isinstance(s, Averaged):
        return eval_averaged(s.P, x)
    if isinstance(s, Integral):
        if not s.mu.is_atomic:
            raise ModeError("integral against a density has no exact value; use eval_solution_enclosed")
        return sum((w * derham.eval_derham(p, x) for p, w in s.mu.atoms), Fraction(0))
    if isinstance(s, Convex):
        return s.alpha * eval_solution(s.left, x) + (1 - s.alpha) * eval_solution(s.right, x)
    if isinstance(s, Series):
        if s.tail:
            raise ModeError("truncated series has no exact value; use eval_solution_enclosed")
        return sum((a * eval_solution(t, x) for a, t in s.terms), Fraction(0))
    raise TypeError(f"not a solution expression: {s!r}")


def eval_solution_enclosed(s: SolutionExpr, x, digits: int) -> Enclosure:
    """Certified bounds at any rational ``x``.

    ``digits`` counts binary digits for de Rham nodes and base-``2**m``
    digits for averaged nodes. Density integrals add a quadrature error
    estimate, recorded in ``Enclosure.quadrature_tol``.
    """
    x = check_unit(to_fraction(x))
    if isinstance(s, DeRham):
        return derham.eval_derham_enclosed(s.p, x, digits)
    if isinstance(s, Averaged):
        parts = (eval_phi_enclosed(s.P, a, digits) - eval_phi(s.P, b) for a, b in _averaged_terms(s.P, x))
        return enclosure_sum(parts).scale(Fraction(1, s.P.m))
    if isinstance(s, Integral):
        enc = enclosure_sum(derham.eval_derham_enclosed(p, x, digits).scale(w) for p, w in s.mu.atoms)
        if s.mu.density is not None:
            d = s.mu.density
            lo, tol_lo = d.integrate(lambda p: derham.eval_derham_enclosed(p, x, digits).lo)
            hi, tol_hi = d.integrate(lambda p: derham.eval_derham_enclosed(p, x, digits).hi)
            tol = max(tol_lo, tol_hi)
            pad = Fraction(tol)
            enc = enc + Enclosure(lo - pad, hi + pad, tol).outward(64)
        return enc
    if isinstance(s, Convex):
        return (eval_solution_enclosed(s.left, x, digits).scale(s.alpha)
                + eval_solution_enclosed(s.right, x, digits).scale(1 - s.alpha))
    if isinstance(s, Series):
        enc = enclosure_sum(eval_solution_enclosed(t, x, digits).scale(a) for a, t in s.terms)
        return enc + Enclosure(0, s.tail)
    raise TypeError(f"not a solution expression: {s!r}")


def mw_residual(s: SolutionExpr, x) -> Fraction:
    """``phi(x) - phi(x/2) - phi((x+1)/2) + phi(1/2)``; zero for every solution."""
    x = check_unit(to_fraction(x))
    half = Fraction(1, 2)
    return (eval_solution(s, x) - eval_solution(s, x / 2)
            - eval_solution(s, (x + 1) / 2) + eval_solution(s, half))


def tensor_square(P: ProbabilityVector) -> ProbabilityVector:
    """Weights ``p_k * p_l`` at index ``2^m k + l``: the system of all ``f_k o f_l``."""
    return ProbabilityVector(2 * P.m, tuple(pk * pl for pk in P.weights for pl in P.weights))


def strict_nonintegral_witness(m: int, p, alpha) -> Convex:
    """``alpha * x + (1 - alpha) * phi_P`` with ``P = (0, ..., 0, p, 1 - p)``.

    Strictly increasing, yet its dyadic samples violate the limit condition
    every integral-form solution satisfies.
    """
    p, alpha = to_fraction(p), to_fraction(alpha)
    if m < 2:
        raise DomainError("witness needs m >= 2")
    if not 0 < p < 1 or not 0 < alpha < 1:
        raise DomainError("witness needs p and alpha in (0, 1)")
    return Convex(alpha, DeRham(Fraction(1, 2)), Averaged(ProbabilityVector.cantor_family(m, p)))


def is_strictly_increasing(s: SolutionExpr) -> bool:
    """Whether the expression class guarantees strict increase."""
    if isinstance(s, (DeRham, Integral)):
        return True
    if isinstance(s, Averaged):
        return s.P.full_support
    if isinstance(s, Convex):
        return ((s.alpha > 0 and is_strictly_increasing(s.left))
                or (s.alpha < 1 and is_strictly_increasing(s.right)))
    if isinstance(s, Series):
        return any(a > 0 and is_strictly_increasing(t) for a, t in s.terms)
    return False


# Closed forms for the family P = (0, ..., 0, p, 1 - p), m >= 2.

def averaged_zero_threshold(P: ProbabilityVector) -> Fraction:
    """Right end of ``{phi_P = 0}``: ``(2^m - 2^(m-1) - 1) / (2^m - 1)``."""
    if not P.is_cantor_family() or P.m < 2:
        raise DomainError("threshold is only known for P = (0, ..., 0, p, 1-p) with m >= 2")
    b = P.base
    return Fraction(b - b // 2 - 1, b - 1)


def half_value(P: ProbabilityVector) -> Fraction:
    """``phi_P(1/2) = p / m``."""
    if not P.is_cantor_family() or P.m < 2:
        raise DomainError("closed form needs P = (0, ..., 0, p, 1-p) with m >= 2")
    return P.weights[-2] / P.m


def singularity_probes(s: SolutionExpr, n_max: int = 32) -> tuple[list[Fraction], list[Fraction]]:
    """``2^n phi(2^-n)`` and ``2^n (1 - phi(1 - 2^-n))`` for ``n = 0..n_max``.

    Both tending to zero is the hypothesis of the singularity criterion at
    the corresponding endpoint; the values are reported, never a verdict.
    """
    left, right = [], []
    for n in range(n_max + 1):
        h = Fraction(1, 1 << n)
        left.append(eval_solution(s, h) / h)
        right.append((1 - eval_solution(s, 1 - h)) / h)
    return left, right


def probe_trend(values: list[Fraction]) -> str:
    """Heuristic label for a probe sequence."""
    if len(values) < 2:
        return "flat"
    if all(b < a for a, b in zip(values, values[1:])):
        return "decreasing"
    if all(b > a for a, b in zip(values, values[1:])):
        return "increasing"
    if values[0] == values[-1]:
        return "flat"
    return "mixed"
