"""Batch verification suites with exact witnesses.

A suite run is a pure function of its configuration: checks are executed in
a fixed order, results are sorted by check id and serialized with sorted
keys, so identical configs give byte-identical reports.
"""
from __future__ import annotations

import json
import random
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Optional

from . import derham, ifs, moments, solutions
from .ifs import ProbabilityVector
from .numerics import DomainError, dyadic_grid, format_rational, is_dyadic
from .solutions import (
    Averaged,
    DeRham,
    Integral,
    MeasureSpec,
    SolutionExpr,
    eval_solution,
    eval_solution_enclosed,
    mw_residual,
)

GRID_LEVEL_CAP = 16
GROUPS = ("derham", "ifs", "solutions", "moments")


def _jsonable(v):
    if isinstance(v, Fraction):
        return format_rational(v)
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    return v


@dataclass
class CheckResult:
    check_id: str
    passed: bool
    detail: str = ""
    witness: dict = field(default_factory=dict)

    @property
    def status(self) -> str:
        return "PASS" if self.passed else "FAIL"


@dataclass
class SuiteReport:
    suite_id: str
    checks: list[CheckResult]
    parameters: dict

    def __post_init__(self) -> None:
        self.checks = sorted(self.checks, key=lambda c: c.check_id)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {
            "suite_id": self.suite_id,
            "status": "PASS" if self.passed else "FAIL",
            "parameters": _jsonable(self.parameters),
            "checks": [
                {"check_id": c.check_id, "status": c.status, "detail": c.detail,
                 "witness": _jsonable(c.witness)}
                for c in self.checks
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def to_text(self) -> str:
        width = max((len(c.check_id) for c in self.checks), default=8)
        lines = [f"suite {self.suite_id}: {'PASS' if self.passed else 'FAIL'}"]
        for key in sorted(self.parameters):
            lines.append(f"  {key} = {_jsonable(self.parameters[key])}")
        for c in self.checks:
            line = f"  {c.check_id:<{width}}  {c.status}"
            if c.detail:
                line += f"  {c.detail}"
            lines.append(line)
            if not c.passed:
                for key in sorted(c.witness):
                    lines.append(f"      {key}: {_jsonable(c.witness[key])}")
        return "\n".join(lines) + "\n"


def _first_mismatch(points: Iterable, got: Callable, expected: Callable) -> Optional[dict]:
    """Witness ``{x, expected, got}`` at the first point where the two differ."""
    for x in points:
        g, e = got(x), expected(x)
        if g != e:
            return {"x": x, "expected": e, "got": g}
    return None


def _check(check_id: str, witness: Optional[dict], detail: str = "") -> CheckResult:
    return CheckResult(check_id, witness is None, detail, witness or {})


def verify_solution_suite(s: SolutionExpr, grid_level: int) -> SuiteReport:
    """Functional equation, boundary values and monotonicity on the full level grid."""
    if not 0 <= grid_level <= GRID_LEVEL_CAP:
        raise DomainError(f"grid level must be in 0..{GRID_LEVEL_CAP}")
    grid = dyadic_grid(grid_level)
    values = [eval_solution(s, x) for x in grid]
    checks = [
        _check("boundary", _first_mismatch(
            [Fraction(0), Fraction(1)], lambda x: eval_solution(s, x), lambda x: x)),
        _check("functional-equation", _first_mismatch(
            grid, lambda x: mw_residual(s, x), lambda x: Fraction(0)),
            f"{len(grid)} points"),
    ]
    bad = next((i for i in range(len(grid) - 1) if values[i + 1] < values[i]), None)
    checks.append(_check("monotone", None if bad is None else {
        "x": grid[bad], "y": grid[bad + 1], "expected": f">= {values[bad]}", "got": values[bad + 1]}))
    if solutions.is_strictly_increasing(s):
        bad = next((i for i in range(len(grid) - 1) if values[i + 1] <= values[i]), None)
        checks.append(_check("strictly-increasing", None if bad is None else {
            "x": grid[bad], "y": grid[bad + 1], "expected": f"> {values[bad]}", "got": values[bad + 1]}))
    return SuiteReport(f"solution:{s}", checks, {"grid_level": grid_level, "expression": str(s)})


def deep_dyadic_sample(seed: int, count: int, level: int) -> list[Fraction]:
    """``count`` pseudo-random points ``k / 2**level`` (seeded, reproducible)."""
    rng = random.Random(seed)
    den = 1 << level
    return [Fraction(rng.randrange(den + 1), den) for _ in range(count)]


MUTATIONS = ("half-value", "dyadic-powers", "embedding")


@dataclass(frozen=True)
class PaperSuiteConfig:
    m_values: tuple[int, ...] = (2, 3)
    p_values: tuple[Fraction, ...] = (Fraction(1, 3), Fraction(1, 2), Fraction(3, 4))
    level: int = 8
    N: int = 24
    seed: int = 0
    samples: int = 200
    groups: tuple[str, ...] = GROUPS
    mutate: Optional[str] = None

    def __post_init__(self) -> None:
        if self.mutate is not None and self.mutate not in MUTATIONS:
            raise DomainError(f"unknown mutation {self.mutate!r}; choose from {', '.join(MUTATIONS)}")
        if not 0 <= self.level <= GRID_LEVEL_CAP:
            raise DomainError(f"grid level must be in 0..{GRID_LEVEL_CAP}")
        for g in self.groups:
            if g not in GROUPS:
                raise DomainError(f"unknown suite group {g!r}")
        if self.N < 2:
            raise DomainError("moment order N must be >= 2")


def _scan(items: Iterable, label: str, probe: Callable) -> Optional[dict]:
    """First witness produced by ``probe`` over ``items``, tagged with the item."""
    for item in items:
        w = probe(item)
        if w:
            w[label] = item if isinstance(item, Fraction) else str(item)
            return w
    return None


def _derham_checks(cfg: PaperSuiteConfig) -> list[CheckResult]:
    out = []
    shift = 1 if cfg.mutate == "dyadic-powers" else 0
    ps = sorted(set(cfg.p_values) | {Fraction(2, 5)})
    w = _scan(ps, "p", lambda p: _first_mismatch(
        range(65), lambda n: derham.eval_derham(p, Fraction(1, 1 << n)), lambda n: p ** (n + shift)))
    out.append(_check("derham.dyadic-powers", w, "phi_p(2^-n) = p^n, n <= 64"))

    w = _scan(ps, "p", lambda p: _first_mismatch(
        dyadic_grid(cfg.level), lambda x: derham.reflect_check(p, x)[0], lambda x: derham.reflect_check(p, x)[1]))
    out.append(_check("derham.reflection", w))

    # Left probe for p = 1/4 and right probe for p = 3/4 both equal 2^-n.
    left, _ = solutions.singularity_probes(DeRham(Fraction(1, 4)), 32)
    _, right = solutions.singularity_probes(DeRham(Fraction(3, 4)), 32)
    w = (_first_mismatch(range(33), lambda n: left[n], lambda n: Fraction(1, 1 << n))
         or _first_mismatch(range(33), lambda n: right[n], lambda n: Fraction(1, 1 << n)))
    out.append(_check("derham.singularity-probes", w,
                      f"trend {solutions.probe_trend(left)}/{solutions.probe_trend(right)}"))
    return out


def _cantor_vectors(cfg: PaperSuiteConfig) -> list[ProbabilityVector]:
    return [ProbabilityVector.cantor_family(m, p) for m in cfg.m_values for p in cfg.p_values]


def _zero_set_witness(P: ProbabilityVector, grid: list[Fraction]) -> Optional[dict]:
    t = ifs.phi_zero_threshold(P)
    xs, ys = ifs.zero_set_sequences(P.m, 10)
    p = P.weights[-2]
    return (_first_mismatch(grid, lambda x: ifs.eval_phi(P, x) == 0, lambda x: x <= t)
            or _first_mismatch(range(11), lambda q: ifs.eval_phi(P, xs[q]), lambda q: Fraction(0))
            or _first_mismatch(range(11), lambda q: ifs.eval_phi(P, ys[q]), lambda q: p ** (q + 1)))


def _gap_witness(P: ProbabilityVector) -> Optional[dict]:
    for a, b in ifs.attractor_approx(P, 2).gaps():
        fa, fb = ifs.eval_phi(P, a), ifs.eval_phi(P, b)
        if fa != fb:
            return {"x": a, "y": b, "expected": fa, "got": fb}
    return None


def _ifs_checks(cfg: PaperSuiteConfig) -> list[CheckResult]:
    grid = dyadic_grid(cfg.level)
    vectors = _cantor_vectors(cfg) + [ProbabilityVector.of(*[Fraction(1, 4)] * 4)]
    return [
        _check("ifs.self-replication", _scan(vectors, "P", lambda P: _first_mismatch(
            grid, lambda x: ifs.self_replication_residual(P, x), lambda x: Fraction(0))),
            f"{len(vectors)} vectors"),
        _check("ifs.zero-set", _scan(_cantor_vectors(cfg), "P", lambda P: _zero_set_witness(P, grid)),
               "Phi_P = 0 iff x <= (2^m-2)/(2^m-1)"),
        _check("ifs.gap-constancy", _scan(vectors, "P", _gap_witness)),
    ]


def _half_value_witness(P: ProbabilityVector, denom_shift: int) -> Optional[dict]:
    phi = Averaged(P)
    got = eval_solution(phi, Fraction(1, 2))
    expected = P.weights[-2] / (P.m + denom_shift)
    if got != expected:
        return {"x": Fraction(1, 2), "expected": expected, "got": got}
    return _first_mismatch(range(1, 21), lambda j: eval_solution(phi, Fraction(1, 1 << (j + 1))),
                           lambda j: Fraction(0))


def _solution_checks(cfg: PaperSuiteConfig) -> list[CheckResult]:
    out = []
    grid = dyadic_grid(cfg.level)
    shift = 1 if cfg.mutate == "half-value" else 0

    family = [ProbabilityVector.cantor_family(m, p) for m in sorted(set(cfg.m_values) | {4}) for p in cfg.p_values]
    out.append(_check("solutions.half-value", _scan(family, "P", lambda P: _half_value_witness(P, shift)),
                      "phi_P(1/2) = p/m, phi_P(2^-(j+1)) = 0"))

    def flat(P):
        t = solutions.averaged_zero_threshold(P)
        return _first_mismatch(grid, lambda x: eval_solution(Averaged(P), x) == 0, lambda x: x <= t)

    out.append(_check("solutions.flat-zero-set", _scan(_cantor_vectors(cfg), "P", flat),
                      "phi_P = 0 iff x <= (2^m-2^(m-1)-1)/(2^m-1)"))

    def embedding(P):
        Q = solutions.tensor_square(P)
        if cfg.mutate == "embedding":
            Q = solutions.tensor_square(ProbabilityVector.of(Fraction(1, 2), Fraction(1, 2)))
        return _first_mismatch(grid, lambda x: eval_solution(Averaged(Q), x),
                               lambda x: eval_solution(Averaged(P), x))

    vectors = ([ProbabilityVector.of(p, 1 - p) for p in cfg.p_values]
               + [ProbabilityVector.cantor_family(2, p) for p in cfg.p_values])
    out.append(_check("solutions.embedding", _scan(vectors, "P", embedding), "phi_P = phi_(P x P)"))

    exprs = _standard_expressions(cfg)
    w = _scan(exprs, "expression", lambda s: _first_mismatch(
        grid, lambda x: mw_residual(s, x), lambda x: Fraction(0)))
    out.append(_check("solutions.functional-equation", w, f"{len(exprs)} expressions"))

    deep = deep_dyadic_sample(cfg.seed, 64, 40)
    w = _scan(exprs, "expression", lambda s: _first_mismatch(
        deep, lambda x: mw_residual(s, x), lambda x: Fraction(0)))
    out.append(_check("solutions.deep-dyadic-residual", w, f"seed {cfg.seed}, 64 points at level 40"))

    out.append(_enclosure_soundness(cfg))
    return out


def _standard_expressions(cfg: PaperSuiteConfig) -> list[SolutionExpr]:
    exprs: list[SolutionExpr] = [DeRham(Fraction(1, 3))]
    exprs += [Averaged(ProbabilityVector.cantor_family(m, Fraction(1, 3))) for m in cfg.m_values]
    exprs.append(Integral(MeasureSpec(((Fraction(1, 4), Fraction(1, 2)), (Fraction(3, 4), Fraction(1, 2))))))
    exprs.append(solutions.strict_nonintegral_witness(2, Fraction(1, 3), Fraction(1, 2)))
    return exprs


def random_expression(rng: random.Random) -> SolutionExpr:
    """A random de Rham or averaged solution with small rational parameters."""
    def rand_p():
        den = rng.randint(2, 12)
        return Fraction(rng.randint(1, den - 1), den)

    if rng.random() < 0.4:
        return DeRham(rand_p())
    m = rng.randint(1, 3)
    base = 1 << m
    raw = [rng.randint(0, 4) for _ in range(base)]
    while sum(1 for r in raw if r) < 2:
        raw[rng.randrange(base)] = rng.randint(1, 4)
    total = sum(raw)
    return Averaged(ProbabilityVector(m, tuple(Fraction(r, total) for r in raw)))


def enclosure_soundness_trial(s: SolutionExpr, x: Fraction, budgets: list[int]) -> Optional[dict]:
    """Check nesting of enclosures and containment of values at refinements of ``x``.

    For non-dyadic ``x`` the refinements are the two neighbouring dyadic
    points of a level deep enough that they share every inspected digit
    with ``x``; their values are exact and must lie in every enclosure.
    """
    if is_dyadic(x):
        refinements = [x]
    else:
        base_bits = s.P.m if isinstance(s, Averaged) else 1
        deep = base_bits * max(budgets) + x.denominator.bit_length() + 8
        den = 1 << deep
        below = Fraction((x.numerator * den) // x.denominator, den)
        refinements = [below, below + Fraction(1, den)]
    exact = [eval_solution(s, r) for r in refinements]
    prev = None
    for d in budgets:
        enc = eval_solution_enclosed(s, x, d)
        for r, v in zip(refinements, exact):
            if v not in enc:
                return {"expression": str(s), "x": x, "digits": d, "refinement": r,
                        "expected": str(enc), "got": v}
        if prev is not None and not prev.contains_enclosure(enc):
            return {"expression": str(s), "x": x, "digits": d, "expected": f"inside {prev}", "got": str(enc)}
        prev = enc
    return None


def _enclosure_soundness(cfg: PaperSuiteConfig) -> CheckResult:
    rng = random.Random(cfg.seed)
    w = None
    for _ in range(cfg.samples):
        s = random_expression(rng)
        den = rng.randint(1, 1000)
        x = Fraction(rng.randint(0, den), den)
        w = enclosure_soundness_trial(s, x, [1, 2, 4, 8, 12])
        if w:
            break
    return _check("solutions.enclosure-soundness", w, f"{cfg.samples} seeded trials, seed {cfg.seed}")


def _moment_checks(cfg: PaperSuiteConfig) -> list[CheckResult]:
    out = []
    N = cfg.N
    measures = [MeasureSpec.point(Fraction(1, 3)),
                MeasureSpec(((Fraction(1, 4), Fraction(1, 2)), (Fraction(3, 4), Fraction(1, 2))))]
    w = None
    for mu in measures:
        c = moments.dyadic_samples(Integral(mu), N)
        if c != moments.moments_of_measure(mu, N):
            w = w or {"measure": str(Integral(mu)), "expected": moments.moments_of_measure(mu, N).values,
                      "got": c.values}
        table = moments.complete_monotonicity_table(c)
        if not table.passed:
            k, n, v = table.negative()[0]
            w = w or {"measure": str(Integral(mu)), "x": f"Delta({k},{n})", "expected": ">= 0", "got": v}
        L = moments.limit_condition_partial_sums(c)
        closed = [sum((wt * (1 - p) ** n for p, wt in mu.atoms), Fraction(0)) for n in range(N + 1)]
        if L != closed:
            n = next(i for i in range(N + 1) if L[i] != closed[i])
            w = w or {"measure": str(Integral(mu)), "x": f"L({n})", "expected": closed[n], "got": L[n]}
        if not all(b < a for a, b in zip(L, L[1:])) or L[-1] >= Fraction(1, 1000):
            w = w or {"measure": str(Integral(mu)), "x": f"L({N})", "expected": "< 1/1000, decreasing", "got": L[-1]}
    out.append(_check("moments.integral-solutions", w, f"k+n <= {N}"))

    w = None
    for m in cfg.m_values:
        for p in cfg.p_values:
            P = ProbabilityVector.cantor_family(m, p)
            L = moments.limit_condition_partial_sums(moments.dyadic_samples(Averaged(P), N))
            w = w or _first_mismatch(range(N + 1), lambda n: L[n], lambda n: 1 - n * p / m)
            if w:
                w["P"] = str(P)
    witness = solutions.strict_nonintegral_witness(2, Fraction(1, 3), Fraction(1, 2))
    L = moments.limit_condition_partial_sums(moments.dyadic_samples(witness, N))
    if not any(v < -1 for v in L):
        w = w or {"expression": str(witness), "expected": "some L(n) < -1", "got": min(L)}
    out.append(_check("moments.cantor-divergence", w, "L(n) = 1 - n p/m"))

    w = None
    for s in [DeRham(Fraction(1, 3)), Averaged(ProbabilityVector.cantor_family(2, Fraction(1, 3))), witness]:
        res = moments.monotonicity_forced_inequalities(s, min(N, 20))
        if not res.passed:
            w = w or {"expression": str(s), "expected": "PASS", "got": "FAIL"}
    out.append(_check("moments.forced-inequalities", w))

    w = None
    mu = measures[1]
    got = moments.recover_discrete_measure(moments.moments_of_measure(mu, 4), 2)
    if got != mu:
        w = {"expected": str(Integral(mu)), "got": str(Integral(got))}
    try:
        moments.recover_discrete_measure([1, Fraction(1, 6), 0, 0], 2)
        w = w or {"x": "(1, 1/6, 0, 0)", "expected": "NotAtomicError", "got": "a measure"}
    except moments.NotAtomicError:
        pass
    out.append(_check("moments.recovery", w))
    return out


_GROUP_RUNNERS = {
    "derham": _derham_checks,
    "ifs": _ifs_checks,
    "solutions": _solution_checks,
    "moments": _moment_checks,
}


def verify_paper_suite(cfg: PaperSuiteConfig = PaperSuiteConfig()) -> SuiteReport:
    checks: list[CheckResult] = []
    for group in GROUPS:
        if group in cfg.groups:
            checks.extend(_GROUP_RUNNERS[group](cfg))
    params = asdict(cfg)
    params["groups"] = list(cfg.groups)
    return SuiteReport("all" if set(cfg.groups) == set(GROUPS) else "+".join(cfg.groups), checks, params)
