"""Acceptance criteria 1-11, each at its stated parameters.

Run with ``pytest tests/test_acceptance.py`` (the summary lists one
PASS/FAIL line per criterion) or directly with ``python3 tests/test_acceptance.py``.
"""
import random
from fractions import Fraction as F

import pytest

from mwproblem.derham import eval_derham
from mwproblem.harness import enclosure_soundness_trial, random_expression, verify_paper_suite
from mwproblem.ifs import ProbabilityVector, eval_phi, phi_zero_threshold, self_replication_residual, zero_set_sequences
from mwproblem.moments import (
    NotAtomicError,
    complete_monotonicity_table,
    dyadic_samples,
    limit_condition_partial_sums,
    moments_of_measure,
    recover_discrete_measure,
)
from mwproblem.numerics import dyadic_grid, is_dyadic
from mwproblem.solutions import (
    Averaged,
    DeRham,
    Integral,
    MeasureSpec,
    eval_solution,
    eval_solution_enclosed,
    mw_residual,
    singularity_probes,
    strict_nonintegral_witness,
    tensor_square,
)

P_VALUES = (F(1, 3), F(1, 2), F(3, 4))
TWO_ATOMS = MeasureSpec(((F(1, 4), F(1, 2)), (F(3, 4), F(1, 2))))
WITNESS = strict_nonintegral_witness(2, F(1, 3), F(1, 2))
RESULTS = {}


def dyadic_powers():
    for p in (F(1, 3), F(2, 5), F(1, 2), F(3, 4)):
        for n in range(65):
            if eval_derham(p, F(1, 2**n)) != p**n:
                return False, f"p={p}, n={n}"
    return True, "4 parameters, n <= 64"


def functional_equation():
    exprs = [
        DeRham(F(1, 3)),
        Averaged(ProbabilityVector.cantor_family(2, F(1, 3))),
        Averaged(ProbabilityVector.cantor_family(3, F(1, 3))),
        Integral(TWO_ATOMS),
        WITNESS,
    ]
    grid = dyadic_grid(10)
    for s in exprs:
        bad = next((x for x in grid if mw_residual(s, x) != 0), None)
        if bad is not None:
            return False, f"{s} at x={bad}"
    return True, f"{len(exprs)} expressions x {len(grid)} points"


def half_value():
    for m in (2, 3, 4):
        for p in P_VALUES:
            s = Averaged(ProbabilityVector.cantor_family(m, p))
            if eval_solution(s, F(1, 2)) != p / m:
                return False, f"m={m}, p={p}: phi(1/2)={eval_solution(s, F(1, 2))}"
            for j in range(1, 21):
                if eval_solution(s, F(1, 2 ** (j + 1))) != 0:
                    return False, f"m={m}, p={p}, j={j}"
    return True, "m in {2,3,4}, j <= 20"


def zero_sets():
    grid = dyadic_grid(10)
    for m in (2, 3):
        b = 2**m
        t_cdf = F(b - 2, b - 1)
        t_sol = F(b - b // 2 - 1, b - 1)
        for p in P_VALUES:
            P = ProbabilityVector.cantor_family(m, p)
            if phi_zero_threshold(P) != t_cdf:
                return False, f"threshold for {P}"
            for x in grid:
                v = eval_phi(P, x)
                if (x <= t_cdf and v != 0) or (x > t_cdf and not v > 0):
                    return False, f"Phi_P at {x} for {P}"
                if (eval_solution(Averaged(P), x) == 0) != (x <= t_sol):
                    return False, f"phi_P at {x} for {P}"
            xs, ys = zero_set_sequences(m, 10)
            for q in range(11):
                if eval_phi(P, xs[q]) != 0 or eval_phi(P, ys[q]) != p ** (q + 1):
                    return False, f"sequences at q={q} for {P}"
    return True, "m in {2,3}, level 10, q <= 10"


def embedding():
    grid = dyadic_grid(8)
    for m in (1, 2):
        for p in P_VALUES:
            P = ProbabilityVector.cantor_family(m, p)
            Q = tensor_square(P)
            bad = next((x for x in grid if eval_solution(Averaged(P), x) != eval_solution(Averaged(Q), x)), None)
            if bad is not None:
                return False, f"{P} at {bad}"
    return True, "m in {1,2}, level 8"


def self_replication():
    vectors = [
        ProbabilityVector.cantor_family(2, F(1, 3)),
        ProbabilityVector.of(F(1, 8), 0, F(1, 2), F(3, 8)),
        ProbabilityVector.uniform_on(2, range(4)),
    ]
    assert vectors[-1].full_support
    for P in vectors:
        bad = next((x for x in dyadic_grid(8) if self_replication_residual(P, x) != 0), None)
        if bad is not None:
            return False, f"{P} at {bad}"
    return True, "3 vectors, level 8"


def integral_moments():
    for mu in (MeasureSpec.point(F(1, 3)), TWO_ATOMS):
        c = dyadic_samples(Integral(mu), 24)
        if c != moments_of_measure(mu, 24):
            return False, "dyadic samples differ from moments"
        table = complete_monotonicity_table(c)
        if table.tested != "k+n<=24" or not table.passed:
            return False, f"negative differences {table.negative()[:1]}"
        L = limit_condition_partial_sums(c)
        closed = [sum(w * (1 - p) ** n for p, w in mu.atoms) for n in range(25)]
        if L != closed:
            return False, "L(n) differs from sum of masses (1-p)^n"
        if not all(b < a for a, b in zip(L, L[1:])) or not L[24] < F(1, 1000):
            return False, f"L(24) = {float(L[24])}"
    return True, "k+n <= 24, L(24) < 1e-3"


def cantor_moments():
    P = ProbabilityVector.cantor_family(2, F(1, 3))
    L = limit_condition_partial_sums(dyadic_samples(Averaged(P), 24))
    if L != [1 - F(n, 6) for n in range(25)] or L[12] != -1:
        return False, "L(n) != 1 - n/6"
    Lw = limit_condition_partial_sums(dyadic_samples(WITNESS, 24))
    n = next((i for i, v in enumerate(Lw) if v < -1), None)
    if n is None:
        return False, f"witness min L = {min(Lw)}"
    return True, f"L(12) = -1, witness L({n}) = {float(Lw[n]):.4f}"


def recovery():
    got = recover_discrete_measure(moments_of_measure(TWO_ATOMS, 4), 2)
    if got != TWO_ATOMS:
        return False, f"recovered {got.atoms}"
    try:
        recover_discrete_measure((1, F(1, 6), 0, 0), 2)
    except NotAtomicError:
        return True, "round trip exact, (1, 1/6, 0, 0) rejected"
    return False, "(1, 1/6, 0, 0) was accepted"


def enclosure_soundness():
    rng = random.Random(20240101)
    budgets = [1, 2, 4, 8, 12, 16]
    for trial in range(200):
        s = random_expression(rng)
        den = rng.randint(2, 2000)
        x = F(rng.randint(0, den), den)
        widths = [eval_solution_enclosed(s, x, d).width for d in budgets]
        if any(b > a for a, b in zip(widths, widths[1:])):
            return False, f"trial {trial}: widths grow for {s} at {x}"
        w = enclosure_soundness_trial(s, x, budgets)
        if w:
            return False, f"trial {trial}: {w}"
    return True, "200 seeded trials"


def singularity():
    left, _ = singularity_probes(DeRham(F(1, 4)), 32)
    _, right = singularity_probes(DeRham(F(3, 4)), 32)
    expected = [F(1, 2**n) for n in range(33)]
    if left != expected or right != expected:
        return False, "probe differs from 2^-n"
    return True, "n <= 32, both endpoints"


CRITERIA = {
    1: ("dyadic powers", dyadic_powers),
    2: ("functional equation", functional_equation),
    3: ("half value and flat start", half_value),
    4: ("zero sets", zero_sets),
    5: ("tensor-square embedding", embedding),
    6: ("self-replication", self_replication),
    7: ("integral-solution moments", integral_moments),
    8: ("Cantor-type moment failure", cantor_moments),
    9: ("discrete measure recovery", recovery),
    10: ("enclosure soundness", enclosure_soundness),
    11: ("singularity probes", singularity),
}


def run_criterion(number):
    name, fn = CRITERIA[number]
    ok, detail = fn()
    line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {name}: {detail}"
    RESULTS[number] = line
    return ok, line


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number):
    ok, line = run_criterion(number)
    print(line)
    assert ok, line


def test_default_suite_passes():
    report = verify_paper_suite()
    assert report.passed, report.to_text()


if __name__ == "__main__":
    for number in sorted(CRITERIA):
        print(run_criterion(number)[1])
