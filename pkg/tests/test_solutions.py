from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from mwproblem.ifs import ProbabilityVector
from mwproblem.numerics import DomainError, ModeError, dyadic_grid
from mwproblem.solutions import (
    Averaged,
    Convex,
    DeRham,
    Density,
    Integral,
    MeasureSpec,
    Series,
    averaged_zero_threshold,
    eval_solution,
    eval_solution_enclosed,
    half_value,
    is_strictly_increasing,
    mw_residual,
    probe_trend,
    singularity_probes,
    strict_nonintegral_witness,
    tensor_square,
)

from oracles import averaged_by_cylinders, derham_system

CANTOR2 = ProbabilityVector.cantor_family(2, F(1, 3))
TWO_ATOMS = MeasureSpec(((F(1, 4), F(1, 2)), (F(3, 4), F(1, 2))))
dyadics = st.integers(0, 12).flatmap(lambda n: st.builds(lambda k: F(k, 2**n), st.integers(0, 2**n)))


def test_averaged_hand_values():
    s = Averaged(CANTOR2)
    assert s.eval(F(1, 2)) == F(1, 6)
    assert s.eval(F(1, 4)) == 0
    assert s.eval(0) == 0 and s.eval(1) == 1


@settings(max_examples=40)
@given(st.integers(1, 2), st.integers(0, 5).flatmap(lambda n: st.builds(lambda k: F(k, 2**n), st.integers(0, 2**n))))
def test_averaged_matches_cylinder_oracle(m, x):
    P = ProbabilityVector.cantor_family(m, F(2, 5))
    assert eval_solution(Averaged(P), x) == averaged_by_cylinders(P.weights, x)


def test_integral_of_atoms():
    s = Integral(TWO_ATOMS)
    for x in dyadic_grid(6):
        expected = (derham_system(F(1, 4), x) + derham_system(F(3, 4), x)) / 2
        assert s.eval(x) == expected
    assert Integral(MeasureSpec.point(F(1, 3))).eval(F(1, 8)) == F(1, 27)


def test_witness_value():
    psi = strict_nonintegral_witness(2, F(1, 3), F(1, 2))
    assert psi.eval(F(1, 2)) == F(1, 3)
    assert isinstance(psi.left, DeRham) and psi.left.p == F(1, 2)
    with pytest.raises(DomainError):
        strict_nonintegral_witness(1, F(1, 3), F(1, 2))


EXPRESSIONS = [
    DeRham(F(1, 3)),
    Averaged(CANTOR2),
    Averaged(ProbabilityVector.cantor_family(3, F(1, 3))),
    Integral(TWO_ATOMS),
    strict_nonintegral_witness(2, F(1, 3), F(1, 2)),
    Series(((F(1, 2), DeRham(F(1, 5))), (F(1, 4), Averaged(CANTOR2)), (F(1, 4), Integral(TWO_ATOMS)))),
]


@pytest.mark.parametrize("s", EXPRESSIONS, ids=str)
def test_functional_equation_on_grid(s):
    assert s.eval(0) == 0 and s.eval(1) == 1
    assert all(mw_residual(s, x) == 0 for x in dyadic_grid(8))


@pytest.mark.parametrize("s", EXPRESSIONS, ids=str)
def test_monotone_on_grid(s):
    values = [s.eval(x) for x in dyadic_grid(7)]
    if is_strictly_increasing(s):
        assert all(a < b for a, b in zip(values, values[1:]))
    else:
        assert all(a <= b for a, b in zip(values, values[1:]))


def test_strictness_classification():
    assert not is_strictly_increasing(Averaged(CANTOR2))
    assert is_strictly_increasing(Averaged(ProbabilityVector.uniform_on(2, range(4))))
    assert is_strictly_increasing(strict_nonintegral_witness(3, F(1, 2), F(1, 10)))
    assert not is_strictly_increasing(Convex(1, Averaged(CANTOR2), DeRham(F(1, 3))))


@pytest.mark.parametrize("m", [2, 3, 4])
@pytest.mark.parametrize("p", [F(1, 3), F(1, 2), F(3, 4)])
def test_half_value_and_flat_start(m, p):
    P = ProbabilityVector.cantor_family(m, p)
    s = Averaged(P)
    assert s.eval(F(1, 2)) == half_value(P) == p / m
    for j in range(1, 21):
        assert s.eval(F(1, 2 ** (j + 1))) == 0


@pytest.mark.parametrize("m", [2, 3])
def test_averaged_zero_set(m):
    P = ProbabilityVector.cantor_family(m, F(1, 3))
    t = averaged_zero_threshold(P)
    assert t == F(2**m - 2 ** (m - 1) - 1, 2**m - 1)
    for x in dyadic_grid(10):
        assert (eval_solution(Averaged(P), x) == 0) == (x <= t)


@pytest.mark.parametrize("P", [
    ProbabilityVector.of(F(1, 3), F(2, 3)),
    ProbabilityVector.uniform_on(1, [0, 1]),
    CANTOR2,
    ProbabilityVector.of(F(1, 8), 0, F(1, 2), F(3, 8)),
], ids=str)
def test_tensor_square_embedding(P):
    Q = tensor_square(P)
    assert Q.m == 2 * P.m
    assert Q.weights[(2**P.m) * 1 + 0] == P.weights[1] * P.weights[0]
    for x in dyadic_grid(8):
        assert eval_solution(Averaged(P), x) == eval_solution(Averaged(Q), x)


def test_exact_mode_refusals():
    with pytest.raises(ModeError):
        eval_solution(DeRham(F(1, 3)), F(1, 3))
    dens = Integral(MeasureSpec(density=Density("uniform")))
    with pytest.raises(ModeError):
        eval_solution(dens, F(1, 4))
    tail = Series(((F(1, 2), DeRham(F(1, 3))),), tail=F(1, 2))
    with pytest.raises(ModeError):
        eval_solution(tail, F(1, 4))


def test_measure_validation():
    with pytest.raises(DomainError):
        MeasureSpec(((F(1, 2), F(1, 2)),))
    with pytest.raises(DomainError):
        MeasureSpec(((F(1), F(1)),))
    with pytest.raises(DomainError):
        MeasureSpec(((F(1, 2), F(1, 2)), (F(1, 2), F(1, 2))))
    with pytest.raises(DomainError):
        Density("cauchy")
    with pytest.raises(DomainError):
        Series(((F(1, 2), DeRham(F(1, 3))),))


@pytest.mark.parametrize("name,x,value", [
    ("uniform", F(1, 4), F(1, 3)),
    ("uniform", F(1, 2), F(1, 2)),
    ("beta(2,2)", F(1, 4), F(3, 10)),
])
def test_density_integrals_are_enclosed(name, x, value):
    s = Integral(MeasureSpec(density=Density(name)))
    e = eval_solution_enclosed(s, x, 32)
    assert value in e
    assert e.width < F(1, 10**9)
    assert e.quadrature_tol > 0


def test_mixed_atom_and_density():
    mu = MeasureSpec(((F(1, 2), F(1, 2)),), Density("uniform", mass=F(1, 2)))
    e = eval_solution_enclosed(Integral(mu), F(1, 4), 20)
    assert F(1, 8) + F(1, 6) in e


def test_series_tail_widens():
    s = Series(((F(3, 4), DeRham(F(1, 3))),), tail=F(1, 4))
    e = eval_solution_enclosed(s, F(1, 8), 10)
    assert (e.lo, e.hi) == (F(3, 4) * F(1, 27), F(3, 4) * F(1, 27) + F(1, 4))


@settings(max_examples=50)
@given(st.sampled_from(EXPRESSIONS), st.fractions(0, 1), st.integers(1, 30))
def test_enclosures_contain_refined_enclosures(s, x, d):
    coarse = eval_solution_enclosed(s, x, d)
    fine = eval_solution_enclosed(s, x, d + 8)
    assert coarse.contains_enclosure(fine)


@given(st.sampled_from(EXPRESSIONS), dyadics, st.integers(1, 40))
def test_enclosures_contain_exact_dyadic_values(s, x, d):
    assert s.eval(x) in eval_solution_enclosed(s, x, d)


def test_singularity_probes():
    left, right = singularity_probes(DeRham(F(1, 4)), 32)
    assert left == [F(1, 2) ** n for n in range(33)]
    assert probe_trend(left) == "decreasing"
    left, right = singularity_probes(DeRham(F(3, 4)), 32)
    assert right == [F(1, 2) ** n for n in range(33)]
    left, _ = singularity_probes(DeRham(F(1, 2)), 10)
    assert probe_trend(left) == "flat"


def test_str_round_trips_through_parser():
    from mwproblem.expr import parse_expr
    for s in EXPRESSIONS:
        assert parse_expr(str(s)) == s
