import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from services.algebra import is_ideal, lower_central_series
from services.constructions import cyclic_leibniz, generate, heisenberg_3, sl2
from services.errors import HypothesisViolationError, NotASubalgebraError, NotContainedError
from services.exact_linalg import gf
from services.subnormal import (
    ideal_closure,
    residual_ideal_check,
    residual_right_ideal_check,
    subnormal_chain,
)


def test_ideal_closure(r2, heis, unit):
    assert ideal_closure(r2, unit(r2, 0), r2.full()).is_full()
    assert ideal_closure(heis, unit(heis, 0), heis.full()) == unit(heis, 0, 2)
    ideal = unit(r2, 1)
    assert ideal_closure(r2, ideal, r2.full()) == ideal


gf3_rows = st.lists(st.tuples(*[st.integers(0, 2)] * 3), max_size=3)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([heisenberg_3(gf(3)), cyclic_leibniz(gf(3), 3), sl2(gf(3))]), gf3_rows, gf3_rows)
def test_ideal_closure_is_monotone_in_u(alg, xs, more):
    u = alg.span(xs)
    bigger = u.sum(alg.span(more))
    whole = alg.full()
    outer = ideal_closure(alg, bigger, whole)
    assert outer.contains(ideal_closure(alg, u, whole))
    inner = ideal_closure(alg, bigger, outer)
    assert inner.contains(ideal_closure(alg, u, outer))
    assert outer.contains(inner)


def test_ideal_closure_needs_containment(heis, unit):
    with pytest.raises(NotContainedError):
        ideal_closure(heis, unit(heis, 0), unit(heis, 2))


def test_whole_algebra_has_defect_zero(heis):
    report = subnormal_chain(heis, heis.full())
    assert report.subnormal
    assert report.defect == 0


def test_r2_chains(r2, unit):
    ideal = subnormal_chain(r2, unit(r2, 1))
    assert ideal.subnormal and ideal.defect == 1
    line = subnormal_chain(r2, unit(r2, 0))
    assert not line.subnormal
    assert line.defect is None
    assert line.dims == [2]
    assert line.describe().startswith("NOT SUBNORMAL")


def test_heisenberg_defect_two(heis, unit):
    report = subnormal_chain(heis, unit(heis, 0))
    assert report.subnormal
    assert report.defect == 2
    assert report.dims == [3, 2, 1]
    assert report.chain[1] == unit(heis, 0, 2)
    for outer, inner in zip(report.chain, report.chain[1:]):
        assert outer.contains(inner) and outer != inner


def test_chain_needs_a_subalgebra(c2, unit):
    with pytest.raises(NotASubalgebraError):
        subnormal_chain(c2, unit(c2, 0))


def test_series_terms_are_subnormal(sl2_q, heis, r2):
    for alg in (sl2_q, heis, r2):
        for term in lower_central_series(alg).terms:
            assert subnormal_chain(alg, term).subnormal


def test_perfect_algebra_residual(sl2_q):
    report = residual_right_ideal_check(sl2_q, sl2_q.full())
    assert report.residual.is_full()
    assert report.passed


def test_nilpotent_subalgebra_residual(heis, unit):
    report = residual_ideal_check(heis, unit(heis, 0))
    assert report.residual.is_zero()
    assert report.defect == 2
    assert report.passed
    assert 'LR<=R' in report.checks
    assert 'LR<=lambda^0L+R' in report.checks


def test_hypothesis_is_enforced(r2, unit):
    with pytest.raises(HypothesisViolationError):
        residual_right_ideal_check(r2, unit(r2, 0))
    report = residual_ideal_check(r2, unit(r2, 0), report_only=True)
    assert not report.subnormal
    assert report.residual.is_zero()
    assert report.passed


def test_report_only_judges_ideality_alone(r2, unit):
    report = residual_ideal_check(r2, unit(r2, 0), report_only=True)
    assert set(report.checks) == {'RL<=R', 'LR<=R'}
    assert report.defect is None
    assert report.lambda_term is None
    assert not report.ideality_failed
    assert report.describe().startswith('pass; not subnormal')


def test_subnormal_line_of_r2_passes(r2, unit):
    report = residual_ideal_check(r2, unit(r2, 1))
    assert report.subnormal and report.defect == 1
    assert report.residual.is_zero()
    assert report.passed
    assert 'lambda^(r+s)L<=U^s' in report.checks


def test_dropping_subnormality_can_break_ideality(sl2_q, unit):
    borel = unit(sl2_q, 0, 1)
    report = residual_ideal_check(sl2_q, borel, report_only=True)
    assert report.residual == unit(sl2_q, 0)
    assert not report.passed
    assert 'LR<=R' in report.failed_checks
    assert report.ideality_failed


def test_generated_subnormal_residuals_are_ideals():
    for instance in generate(3, gf(2), 5, 15):
        alg = instance.algebra
        for specimen in instance.specimens:
            if not specimen.subnormal:
                continue
            report = residual_ideal_check(alg, specimen.space)
            assert report.passed, (instance.instance_id, report.describe())
            assert is_ideal(alg, report.residual)
