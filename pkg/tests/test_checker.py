import os
import shlex
from collections import Counter

import pytest

import cli
from services.algebra import is_ideal, nilpotent_residual
from services.bimodule import adjoint_bimodule, composition_series, restrict_to, trivial_bimodule
from services.checker import (
    CheckResult,
    Status,
    SuiteConfig,
    SuiteReport,
    _artifact,
    artifact_stem,
    check_instance,
    run_suite,
    suite_instances,
    verify_corollary,
    verify_lemma1,
    verify_lemma2,
    verify_restricted_schur,
    verify_schur,
    verify_theorem1,
    verify_theorem2,
    write_failure_artifacts,
)
from services.constructions import catalogue_entry, heisenberg_3
from services.exact_linalg import gf

TINY = dict(fields=('2',), max_dim=4, budget=5, k_max=4, include_catalogue=False)


@pytest.fixture
def sl2_modules():
    return {v.name: v for v in catalogue_entry(gf(3), 'sl2').bimodules}


def test_lemma1_branches(sl2_gf3, sl2_modules):
    antisymmetric = verify_lemma1(sl2_gf3, sl2_modules['natural_antisymmetric'])
    assert antisymmetric.passed
    assert 'branch=VL=0 K=V' in antisymmetric.detail
    symmetric = verify_lemma1(sl2_gf3, sl2_modules['natural_symmetric'])
    assert symmetric.passed
    assert 'branch=vx=-xv K=0' in symmetric.detail
    trivial = verify_lemma1(sl2_gf3, trivial_bimodule(sl2_gf3, 1))
    assert trivial.passed
    assert 'dim C=3' in trivial.detail and 'branch=both K=V' in trivial.detail


def test_lemma1_skips(heis, sl2_gf3):
    over_rationals = verify_lemma1(heis, adjoint_bimodule(heis))
    assert over_rationals.status == Status.SKIP
    assert 'GF(p)' in over_rationals.detail
    reducible = verify_lemma1(heisenberg_3(gf(2)), adjoint_bimodule(heisenberg_3(gf(2))))
    assert reducible.status == Status.SKIP
    assert reducible.detail == "bimodule is not irreducible"


def test_theorem1(sl2_gf3, sl2_modules, unit):
    natural = sl2_modules['natural_symmetric']
    assert verify_theorem1(sl2_gf3, sl2_gf3.full(), natural).passed
    on_zero = verify_theorem1(sl2_gf3, sl2_gf3.zero(), natural)
    assert on_zero.passed
    assert 'factors=1,1' in on_zero.detail
    borel = unit(sl2_gf3, 0, 1)
    skipped = verify_theorem1(sl2_gf3, borel, natural)
    assert skipped.status == Status.SKIP
    assert 'not subnormal' in skipped.detail


def test_non_subnormal_restriction_has_distinct_factors(sl2_gf3, sl2_modules, unit):
    report = composition_series(restrict_to(sl2_modules['natural_symmetric'], unit(sl2_gf3, 0, 1)))
    assert report.factor_dims == [1, 1]
    assert len(report.iso_classes) == 2


def test_schur(sl2_gf3, sl2_modules):
    result = verify_restricted_schur(sl2_gf3, sl2_gf3.full(), sl2_modules['ad(sl2)'])
    assert result.passed
    assert result.detail == "pairs=1 max hom dim=1"
    factors = composition_series(adjoint_bimodule(heisenberg_3(gf(2)))).factors
    repeated = verify_schur(factors)
    assert repeated.passed
    assert repeated.detail.startswith("pairs=6")
    assert verify_schur(()).status == Status.SKIP


def test_lemma2(heis, r2, unit):
    result = verify_lemma2(heis, unit(heis, 0), heis.full(), 4)
    assert result.passed
    assert result.detail == "k<=4 dim U=1 dim V=3"
    assert verify_lemma2(r2, unit(r2, 0), unit(r2, 1), 6).passed


def test_residual_checks(heis, r2, sl2_q, unit):
    assert verify_theorem2(heis, unit(heis, 0)).passed
    assert verify_corollary(sl2_q, sl2_q.full()).passed
    for verify in (verify_corollary, verify_theorem2):
        result = verify(r2, unit(r2, 0))
        assert result.status == Status.SKIP
        assert result.detail == "hypothesis: subalgebra is not subnormal"


def test_result_formatting():
    result = CheckResult('gf2-s7-0003', 'theorem2:u1', Status.PASS, 'ok')
    assert result.line() == "gf2-s7-0003 theorem2:u1 PASS ok"
    assert result.to_dict()['status'] == 'PASS'
    assert artifact_stem(CheckResult('q-cat-sl2', 'schur:u0:f1', Status.FAIL, '')) == 'q-cat-sl2__schur_u0_f1'


def test_small_suite_passes_and_is_deterministic():
    config = SuiteConfig(**TINY)
    report = run_suite(config)
    assert report.instances == 5
    assert report.counts()['FAIL'] == 0
    assert report.exit_status() == 0
    assert report.to_text() == run_suite(config).to_text()
    assert report.to_text().splitlines()[-1] == report.summary_line()
    summary = report.to_dict()['summary']
    assert summary['total_checks'] == len(report.results)


def test_parallel_suite_matches_serial():
    serial = run_suite(SuiteConfig(**TINY))
    parallel = run_suite(SuiteConfig(jobs=2, **TINY))
    assert parallel.to_text() == serial.to_text()


def test_dropping_hypotheses_reports_witnesses():
    report = run_suite(SuiteConfig(fields=('3',), max_dim=4, budget=3, k_max=3, drop_hypotheses=True))
    text = report.to_text()
    assert "HYPOTHESIS WITNESSES" in text
    assert report.counts()['FAIL'] == 0


def test_witnesses_count_only_genuine_ideality_failures():
    config = SuiteConfig(fields=('2', '3'), max_dim=5, budget=20, k_max=3, drop_hypotheses=True)
    witnesses = genuine = 0
    for instance in suite_instances(config):
        witnesses += check_instance(instance, config).witnesses
        for specimen in instance.specimens:
            if not specimen.subnormal:
                genuine += not is_ideal(instance.algebra, nilpotent_residual(instance.algebra, specimen.space))
    assert witnesses == genuine


def test_profiles_and_overrides():
    config = SuiteConfig.from_profile('quick', budget=3, seed=None)
    assert config.fields == ('2', '3')
    assert config.budget == 3
    assert config.seed == 7
    assert SuiteConfig.from_profile('explore').drop_hypotheses
    assert SuiteConfig.from_profile('default', fields=[5]).fields == ('5',)
    with pytest.raises(KeyError):
        SuiteConfig.from_profile('nightly')


def test_failure_artifacts_replay(tmp_path, heis, unit, capsys):
    u = unit(heis, 0)
    failure = CheckResult('q-demo', 'theorem2:u0', Status.FAIL, 'forced',
                          artifact=_artifact(heis, 'theorem2', u=u))
    report = SuiteReport(SuiteConfig(**TINY), results=[failure])
    written = write_failure_artifacts(report, str(tmp_path))
    stem = os.path.join(str(tmp_path), 'q-demo__theorem2_u0')
    assert written == [stem + '.alg', stem + '.cmd']
    with open(stem + '.cmd') as f:
        command = shlex.split(f.read())
    assert command[:3] == ['python', 'cli.py', 'check']
    assert cli.main(command[2:]) == 0
    assert 'theorem2 PASS' in capsys.readouterr().out


@pytest.mark.slow
def test_default_suite_reaches_acceptance_sizes():
    report = run_suite(SuiteConfig.from_profile('default', fields=['2', '3']))
    ran = Counter(r.check.split(':')[0] for r in report.results if r.status is not Status.SKIP)
    assert ran['lemma1'] >= 100
    assert ran['theorem1'] >= 100
    assert ran['schur'] >= 100
    assert report.counts()['FAIL'] == 0
