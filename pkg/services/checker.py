"""
Executable checks of the structure results, run over catalogue and generated instances

Each check returns a ``CheckResult`` whose status is PASS, FAIL or SKIP. A SKIP
always carries its reason (no irreducibility certificate over the rationals, a
hypothesis that does not hold, an enumeration budget). FAIL results carry the
texts needed to reproduce them from the command line.
"""

import logging
import os
import re
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field as dataclass_field
from enum import Enum
from itertools import repeat
from typing import Dict, List, Optional, Tuple

from config.suite_profiles import get_profile
from services.algebra import is_lie, is_subalgebra, left_centre, lower_central_series, product
from services.bimodule import (
    certify_irreducible,
    composition_series,
    faithful_quotient,
    hom_matrix,
    hom_space,
    iso_partition,
    isomorphic_irreducibles,
    restrict_to,
    split_extension,
)
from services.constructions import catalogue_instances, generate, module_ideal
from services.errors import (
    BudgetExceededError,
    HypothesisViolationError,
    KernelInvariantError,
    NotASubalgebraError,
    PreconditionError,
)
from services.exact_linalg import enumerate_vectors, field_from_token
from services.file_formats import format_algebra, format_bimodule, format_rows, write_text
from services.subnormal import residual_ideal_check, residual_right_ideal_check, subnormal_chain

logger = logging.getLogger(__name__)

MAX_ORACLE_HOM_DIM = 8
MAX_SCHUR_FACTORS = 4


class Status(str, Enum):
    PASS = 'PASS'
    FAIL = 'FAIL'
    SKIP = 'SKIP'


@dataclass(frozen=True)
class CheckResult:
    instance_id: str
    check: str
    status: Status
    detail: str
    artifact: Optional[Dict[str, str]] = dataclass_field(default=None, compare=False)

    @property
    def passed(self):
        return self.status == Status.PASS

    def line(self):
        return f"{self.instance_id} {self.check} {self.status.value} {self.detail}"

    def to_dict(self):
        return {
            'instance_id': self.instance_id,
            'check': self.check,
            'status': self.status.value,
            'detail': self.detail,
        }


def _result(instance_id, check, ok, detail, artifact=None):
    status = Status.PASS if ok else Status.FAIL
    return CheckResult(instance_id, check, status, detail, None if ok else artifact)


def _skip(instance_id, check, reason):
    return CheckResult(instance_id, check, Status.SKIP, reason)


def _artifact(alg, kind, u=None, v=None, bimodule=None, k_max=None):
    """Texts that reproduce one check through ``cli.py check``"""
    args = [kind, '{stem}.alg']
    if bimodule is not None:
        args.append('{stem}.bimod')
    if u is not None:
        args += ['--sub', f'"{format_rows(u)}"']
    if v is not None:
        args += ['--v', f'"{format_rows(v)}"']
    if k_max is not None:
        args += ['--k-max', str(k_max)]
    return {
        'algebra': format_algebra(alg),
        'bimodule': format_bimodule(bimodule) if bimodule is not None else '',
        'command': 'python cli.py check ' + ' '.join(args),
    }


def _certified(v, cap):
    """The certified bimodule, or the reason it cannot be certified"""
    if v.certified:
        return v, None
    if not v.field.is_prime_field():
        return None, f"irreducibility is only certified over GF(p), not {v.field}"
    try:
        return certify_irreducible(v, cap), None
    except PreconditionError:
        return None, "bimodule is not irreducible"
    except BudgetExceededError as e:
        return None, f"enumeration budget: {e}"


# -- bimodule checks ----------------------------------------------------------

def verify_lemma1(alg, v, cap=None, instance_id='', check='lemma1'):
    """L / C_L(V) is Lie and V L = 0 or v x = -x v, for a certified irreducible V

    Also asserts the left centre K of the split extension of the faithful
    quotient is 0 or V, the dichotomy the two branches come from.
    """
    v, reason = _certified(v, cap)
    if v is None:
        return _skip(instance_id, check, reason)
    try:
        bar, induced, centre = faithful_quotient(alg, v)
        lie = is_lie(bar)
        zero = induced.right_is_zero()
        antisymmetric = induced.right_is_minus_left()
        extension = split_extension(bar, induced)
        k = left_centre(extension)
    except KernelInvariantError as e:
        return _result(instance_id, check, False, f"invariant broken: {e}", _artifact(alg, 'lemma1', bimodule=v))
    if zero and antisymmetric:
        branch = 'both'
    elif zero:
        branch = 'VL=0'
    elif antisymmetric:
        branch = 'vx=-xv'
    else:
        branch = 'none'
    if k == module_ideal(extension, v.dim):
        k_label = 'V'
    elif k.is_zero():
        k_label = '0'
    else:
        k_label = f'dim{k.dim}'
    ok = lie and branch != 'none' and k_label in ('0', 'V')
    detail = f"dim V={v.dim} dim C={centre.dim} lie={lie} branch={branch} K={k_label}"
    return _result(instance_id, check, ok, detail, _artifact(alg, 'lemma1', bimodule=v))


def _theorem1(alg, u, v, cap, instance_id, check):
    """verify_theorem1 plus the restricted composition factors, for the Schur check"""
    if not alg.field.is_prime_field():
        return _skip(instance_id, check, f"irreducibility is only certified over GF(p), not {alg.field}"), ()
    chain = subnormal_chain(alg, u)
    if not chain.subnormal:
        return _skip(instance_id, check, "hypothesis: subalgebra is not subnormal"), ()
    v, reason = _certified(v, cap)
    if v is None:
        return _skip(instance_id, check, reason), ()
    artifact = _artifact(alg, 'theorem1', u=u, bimodule=v)
    try:
        report = composition_series(restrict_to(v, u), cap)
        left_classes = iso_partition(report.factors, sides='left')
    except BudgetExceededError as e:
        return _skip(instance_id, check, f"enumeration budget: {e}"), ()
    except KernelInvariantError as e:
        return _result(instance_id, check, False, f"invariant broken: {e}", artifact), ()
    dims = ','.join(str(d) for d in report.factor_dims) or '-'
    ok = len(report.iso_classes) <= 1 and len(left_classes) <= 1
    detail = (f"defect={chain.defect} dim U={u.dim} dim V={v.dim} factors={dims} "
              f"classes={len(report.iso_classes)} left_classes={len(left_classes)}")
    return _result(instance_id, check, ok, detail, artifact), report.factors


def verify_theorem1(alg, u, v, cap=None, instance_id='', check='theorem1'):
    """All U-composition factors of an irreducible V are isomorphic when U is subnormal"""
    result, _ = _theorem1(alg, u, v, cap, instance_id, check)
    return result


def verify_schur(factors, cap=None, instance_id='', check='schur', artifact=None):
    """Compare the rank-based isomorphism test with exhaustive intertwiner enumeration

    Every nonzero intertwiner between certified irreducibles must be invertible,
    and an isomorphism exists exactly when the enumeration finds one.
    """
    factors = factors[:MAX_SCHUR_FACTORS]
    if not factors:
        return _skip(instance_id, check, "no factors")
    pairs = 0
    largest = 0
    for i, a in enumerate(factors):
        for b in factors[i:]:
            homs = hom_space(a, b)
            largest = max(largest, homs.dim)
            if homs.dim > MAX_ORACLE_HOM_DIM:
                return _skip(instance_id, check, f"hom space of dimension {homs.dim} is too large to enumerate")
            try:
                elements = list(enumerate_vectors(homs, cap))
            except BudgetExceededError as e:
                return _skip(instance_id, check, f"enumeration budget: {e}")
            ranks = {hom_matrix(x, a, b).rank() for x in elements if any(t != 0 for t in x)}
            if ranks - {a.dim} or (ranks and a.dim != b.dim):
                return _result(instance_id, check, False,
                               f"singular nonzero intertwiner between factors of dims {a.dim},{b.dim}", artifact)
            try:
                claimed = isomorphic_irreducibles(a, b)
            except KernelInvariantError as e:
                return _result(instance_id, check, False, f"invariant broken: {e}", artifact)
            if claimed != bool(ranks):
                return _result(instance_id, check, False,
                               f"rank test says {claimed}, enumeration says {bool(ranks)}", artifact)
            pairs += 1
    return _result(instance_id, check, True, f"pairs={pairs} max hom dim={largest}")


# -- subalgebra checks --------------------------------------------------------

def verify_lemma2(alg, u, v, k_max, instance_id='', check='lemma2'):
    """U^k V <= lambda_U^k V for 1 <= k <= k_max"""
    if not is_subalgebra(alg, u):
        raise NotASubalgebraError(f"{u} is not a subalgebra of {alg}")
    series = lower_central_series(alg, u)
    power = v
    failed = []
    for k in range(1, k_max + 1):
        power = product(alg, u, power)
        if not power.contains(product(alg, series.term(k), v)):
            failed.append(k)
    detail = f"k<={k_max} dim U={u.dim} dim V={v.dim}"
    if failed:
        detail += ' fails at k=' + ','.join(map(str, failed))
    return _result(instance_id, check, not failed, detail,
                   _artifact(alg, 'lemma2', u=u, v=v, k_max=k_max))


def _residual_result(report, alg, u, kind, instance_id, check):
    return _result(instance_id, check, report.passed, report.describe(), _artifact(alg, kind, u=u))


def verify_corollary(alg, u, instance_id='', check='corollary'):
    """R L <= R for the nilpotent residual R of a subnormal subalgebra"""
    try:
        report = residual_right_ideal_check(alg, u)
    except HypothesisViolationError:
        return _skip(instance_id, check, "hypothesis: subalgebra is not subnormal")
    return _residual_result(report, alg, u, 'corollary', instance_id, check)


def verify_theorem2(alg, u, instance_id='', check='theorem2'):
    """The nilpotent residual of a subnormal subalgebra is a two-sided ideal"""
    try:
        report = residual_ideal_check(alg, u)
    except HypothesisViolationError:
        return _skip(instance_id, check, "hypothesis: subalgebra is not subnormal")
    return _residual_result(report, alg, u, 'theorem2', instance_id, check)


# -- suite --------------------------------------------------------------------

@dataclass(frozen=True)
class SuiteConfig:
    fields: Tuple[str, ...] = ('2', '3', '5')
    max_dim: int = 6
    budget: int = 100
    seed: int = 7
    k_max: int = 8
    drop_hypotheses: bool = False
    jobs: int = 1
    failures_dir: Optional[str] = None
    cap: Optional[int] = None
    include_catalogue: bool = True

    @classmethod
    def from_profile(cls, profile_id='default', **overrides):
        """Profile values, then every override that is not None"""
        profile = get_profile(profile_id)
        values = {key: profile[key] for key in ('max_dim', 'budget', 'seed', 'k_max', 'drop_hypotheses')}
        values['fields'] = tuple(str(f) for f in profile['fields'])
        for key, value in overrides.items():
            if value is not None:
                values[key] = tuple(str(f) for f in value) if key == 'fields' else value
        return cls(**values)

    def describe(self):
        return (f"fields={','.join(self.fields)} max_dim={self.max_dim} budget={self.budget} "
                f"seed={self.seed} k_max={self.k_max} drop_hypotheses={self.drop_hypotheses}")


@dataclass
class InstanceOutcome:
    instance_id: str
    results: List[CheckResult]
    witnesses: int = 0


@dataclass
class SuiteReport:
    config: SuiteConfig
    results: List[CheckResult] = dataclass_field(default_factory=list)
    instances: int = 0
    witnesses: int = 0
    artifacts: List[str] = dataclass_field(default_factory=list)

    def counts(self):
        counts = Counter(r.status for r in self.results)
        return {status.value: counts.get(status, 0) for status in Status}

    @property
    def failures(self):
        return [r for r in self.results if r.status == Status.FAIL]

    def summary_line(self):
        c = self.counts()
        return f"SUMMARY PASS {c['PASS']} FAIL {c['FAIL']} SKIP {c['SKIP']} TOTAL {len(self.results)}"

    def to_text(self):
        lines = [f"# suite {self.config.describe()}"]
        lines.extend(r.line() for r in self.results)
        lines.append(f"INSTANCES {self.instances}")
        if self.config.drop_hypotheses:
            lines.append(f"HYPOTHESIS WITNESSES {self.witnesses}")
        lines.append(self.summary_line())
        return '\n'.join(lines) + '\n'

    def to_dict(self):
        c = self.counts()
        return {
            'config': asdict(self.config),
            'summary': {
                'instances': self.instances,
                'total_checks': len(self.results),
                'passed': c['PASS'],
                'failed': c['FAIL'],
                'skipped': c['SKIP'],
                'hypothesis_witnesses': self.witnesses,
            },
            'results': [r.to_dict() for r in self.results],
        }

    def exit_status(self):
        return 1 if self.failures else 0


def _distinct(items):
    unique = []
    for item in items:
        if item not in unique:
            unique.append(item)
    return unique


def _bimodule_checks(instance, config, subnormal_specimens):
    alg = instance.algebra
    iid = instance.instance_id
    results = []
    if not alg.field.is_prime_field():
        for v in instance.bimodules:
            reason = f"irreducibility is only certified over GF(p), not {alg.field}"
            results.append(_skip(iid, f"lemma1:{v.name}", reason))
            results.append(_skip(iid, f"theorem1:{v.name}", reason))
        return results

    factors = []
    for v in instance.bimodules:
        try:
            factors.extend(composition_series(v, config.cap).factors)
        except BudgetExceededError as e:
            results.append(_skip(iid, f"compfactors:{v.name}", f"enumeration budget: {e}"))
    for index, factor in enumerate(_distinct(factors)):
        tag = f"f{index}"
        results.append(verify_lemma1(alg, factor, config.cap, iid, f"lemma1:{tag}"))
        for specimen in subnormal_specimens:
            label = f"{specimen.label}:{tag}"
            result, restricted = _theorem1(alg, specimen.space, factor, config.cap, iid, f"theorem1:{label}")
            results.append(result)
            if restricted:
                artifact = _artifact(alg, 'schur', u=specimen.space, bimodule=factor)
                results.append(verify_schur(restricted, config.cap, iid, f"schur:{label}", artifact))
    return results


def check_instance(instance, config):
    """Run every check on one instance; module level so worker processes can unpickle it"""
    alg = instance.algebra
    iid = instance.instance_id
    results = []
    witnesses = 0
    whole = alg.full()
    targets = [('L', whole)]
    if alg.dim:
        targets.append(('e0', alg.span([alg.field.unit_vector(alg.dim, 0)])))

    for specimen in instance.specimens:
        u = specimen.space
        label = specimen.label
        for name, v in targets + [('U', u)]:
            results.append(verify_lemma2(alg, u, v, config.k_max, iid, f"lemma2:{label}:{name}"))
        if specimen.subnormal:
            results.append(verify_corollary(alg, u, iid, f"corollary:{label}"))
            results.append(verify_theorem2(alg, u, iid, f"theorem2:{label}"))
        elif config.drop_hypotheses:
            report = residual_ideal_check(alg, u, report_only=True)
            if report.ideality_failed:
                witnesses += 1
            results.append(_skip(iid, f"theorem2:{label}", "report-only, not subnormal: " + report.describe()))
        else:
            results.append(_skip(iid, f"corollary:{label}", "hypothesis: subalgebra is not subnormal"))
            results.append(_skip(iid, f"theorem2:{label}", "hypothesis: subalgebra is not subnormal"))

    subnormal_specimens = [s for s in instance.specimens if s.subnormal]
    results.extend(_bimodule_checks(instance, config, subnormal_specimens))
    return InstanceOutcome(iid, results, witnesses)


def suite_instances(config):
    for token in config.fields:
        field = field_from_token(token)
        if config.include_catalogue:
            yield from catalogue_instances(field, config.seed)
        yield from generate(config.seed, field, config.max_dim, config.budget)


def run_suite(config):
    instances = list(suite_instances(config))
    logger.info("running %d instances (%s)", len(instances), config.describe())
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as executor:
            outcomes = list(executor.map(check_instance, instances, repeat(config), chunksize=4))
    else:
        outcomes = [check_instance(instance, config) for instance in instances]
    outcomes.sort(key=lambda o: o.instance_id)

    report = SuiteReport(config, instances=len(outcomes))
    for outcome in outcomes:
        report.results.extend(outcome.results)
        report.witnesses += outcome.witnesses
    if config.failures_dir and report.failures:
        report.artifacts = write_failure_artifacts(report, config.failures_dir)
    counts = report.counts()
    logger.info("suite finished: %s", report.summary_line())
    if counts['FAIL']:
        logger.warning("%d check(s) failed", counts['FAIL'])
    return report


def artifact_stem(result):
    return re.sub(r'[^A-Za-z0-9_.-]+', '_', f"{result.instance_id}__{result.check}")


def write_failure_artifacts(report, directory):
    """Write <stem>.alg, <stem>.bimod and <stem>.cmd for every failure with an artifact"""
    os.makedirs(directory, exist_ok=True)
    written = []
    for result in report.failures:
        if not result.artifact:
            continue
        stem = artifact_stem(result)
        base = os.path.join(directory, stem)
        write_text(base + '.alg', result.artifact['algebra'])
        written.append(base + '.alg')
        if result.artifact['bimodule']:
            write_text(base + '.bimod', result.artifact['bimodule'])
            written.append(base + '.bimod')
        write_text(base + '.cmd', result.artifact['command'].format(stem=base) + '\n')
        written.append(base + '.cmd')
    logger.warning("wrote %d failure artifact file(s) to %s", len(written), directory)
    return written


def verify_restricted_schur(alg, u, v, cap=None, instance_id='', check='schur'):
    """The Schur oracle check on the composition factors of V restricted to U"""
    result, factors = _theorem1(alg, u, v, cap, instance_id, check)
    if not factors:
        return result if result.status == Status.SKIP else _skip(instance_id, check, "no restricted factors")
    return verify_schur(factors, cap, instance_id, check, _artifact(alg, 'schur', u=u, bimodule=v))
