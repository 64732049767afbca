"""
Subnormal subalgebras and the ideality of their nilpotent residuals

Subnormality is decided with the canonical chain W_0 = L, W_(i+1) = the least
ideal of W_i containing U. Any chain of successive ideals from L down to U
contains this one term by term, so U is subnormal exactly when the canonical
chain reaches U, and the chain length is the least possible defect.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from services.algebra import is_subalgebra, lambda_power, lower_central_series, product
from services.errors import (
    HypothesisViolationError,
    KernelInvariantError,
    NotASubalgebraError,
    NotContainedError,
)
from services.exact_linalg import Subspace

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ChainReport:
    chain: Tuple[Subspace, ...]
    subnormal: bool
    defect: Optional[int]

    @property
    def dims(self):
        return [w.dim for w in self.chain]

    def describe(self):
        dims = ' > '.join(str(d) for d in self.dims)
        if self.subnormal:
            return f"subnormal, defect {self.defect} (chain dims {dims})"
        return f"NOT SUBNORMAL (closure chain dims {dims} stops above the subalgebra)"


@dataclass
class ResidualReport:
    """Witness record of a residual ideality check

    ``checks`` maps each asserted containment to whether it held. For a
    subalgebra that is not subnormal there is no defect, so only the two
    ideality containments are asserted and the inclusions that depend on
    the defect are left out.
    """
    subnormal: bool
    defect: Optional[int]
    stabilized_at: int
    residual: Subspace
    lambda_term: Optional[Subspace]
    right_product: Subspace
    left_product: Optional[Subspace] = None
    checks: Dict[str, bool] = field(default_factory=dict)
    report_only: bool = False

    @property
    def passed(self):
        return all(self.checks.values())

    @property
    def ideality_failed(self):
        return any(not self.checks.get(name, True) for name in IDEALITY_CHECKS)

    @property
    def failed_checks(self) -> List[str]:
        return [name for name, ok in self.checks.items() if not ok]

    def describe(self):
        status = 'pass' if self.passed else 'FAIL ' + ','.join(self.failed_checks)
        if self.lambda_term is None:
            return f"{status}; not subnormal, s={self.stabilized_at} dim R={self.residual.dim}"
        return (f"{status}; r={self.defect} s={self.stabilized_at} dim R={self.residual.dim} "
                f"dim lambda^(r+s)L={self.lambda_term.dim}")


IDEALITY_CHECKS = ('RL<=R', 'LR<=R')


def ideal_closure(alg, u, w):
    """Least subspace I with u <= I <= w, wI <= I and Iw <= I"""
    if not w.contains(u):
        raise NotContainedError(f"{u} is not contained in {w}")
    closure = u
    for _ in range(alg.dim + 1):
        nxt = closure.sum(product(alg, w, closure)).sum(product(alg, closure, w))
        if nxt == closure:
            return closure
        closure = nxt
    raise KernelInvariantError("ideal closure failed to stabilize within dim + 1 steps")


def subnormal_chain(alg, u):
    if not is_subalgebra(alg, u):
        raise NotASubalgebraError(f"{u} is not a subalgebra of {alg}")
    chain = [alg.full()]
    while True:
        nxt = ideal_closure(alg, u, chain[-1])
        if nxt == chain[-1]:
            break
        chain.append(nxt)
        if len(chain) > alg.dim + 1:
            raise KernelInvariantError("closure chain failed to stabilize within dim + 1 steps")
    subnormal = chain[-1] == u
    logger.debug("closure chain dims %s, subnormal=%s", [w.dim for w in chain], subnormal)
    return ChainReport(tuple(chain), subnormal, len(chain) - 1 if subnormal else None)


def _hypotheses(alg, u, report_only):
    chain = subnormal_chain(alg, u)
    if not chain.subnormal and not report_only:
        raise HypothesisViolationError(f"{u} is not subnormal in {alg}; rerun in report-only mode to explore")
    return chain, lower_central_series(alg, u)


def residual_right_ideal_check(alg, u, report_only=False):
    """R L <= R for the nilpotent residual R of a subnormal u

    Also records the chain of inclusions U^(r+s) L <= lambda_U^(r+s) L <= U^s.
    """
    chain, series = _hypotheses(alg, u, report_only)
    r = chain.defect
    s = series.stabilized_at
    residual = series.residual
    whole = alg.full()
    right_product = product(alg, residual, whole)
    checks = {'RL<=R': residual.contains(right_product)}
    lambda_term = None
    if chain.subnormal:
        lambda_term = lambda_power(alg, u, whole, r + s)
        checks['U^(r+s)L<=lambda^(r+s)L'] = lambda_term.contains(product(alg, series.term(r + s), whole))
        checks['lambda^(r+s)L<=U^s'] = series.term(s).contains(lambda_term)
    return ResidualReport(chain.subnormal, r, s, residual, lambda_term, right_product,
                          checks=checks, report_only=report_only)


def residual_ideal_check(alg, u, report_only=False):
    """R L <= R and L R <= R, plus L R <= lambda_U^t L + R for t = 0 .. r+s"""
    report = residual_right_ideal_check(alg, u, report_only)
    whole = alg.full()
    residual = report.residual
    left_product = product(alg, whole, residual)
    report.left_product = left_product
    report.checks['LR<=R'] = residual.contains(left_product)
    if not report.subnormal:
        return report
    power = whole
    for t in range(report.defect + report.stabilized_at + 1):
        if t > 0:
            power = product(alg, u, power)
        report.checks[f'LR<=lambda^{t}L+R'] = power.sum(residual).contains(left_product)
    return report
