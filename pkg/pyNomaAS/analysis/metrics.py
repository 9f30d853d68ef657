from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from typing import Optional

logger = logging.getLogger(__name__)

MONTE_CARLO = "monte_carlo"
ANALYTIC = "analytic"

STATUS_OK = "ok"
STATUS_NON_CONVERGED = "non_converged"
STATUS_INFEASIBLE = "threshold_infeasible"
STATUS_NUMERIC_ERROR = "numeric_error"
STATUS_JAIN_UNDEFINED = "jain_undefined"


@dataclass(frozen=True)
class MetricEstimate:
    """A Monte Carlo mean with its standard error, or an analytic value.

    Analytic values carry std_error 0, trials 0 and the quadrature error
    bound in ``abs_error_bound``.
    """

    value: float
    std_error: float = 0.0
    trials: int = 0
    kind: str = MONTE_CARLO
    abs_error_bound: float = 0.0

    @classmethod
    def analytic(cls, value, abs_error_bound=0.0):
        return cls(value=float(value), kind=ANALYTIC, abs_error_bound=float(abs_error_bound))


@dataclass(frozen=True)
class MetricSet:
    rate_u1: MetricEstimate
    rate_u2: MetricEstimate
    rate_sum: MetricEstimate
    outage_u1: MetricEstimate
    outage_u2: MetricEstimate
    jain_index: MetricEstimate
    threshold_infeasible: bool = False
    status: str = STATUS_OK
    jain_undefined: bool = False

    def get(self, metric) -> Optional[MetricEstimate]:
        return getattr(self, "jain_index" if metric == "jain" else metric)


def jain_index(rate_u1, rate_u2):
    """Two-user Jain fairness (r1+r2)^2 / (2 (r1^2 + r2^2)), in [0.5, 1].

    Undefined when both rates are zero; 1 is returned, a warning logged and
    rows built through ``fairness`` carry ``jain_undefined``.
    """
    denominator = 2.0 * (rate_u1 * rate_u1 + rate_u2 * rate_u2)
    if denominator == 0.0:
        logger.warning("Jain index undefined for two zero rates; using 1")
        return 1.0
    return (rate_u1 + rate_u2) ** 2 / denominator


def fairness(rate_u1: MetricEstimate, rate_u2: MetricEstimate):
    """Jain index estimate for a pair of rate estimates, and whether it is undefined.

    The estimate inherits kind and trial count from ``rate_u1``.
    """
    undefined = rate_u1.value == 0.0 and rate_u2.value == 0.0
    value = jain_index(rate_u1.value, rate_u2.value)
    return replace(rate_u1, value=float(value), std_error=0.0, abs_error_bound=0.0), undefined


def row_status(problems=(), infeasible=False, jain_undefined=False):
    """Numerical problems win over an infeasible threshold, which wins over an undefined index."""
    if problems:
        return problems[0]
    if infeasible:
        return STATUS_INFEASIBLE
    if jain_undefined:
        return STATUS_JAIN_UNDEFINED
    return STATUS_OK
