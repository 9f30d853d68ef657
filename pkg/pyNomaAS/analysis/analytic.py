"""Closed-form CDFs, ergodic rates and outage probabilities.

Every distribution here is built from two order-statistic facts about i.i.d.
exponentials with mean lam:

* the maximum of m has survival  sum_p (-1)^p C(m, p+1) exp(-(p+1) x / lam)
* the minimum of m is exponential with mean lam / m

and the ratio survival P(A > (B + 1) t) for A a maximum, B a minimum, which
integrates B out in closed form. Channel groups feeding different SINR terms
are independent under the max_u1_analytic, max_u2_decoupled and random
schemes, so the far-user CDF is one minus a product of survivals.
"""
from __future__ import annotations

import logging
import math
from functools import lru_cache

import numpy as np
from scipy import special

from pyNomaAS.analysis.metrics import (
    STATUS_NON_CONVERGED,
    STATUS_NUMERIC_ERROR,
    MetricEstimate,
    MetricSet,
    fairness,
    row_status,
)
from pyNomaAS.analysis.special import (
    DEFAULT_EPSABS,
    DEFAULT_EPSREL,
    QuadratureResult,
    integrate_adaptive,
    scaled_e1,
)
from pyNomaAS.errors import CdfRangeError, NomaASError, QuadratureError
from pyNomaAS.models.system_params import SystemParams, mean_gains
from pyNomaAS.utils.helpers import compensated_sum

logger = logging.getLogger(__name__)

# raw CDF values must land in [-tol, 1 + tol] before clamping
CDF_RANGE_TOL = 1e-9

# |beta - 1| below this switches a rate term to quadrature
SINGULAR_TOL = 1e-6

# the far-user integrands vanish like exp(-c x / (a2 - a1 x)) at a2/a1
ENDPOINT_SHRINK = 1e-12

# low rho_s against strong SI collapses the far-user survival close to 0;
# geometric breakpoints keep QUADPACK from stepping over the drop
FAR_RATE_BREAKPOINTS = np.geomspace(1e-9, 0.5, 24)

_FALLBACK_EPSABS = 1e-13
_FALLBACK_EPSREL = 1e-11


@lru_cache(maxsize=None)
def alternating_weights(m):
    """(-1)^p C(m, p+1) for p = 0..m-1, i.e. m (-1)^p C(m-1, p) / (p+1)."""
    return np.array([(-1) ** p * special.comb(m, p + 1, exact=True) for p in range(m)], dtype=float)


def max_survival(x, lam, m):
    """P(max of m exponentials with mean lam > x)."""
    x = np.asarray(x, dtype=float)
    order = np.arange(1, m + 1).reshape((m,) + (1,) * x.ndim)
    weights = alternating_weights(m).reshape(order.shape)
    return compensated_sum(weights * np.exp(-order * x / lam))


def ratio_survival(t, lam_a, m_a, lam_b, m_b):
    """P(A > (B + 1) t) with A = max of m_a Exp(lam_a), B = min of m_b Exp(lam_b)."""
    t = np.asarray(t, dtype=float)
    order = np.arange(1, m_a + 1).reshape((m_a,) + (1,) * t.ndim)
    weights = alternating_weights(m_a).reshape(order.shape)
    scaled = order * t / lam_a
    return compensated_sum(weights * np.exp(-scaled) / (1.0 + scaled * (lam_b / m_b)))


def _as_output(value, like):
    return float(value) if np.ndim(like) == 0 else value


def _clamp_cdf(raw, name):
    raw = np.asarray(raw, dtype=float)
    if np.any(raw < -CDF_RANGE_TOL) or np.any(raw > 1.0 + CDF_RANGE_TOL):
        raise CdfRangeError(f"{name} left [0, 1]: min {raw.min()!r}, max {raw.max()!r}")
    return np.clip(raw, 0.0, 1.0)


def _far_threshold(x, params):
    """t = x / (a2 - a1 x) and the mask where x is below the a2/a1 ceiling."""
    x = np.asarray(x, dtype=float)
    slack = params.a2 - params.a1 * x
    feasible = (x < params.sinr_ceiling) & (slack > 0.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(feasible, x / np.where(feasible, slack, 1.0), 0.0)
    return t, feasible


# -- near user ---------------------------------------------------------------

def cdf_gamma1_max_u1(x, params: SystemParams):
    """CDF of gamma_1 under max-U1: strongest BS->U1 over weakest of m_t R->U1."""
    g = mean_gains(params)
    x = np.asarray(x, dtype=float)
    xs = np.maximum(x, 0.0)
    raw = 1.0 - ratio_survival(xs / params.a1, g.lam_su1, params.m_b, g.lam_ru1, params.m_t)
    raw = np.where(x > 0.0, raw, 0.0)
    return _as_output(_clamp_cdf(raw, "cdf_gamma1_max_u1"), x)


def cdf_gamma1_max_u2(x, params: SystemParams):
    """CDF of gamma_1 under max-U2: no selection gain on either U1 link."""
    g = mean_gains(params)
    x = np.asarray(x, dtype=float)
    xs = np.maximum(x, 0.0)
    raw = 1.0 - ratio_survival(xs / params.a1, g.lam_su1, 1, g.lam_ru1, 1)
    raw = np.where(x > 0.0, raw, 0.0)
    return _as_output(_clamp_cdf(raw, "cdf_gamma1_max_u2"), x)


# random AS picks U1's antennas independently of U1's links, like max-U2
cdf_gamma1_random = cdf_gamma1_max_u2


def rate_integral(alpha, beta):
    """Integral over [0, inf) of exp(-alpha x) / ((1 + x)(1 + beta x)).

    Partial fractions give (s(alpha) - s(alpha/beta)) / (1 - beta) with
    s(z) = e^z E1(z); near beta = 1 the removable singularity is integrated
    numerically instead.
    """
    if beta == 0.0:
        return scaled_e1(alpha)
    if abs(beta - 1.0) < SINGULAR_TOL:
        logger.debug("rate term at beta=%r integrated numerically", beta)
        return integrate_adaptive(
            lambda x: math.exp(-alpha * x) / ((1.0 + x) * (1.0 + beta * x)),
            0.0, np.inf, _FALLBACK_EPSABS, _FALLBACK_EPSREL,
        ).value
    return (scaled_e1(alpha) - scaled_e1(alpha / beta)) / (1.0 - beta)


def rate_u1_max_u1(params: SystemParams):
    g = mean_gains(params)
    weights = alternating_weights(params.m_b)
    terms = []
    for p, weight in enumerate(weights):
        alpha = (p + 1) / (params.a1 * g.lam_su1)
        beta = (p + 1) * g.lam_ru1 / (params.m_t * params.a1 * g.lam_su1)
        terms.append(weight * rate_integral(alpha, beta))
    return math.fsum(terms) / math.log(2.0)


def rate_u1_max_u2(params: SystemParams):
    g = mean_gains(params)
    alpha = 1.0 / (params.a1 * g.lam_su1)
    beta = g.lam_ru1 / (params.a1 * g.lam_su1)
    return rate_integral(alpha, beta) / math.log(2.0)


rate_u1_random = rate_u1_max_u2


# -- far user ----------------------------------------------------------------

def survival_gamma2_max_u1(x, params: SystemParams):
    """P(gamma_2 > x) under max_u1_analytic, as a product of independent survivals."""
    g = mean_gains(params)
    t, feasible = _far_threshold(x, params)
    at_u1 = ratio_survival(t, g.lam_su1, params.m_b, g.lam_ru1, params.m_t)
    at_relay = ratio_survival(t, g.lam_br, params.m_r, g.lam_si, 1)
    at_u2 = np.exp(-np.asarray(x, dtype=float) / g.lam_ru2)
    return np.where(feasible, at_u1 * at_relay * at_u2, 0.0)


def survival_gamma2_max_u2(x, params: SystemParams):
    """P(gamma_2 > x) under max_u2_decoupled.

    The relay receive antenna is the least-interfered of m_r (SI mean
    lam_si/m_r); the BS antenna is the best of m_b into it.
    """
    g = mean_gains(params)
    t, feasible = _far_threshold(x, params)
    at_u1 = ratio_survival(t, g.lam_su1, 1, g.lam_ru1, 1)
    at_relay = ratio_survival(t, g.lam_br, params.m_b, g.lam_si, params.m_r)
    at_u2 = max_survival(np.maximum(np.asarray(x, dtype=float), 0.0), g.lam_ru2, params.m_t)
    return np.where(feasible, at_u1 * at_relay * at_u2, 0.0)


def survival_gamma2_random(x, params: SystemParams):
    g = mean_gains(params)
    t, feasible = _far_threshold(x, params)
    at_u1 = ratio_survival(t, g.lam_su1, 1, g.lam_ru1, 1)
    at_relay = ratio_survival(t, g.lam_br, 1, g.lam_si, 1)
    at_u2 = np.exp(-np.asarray(x, dtype=float) / g.lam_ru2)
    return np.where(feasible, at_u1 * at_relay * at_u2, 0.0)


def _far_cdf(survival, x, params, name):
    x = np.asarray(x, dtype=float)
    xs = np.maximum(x, 0.0)
    raw = np.where(x > 0.0, 1.0 - survival(xs, params), 0.0)
    return _as_output(_clamp_cdf(raw, name), x)


def cdf_gamma2_max_u1(x, params: SystemParams):
    """CDF of the far-user e2e SINR under max_u1_analytic; 1 from a2/a1 on."""
    return _far_cdf(survival_gamma2_max_u1, x, params, "cdf_gamma2_max_u1")


def cdf_gamma2_max_u2(x, params: SystemParams):
    return _far_cdf(survival_gamma2_max_u2, x, params, "cdf_gamma2_max_u2")


def cdf_gamma2_random(x, params: SystemParams):
    return _far_cdf(survival_gamma2_random, x, params, "cdf_gamma2_random")


def _as_rate(result):
    # a survival integral is never negative; QUADPACK can undershoot on a sharp drop
    return QuadratureResult(
        value=max(result.value, 0.0) / math.log(2.0),
        abs_error_bound=result.abs_error_bound / math.log(2.0),
        evaluations=result.evaluations,
    )


def _far_rate(survival, params, epsabs, epsrel):
    upper = params.sinr_ceiling * (1.0 - ENDPOINT_SHRINK)
    try:
        result = integrate_adaptive(
            lambda x: float(survival(x, params)) / (1.0 + x), 0.0, upper, epsabs, epsrel,
            points=upper * FAR_RATE_BREAKPOINTS,
        )
    except QuadratureError as exc:
        exc.result = _as_rate(exc.result)
        raise
    return _as_rate(result)


def rate_u2_max_u1(params: SystemParams, epsabs=DEFAULT_EPSABS, epsrel=DEFAULT_EPSREL) -> QuadratureResult:
    return _far_rate(survival_gamma2_max_u1, params, epsabs, epsrel)


def rate_u2_max_u2(params: SystemParams, epsabs=DEFAULT_EPSABS, epsrel=DEFAULT_EPSREL) -> QuadratureResult:
    return _far_rate(survival_gamma2_max_u2, params, epsabs, epsrel)


def rate_u2_random(params: SystemParams, epsabs=DEFAULT_EPSABS, epsrel=DEFAULT_EPSREL) -> QuadratureResult:
    return _far_rate(survival_gamma2_random, params, epsabs, epsrel)


# -- outage ------------------------------------------------------------------

def zeta(params: SystemParams):
    """Joint near-user threshold: U1 is served iff g_su1/(g_ru1 + 1) > zeta.

    +inf when theta2 >= a2/a1 (x2 can never be decoded).
    """
    theta1, theta2 = params.theta1, params.theta2
    if theta2 >= params.sinr_ceiling:
        return math.inf
    return max(theta2 / (params.a2 - params.a1 * theta2), theta1 / params.a1)


def _near_outage(params, m_b, m_t):
    threshold = zeta(params)
    if math.isinf(threshold):
        return 1.0
    g = mean_gains(params)
    raw = 1.0 - ratio_survival(threshold, g.lam_su1, m_b, g.lam_ru1, m_t)
    return float(_clamp_cdf(raw, "near-user outage"))


def outage_u1_max_u1(params: SystemParams):
    return _near_outage(params, params.m_b, params.m_t)


def outage_u1_max_u2(params: SystemParams):
    return _near_outage(params, 1, 1)


outage_u1_random = outage_u1_max_u2


def _far_outage(params, relay_survival, u2_survival):
    theta2 = params.theta2
    if theta2 >= params.sinr_ceiling:
        return 1.0
    t = theta2 / (params.a2 - params.a1 * theta2)
    raw = 1.0 - relay_survival(t) * u2_survival(theta2)
    return float(_clamp_cdf(raw, "far-user outage"))


def outage_u2_max_u1(params: SystemParams):
    g = mean_gains(params)
    return _far_outage(
        params,
        lambda t: ratio_survival(t, g.lam_br, params.m_r, g.lam_si, 1),
        lambda x: math.exp(-x / g.lam_ru2),
    )


def outage_u2_max_u2(params: SystemParams):
    g = mean_gains(params)
    return _far_outage(
        params,
        lambda t: ratio_survival(t, g.lam_br, params.m_b, g.lam_si, params.m_r),
        lambda x: max_survival(x, g.lam_ru2, params.m_t),
    )


def outage_u2_random(params: SystemParams):
    g = mean_gains(params)
    return _far_outage(
        params,
        lambda t: ratio_survival(t, g.lam_br, 1, g.lam_si, 1),
        lambda x: math.exp(-x / g.lam_ru2),
    )


# -- per-scheme assembly -----------------------------------------------------

ANALYTIC_SCHEMES = {
    "max_u1_analytic": (rate_u1_max_u1, rate_u2_max_u1, outage_u1_max_u1, outage_u2_max_u1),
    "max_u2_decoupled": (rate_u1_max_u2, rate_u2_max_u2, outage_u1_max_u2, outage_u2_max_u2),
    "random": (rate_u1_random, rate_u2_random, outage_u1_random, outage_u2_random),
}


def _guarded(fn, params, problems, *args):
    """(value, error bound) of one closed form; failures go to ``problems``."""
    name = getattr(fn, "__name__", repr(fn))
    try:
        result = fn(params, *args)
    except QuadratureError as exc:
        logger.warning("%s did not converge: %s", name, exc)
        problems.append(STATUS_NON_CONVERGED)
        if exc.result is None:
            return math.nan, math.inf
        result = exc.result
    except NomaASError as exc:
        logger.error("%s failed: %s", name, exc)
        problems.append(STATUS_NUMERIC_ERROR)
        return math.nan, math.nan
    if isinstance(result, QuadratureResult):
        return result.value, result.abs_error_bound
    return float(result), 0.0


def analytic_metrics(params: SystemParams, scheme, epsabs=DEFAULT_EPSABS, epsrel=DEFAULT_EPSREL) -> MetricSet:
    """All closed-form metrics for one scheme.

    Numerical failures end up on the row status rather than raised:
    NON_CONVERGED keeps the best quadrature estimate, NUMERIC_ERROR leaves NaN.
    """
    rate_u1_fn, rate_u2_fn, outage_u1_fn, outage_u2_fn = ANALYTIC_SCHEMES[scheme]
    problems = []
    rate_u1, bound_u1 = _guarded(rate_u1_fn, params, problems)
    rate_u2, bound_u2 = _guarded(rate_u2_fn, params, problems, epsabs, epsrel)
    outage_u1, _ = _guarded(outage_u1_fn, params, problems)
    outage_u2, _ = _guarded(outage_u2_fn, params, problems)

    near = MetricEstimate.analytic(rate_u1, bound_u1)
    far = MetricEstimate.analytic(rate_u2, bound_u2)
    jain, undefined = fairness(near, far)
    infeasible = params.theta2 >= params.sinr_ceiling
    if problems:
        logger.warning("%s at rho_s=%g, rho_r=%g: %s", scheme, params.rho_s, params.rho_r, ", ".join(problems))
    return MetricSet(
        rate_u1=near,
        rate_u2=far,
        rate_sum=MetricEstimate.analytic(rate_u1 + rate_u2, bound_u1 + bound_u2),
        outage_u1=MetricEstimate.analytic(outage_u1),
        outage_u2=MetricEstimate.analytic(outage_u2),
        jain_index=jain,
        threshold_infeasible=infeasible,
        status=row_status(problems, infeasible, undefined),
        jain_undefined=undefined,
    )
