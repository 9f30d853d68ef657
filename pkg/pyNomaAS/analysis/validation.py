"""Self-check suite: CDF sanity, identities, closed form vs quadrature,
per-realization scheme relations and Monte Carlo vs closed form."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Sequence

import numpy as np

from pyNomaAS.analysis import analytic
from pyNomaAS.analysis.montecarlo import estimate_metrics, near_user_success, near_user_success_zeta
from pyNomaAS.analysis.special import rate_from_cdf
from pyNomaAS.errors import NomaASError
from pyNomaAS.models.channel import RngSeed, draw
from pyNomaAS.models.selection_schemes import SCHEMES
from pyNomaAS.models.sinr import instantaneous_rates, sinr_bundle
from pyNomaAS.models.system_params import MAX_STABLE_ANTENNAS, SystemParams, mean_gains, validate

logger = logging.getLogger(__name__)

CLOSED_FORM_RTOL = 1e-8
CDF_GRID_POINTS = 1000


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class ValidationOptions:
    power_db: Sequence[float] = (0.0, 10.0, 20.0, 30.0)
    trials: int = 200_000
    seed: int = 1
    sigmas: float = 4.0


def _points(params, options):
    return [validate(params.at_power(p)) for p in options.power_db]


def check_cdf_sanity(params, options):
    near = (analytic.cdf_gamma1_max_u1, analytic.cdf_gamma1_max_u2)
    far = (analytic.cdf_gamma2_max_u1, analytic.cdf_gamma2_max_u2, analytic.cdf_gamma2_random)
    for point in _points(params, options):
        g = mean_gains(point)
        near_edge = 1e4 * point.a1 * g.lam_su1
        for cdf in near + far:
            upper = point.sinr_ceiling if cdf in far else near_edge
            grid = np.linspace(0.0, upper, CDF_GRID_POINTS)
            values = cdf(grid, point)
            if abs(cdf(0.0, point)) > 1e-12:
                return CheckResult("cdf_sanity", False, f"{cdf.__name__}(0) != 0")
            if np.any(np.diff(values) < -1e-12):
                return CheckResult("cdf_sanity", False, f"{cdf.__name__} decreases")
            if cdf(upper, point) < 1.0 - 1e-9:
                return CheckResult("cdf_sanity", False, f"{cdf.__name__} does not reach 1")
    return CheckResult("cdf_sanity", True, f"{len(options.power_db)} power points")


def check_alternating_identity(params, options):
    worst = max(abs(math.fsum(analytic.alternating_weights(m)) - 1.0) for m in range(1, MAX_STABLE_ANTENNAS + 1))
    return CheckResult("alternating_identity", worst <= 1e-12, f"max deviation {worst:.3g}")


def check_closed_form_vs_quadrature(params, options):
    pairs = (
        (analytic.rate_u1_max_u1, analytic.cdf_gamma1_max_u1),
        (analytic.rate_u1_max_u2, analytic.cdf_gamma1_max_u2),
    )
    worst = 0.0
    for point in _points(params, options):
        for closed, cdf in pairs:
            reference = rate_from_cdf(lambda x: cdf(x, point), epsabs=1e-13, epsrel=1e-11).value
            worst = max(worst, abs(closed(point) - reference) / reference)
    return CheckResult("closed_form_vs_quadrature", worst <= CLOSED_FORM_RTOL, f"max rel diff {worst:.3g}")


def _realizations(params, options):
    point = validate(params.at_power(options.power_db[len(options.power_db) // 2]))
    return point, draw(point, RngSeed(options.seed, 0), min(options.trials, 1 << 16))


def check_zeta_reduction(params, options):
    point, real = _realizations(params, options)
    mismatches = 0
    for name, scheme in SCHEMES.items():
        choice = scheme.select(real, point, RngSeed(options.seed, 0))
        joint = near_user_success(sinr_bundle(real, choice, point), point)
        mismatches += int(np.count_nonzero(joint != near_user_success_zeta(real, choice, point)))
    return CheckResult("zeta_reduction", mismatches == 0, f"{mismatches} mismatches")


def check_dominance(params, options):
    point, real = _realizations(params, options)
    key = RngSeed(options.seed, 0)
    bundles = {name: sinr_bundle(real, scheme.select(real, point, key), point) for name, scheme in SCHEMES.items()}
    sum_rate = {name: np.add(*instantaneous_rates(b)) for name, b in bundles.items()}
    failures = []
    if any(np.any(sum_rate["optimum_sumrate"] < s) for s in sum_rate.values()):
        failures.append("optimum_sumrate sum rate")
    if any(np.any(bundles["max_u2_exhaustive"].gamma_2 < b.gamma_2) for b in bundles.values()):
        failures.append("max_u2_exhaustive gamma_2")
    if any(np.any(bundles["max_u1"].gamma_1 < b.gamma_1) for b in bundles.values()):
        failures.append("max_u1 gamma_1")
    # the sequential far-user rule beats random on average, not per slot
    if bundles["max_u2_decoupled"].gamma_2.mean() < bundles["random"].gamma_2.mean():
        failures.append("max_u2_decoupled mean gamma_2")
    return CheckResult("dominance", not failures, ", ".join(failures) or f"{real.n_trials} realizations")


def check_mc_vs_analytic(params, options):
    worst = 0.0
    for point in _points(params, options):
        schemes = list(analytic.ANALYTIC_SCHEMES)
        simulated = estimate_metrics(point, schemes, options.trials, options.seed)
        for name in schemes:
            closed = analytic.analytic_metrics(point, name)
            for metric in ("rate_u1", "rate_u2", "outage_u1", "outage_u2"):
                mc = simulated[name].get(metric)
                reference = closed.get(metric).value
                se = mc.std_error
                if metric.startswith("outage"):
                    se = max(se, math.sqrt(reference * (1.0 - reference) / mc.trials))
                if se == 0.0:
                    score = 0.0 if mc.value == reference else math.inf
                else:
                    score = abs(mc.value - reference) / se
                worst = max(worst, score)
    return CheckResult("mc_vs_analytic", worst <= options.sigmas, f"worst {worst:.2f} standard errors")


CHECKS: List[Callable[[SystemParams, ValidationOptions], CheckResult]] = [
    check_cdf_sanity,
    check_alternating_identity,
    check_closed_form_vs_quadrature,
    check_zeta_reduction,
    check_dominance,
    check_mc_vs_analytic,
]


def run_checks(params: SystemParams, options: ValidationOptions = ValidationOptions()) -> List[CheckResult]:
    results = []
    for check in CHECKS:
        try:
            result = check(params, options)
        except NomaASError as exc:
            result = CheckResult(check.__name__.replace("check_", ""), False, str(exc))
        logger.info("%s: %s", result.name, "pass" if result.passed else "FAIL")
        results.append(result)
    return results
