"""Exponential integral and adaptive quadrature used by the closed forms."""
from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from pyNomaAS.errors import DomainError, QuadratureError

logger = logging.getLogger(__name__)

DEFAULT_EPSABS = 1e-9
DEFAULT_EPSREL = 1e-8
QUAD_LIMIT = 200

# above this e^z overflows before E1(z) underflows; switch to the asymptotic series
_SCALED_E1_ASYMPTOTIC = 500.0


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    abs_error_bound: float
    evaluations: int


def exp_int_ei(x):
    """Ei(x) = integral of e^t/t from -inf to x, for x < 0."""
    x = np.asarray(x, dtype=float)
    if np.any(~(x < 0.0)):
        raise DomainError(f"Ei is only evaluated on x < 0, got {x!r}")
    value = special.expi(x)
    return float(value) if value.ndim == 0 else value


def scaled_e1(z):
    """e^z * E1(z) = -e^z * Ei(-z) for z > 0; 0 at z = inf."""
    z = float(z)
    if math.isinf(z):
        return 0.0
    if z < _SCALED_E1_ASYMPTOTIC:
        return -math.exp(z) * exp_int_ei(-z)
    # 1/z * sum (-1)^n n!/z^n, truncation error below 1e-13 here
    total, term = 0.0, 1.0
    for n in range(6):
        total += term
        term *= -(n + 1) / z
    return total / z


def integrate_adaptive(
    func, lower, upper, epsabs=DEFAULT_EPSABS, epsrel=DEFAULT_EPSREL, limit=QUAD_LIMIT, points=None
):
    """QUADPACK adaptive Gauss-Kronrod on [lower, upper] (upper may be inf).

    ``points`` are breakpoints where the integrand changes scale; only those
    strictly inside a finite interval are used.

    Raises QuadratureError (NON_CONVERGED) with the partial result attached
    when QUADPACK flags the tolerance as unmet.
    """
    options = {}
    if points is not None and math.isfinite(upper):
        inside = sorted({float(p) for p in np.ravel(points) if lower < p < upper})
        if inside:
            options["points"] = inside
            limit = max(limit, 4 * len(inside))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        out = integrate.quad(
            func, lower, upper, epsabs=epsabs, epsrel=epsrel, limit=limit, full_output=1, **options
        )
    value, abserr, info = out[0], out[1], out[2]
    result = QuadratureResult(value=float(value), abs_error_bound=float(abserr), evaluations=int(info["neval"]))
    if len(out) > 3:
        logger.warning("quadrature on [%g, %g] did not converge: %s", lower, upper, out[3])
        raise QuadratureError(str(out[3]).splitlines()[0], result=result)
    return result


def rate_from_cdf(cdf, upper=np.inf, epsabs=DEFAULT_EPSABS, epsrel=DEFAULT_EPSREL):
    """Ergodic rate (1/ln2) * integral_0^upper (1 - F(x))/(1 + x) dx."""
    result = integrate_adaptive(lambda x: (1.0 - cdf(x)) / (1.0 + x), 0.0, upper, epsabs, epsrel)
    return QuadratureResult(
        value=result.value / math.log(2.0),
        abs_error_bound=result.abs_error_bound / math.log(2.0),
        evaluations=result.evaluations,
    )
