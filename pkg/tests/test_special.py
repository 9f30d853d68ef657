import math

import numpy as np
import pytest
from scipy import integrate

from pyNomaAS.analysis.special import exp_int_ei, integrate_adaptive, rate_from_cdf, scaled_e1
from pyNomaAS.errors import DomainError, QuadratureError


def ei_by_definition(x):
    """-integral_{-x}^inf e^-t / t dt, split at 1 so quad sees a smooth piece each side."""
    a = -x
    tail = integrate.quad(lambda t: math.exp(-t) / t, max(a, 1.0), np.inf, epsabs=0.0, epsrel=1e-13, limit=200)[0]
    head = 0.0
    if a < 1.0:
        # substitute t = e^u to flatten the 1/t spike near zero
        head = integrate.quad(lambda u: math.exp(-math.exp(u)), math.log(a), 0.0, epsabs=0.0, epsrel=1e-13, limit=200)[0]
    return -(head + tail)


class TestExpIntEi:
    def test_known_value(self):
        assert exp_int_ei(-1.0) == pytest.approx(-0.21938393439552029, abs=1e-12)

    def test_deep_tail(self):
        value = exp_int_ei(-50.0)
        assert -math.exp(-50.0) / 50.0 < value < 0.0

    def test_derivative(self):
        h = 1e-5
        slope = (exp_int_ei(-2.0 + h) - exp_int_ei(-2.0 - h)) / (2.0 * h)
        assert slope == pytest.approx(math.exp(-2.0) / -2.0, abs=1e-6)

    def test_matches_defining_integral(self):
        points = np.random.default_rng(6).uniform(-40.0, -0.01, 50)
        for x in points:
            assert exp_int_ei(x) == pytest.approx(ei_by_definition(x), rel=1e-10)

    def test_vectorized(self):
        values = exp_int_ei(np.array([-1.0, -2.0]))
        assert values.shape == (2,)

    @pytest.mark.parametrize("x", [0.0, 1.0, [-1.0, 0.5]])
    def test_domain(self, x):
        with pytest.raises(DomainError):
            exp_int_ei(x)


class TestScaledE1:
    def test_against_ei(self):
        assert scaled_e1(1.0) == pytest.approx(0.5963473623231940, rel=1e-13)

    def test_asymptotic_branch_is_continuous(self):
        assert scaled_e1(500.0 - 1e-9) == pytest.approx(scaled_e1(500.0 + 1e-9), rel=1e-12)
        assert scaled_e1(1e6) == pytest.approx(1e-6, rel=1e-5)

    def test_infinity(self):
        assert scaled_e1(math.inf) == 0.0


class TestQuadrature:
    def test_exponential_cdf_rate(self):
        result = rate_from_cdf(lambda x: 1.0 - math.exp(-x))
        assert result.value == pytest.approx(0.5963473623231940 / math.log(2.0), rel=1e-8)
        assert result.evaluations > 0

    def test_finite_upper(self):
        # F = 0 up to the cut: (1/ln2) ln(1 + upper)
        result = rate_from_cdf(lambda x: 0.0, upper=3.0)
        assert result.value == pytest.approx(2.0)

    def test_non_convergence_carries_partial_result(self):
        with pytest.raises(QuadratureError) as err:
            integrate_adaptive(lambda x: 1.0 / x, 0.0, 1.0, limit=5)
        assert err.value.code == "NON_CONVERGED"
        assert err.value.result is not None
