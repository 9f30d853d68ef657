import itertools

import numpy as np
import pytest

from pyNomaAS.models.channel import ChannelRealization, RngSeed, draw
from pyNomaAS.models.selection_schemes import (
    SCHEMES,
    select_max_u1,
    select_max_u1_analytic,
    select_max_u2_decoupled,
    select_max_u2_exhaustive,
    select_optimum_sumrate,
    select_random,
)
from pyNomaAS.models.sinr import AntennaChoice, instantaneous_rates, sinr_bundle, sinr_relay, sinr_u1
from pyNomaAS.models.system_params import SystemParams


def brute_force(real, params, objective):
    """Lexicographically first triple maximizing ``objective(bundle)``, one SinrBundle per triple."""
    m_b, m_r, m_t = real.shape
    triples = list(itertools.product(range(m_b), range(m_r), range(m_t)))
    values = np.stack([
        objective(sinr_bundle(real, AntennaChoice.fixed(i, j, k, real.n_trials), params))
        for i, j, k in triples
    ])
    best = np.argmax(values, axis=0)
    return [triples[b] for b in best]


def sum_rate(bundle):
    return np.add(*instantaneous_rates(bundle))


@pytest.fixture(scope="module")
def params():
    return SystemParams()


@pytest.fixture(scope="module")
def realizations(params):
    return draw(params, RngSeed(3), 10_000)


class TestMaxU1:
    def test_separable_first_stage(self):
        params = SystemParams(m_b=3, m_r=2, m_t=2)
        real = ChannelRealization.single(
            g_br=np.ones((3, 2)), g_su1=[1.0, 5.0, 2.0], g_ru1=[3.0, 0.1], g_ru2=[1.0, 1.0], g_si=np.zeros((2, 2))
        )
        choice = select_max_u1(real, params)
        assert (choice.i[0], choice.k[0]) == (1, 1)

    def test_tie_goes_to_lowest_index(self):
        params = SystemParams(m_b=2, m_r=2, m_t=3)
        real = ChannelRealization.single(
            g_br=np.ones((2, 2)), g_su1=[1.0, 2.0], g_ru1=[0.5, 0.5, 0.5], g_ru2=np.ones(3), g_si=np.zeros((2, 3))
        )
        choice = select_max_u1(real, params)
        assert choice.k[0] == 0
        assert choice.j[0] == 0

    def test_attains_both_stage_maxima(self, params, realizations):
        choice = select_max_u1(realizations, params)
        best_near = np.max(
            params.a1 * realizations.g_su1[:, :, None] / (realizations.g_ru1[:, None, :] + 1.0), axis=(1, 2)
        )
        np.testing.assert_allclose(sinr_u1(realizations, choice, params), best_near, rtol=1e-14)
        relay = sinr_relay(realizations, choice, params)
        for j in range(params.m_r):
            other = AntennaChoice(choice.i, np.full_like(choice.j, j), choice.k)
            assert np.all(relay >= sinr_relay(realizations, other, params))

    def test_argmax_invariance(self, params, realizations):
        choice = select_max_u1(realizations, params)
        for c in (0.01, 3.0, 1e4):
            scaled = ChannelRealization(
                realizations.g_br, c * realizations.g_su1, realizations.g_ru1, realizations.g_ru2, realizations.g_si
            )
            np.testing.assert_array_equal(select_max_u1(scaled, params).i, choice.i)
            scaled = ChannelRealization(
                realizations.g_br, realizations.g_su1, c * realizations.g_ru1, realizations.g_ru2, realizations.g_si
            )
            np.testing.assert_array_equal(select_max_u1(scaled, params).k, choice.k)


class TestMaxU1Analytic:
    def test_receive_antenna_on_gain_only(self):
        params = SystemParams(m_b=1, m_r=3, m_t=1)
        real = ChannelRealization.single(
            g_br=[[1.0, 9.0, 4.0]], g_su1=[1.0], g_ru1=[0.0], g_ru2=[1.0], g_si=[[0.0], [100.0], [0.0]]
        )
        assert select_max_u1_analytic(real, params).j[0] == 1
        assert select_max_u1(real, params).j[0] == 2

    def test_matches_max_u1_without_si(self, params, realizations):
        no_si = ChannelRealization(
            realizations.g_br, realizations.g_su1, realizations.g_ru1, realizations.g_ru2,
            np.zeros_like(realizations.g_si),
        )
        assert select_max_u1_analytic(no_si, params).as_tuples() == select_max_u1(no_si, params).as_tuples()

    def test_same_first_stage(self, params, realizations):
        a = select_max_u1(realizations, params)
        b = select_max_u1_analytic(realizations, params)
        np.testing.assert_array_equal(a.i, b.i)
        np.testing.assert_array_equal(a.k, b.k)


class TestMaxU2:
    def test_single_antenna_everywhere(self):
        params = SystemParams(m_b=1, m_r=1, m_t=1)
        real = draw(params, RngSeed(0), 5)
        for select in (select_max_u2_exhaustive, select_optimum_sumrate, select_max_u2_decoupled):
            assert select(real, params).as_tuples() == [(0, 0, 0)] * 5

    def test_dead_far_links_tie_to_origin(self, params):
        real = draw(params, RngSeed(1), 1)
        real = ChannelRealization(real.g_br, real.g_su1, real.g_ru1, np.zeros_like(real.g_ru2), real.g_si)
        assert select_max_u2_exhaustive(real, params).as_tuples() == [(0, 0, 0)]

    def test_exhaustive_matches_enumeration(self, params, realizations):
        expected = brute_force(realizations, params, lambda b: b.gamma_2)
        assert select_max_u2_exhaustive(realizations, params).as_tuples() == expected

    def test_decoupled_stages(self):
        params = SystemParams(m_b=2, m_r=3, m_t=2)
        g_si = np.array([[0.0, 5.0], [0.0, 0.2], [0.0, 3.0]])
        real = ChannelRealization.single(
            g_br=[[1.0, 2.0, 3.0], [4.0, 0.5, 1.0]], g_su1=[1.0, 1.0], g_ru1=[0.0, 0.0], g_ru2=[1.0, 7.0], g_si=g_si
        )
        choice = select_max_u2_decoupled(real, params)
        assert choice.as_tuples() == [(0, 1, 1)]

    def test_decoupled_relay_stage_is_optimal(self, params, realizations):
        choice = select_max_u2_decoupled(realizations, params)
        relay = sinr_relay(realizations, choice, params)
        for i in range(params.m_b):
            other = AntennaChoice(np.full_like(choice.i, i), choice.j, choice.k)
            assert np.all(relay >= sinr_relay(realizations, other, params))

    def test_exhaustive_dominates(self, params, realizations):
        best = sinr_bundle(realizations, select_max_u2_exhaustive(realizations, params), params).gamma_2
        key = RngSeed(3)
        for name, scheme in SCHEMES.items():
            other = sinr_bundle(realizations, scheme.select(realizations, params, key), params).gamma_2
            assert np.all(best >= other), name


class TestOptimumSumRate:
    def test_matches_enumeration(self, params, realizations):
        expected = brute_force(realizations, params, sum_rate)
        assert select_optimum_sumrate(realizations, params).as_tuples() == expected

    def test_dominates_every_scheme(self, params, realizations):
        best = sum_rate(sinr_bundle(realizations, select_optimum_sumrate(realizations, params), params))
        key = RngSeed(3)
        for name, scheme in SCHEMES.items():
            other = sum_rate(sinr_bundle(realizations, scheme.select(realizations, params, key), params))
            assert np.all(best >= other), name


class TestRandom:
    def test_reproducible(self, params, realizations):
        a = select_random(realizations, params, RngSeed(4))
        b = select_random(realizations, params, RngSeed(4))
        assert a.as_tuples() == b.as_tuples()

    def test_in_range_and_covers_all(self, params, realizations):
        choice = select_random(realizations, params, np.random.default_rng(0)).check(realizations)
        assert set(choice.i.tolist()) == set(range(params.m_b))
        assert set(choice.k.tolist()) == set(range(params.m_t))

    def test_needs_seed(self, params, realizations):
        with pytest.raises(ValueError):
            SCHEMES["random"].select(realizations, params)

    def test_independent_of_channel_stream(self, params, realizations):
        # the selection stream must not replay the channel draws
        choice = select_random(realizations, params, RngSeed(3))
        assert choice.as_tuples() != select_random(realizations, params, RngSeed(3, 1)).as_tuples()


def test_registry_names():
    assert set(SCHEMES) == {
        "max_u1", "max_u1_analytic", "max_u2_exhaustive", "max_u2_decoupled", "optimum_sumrate", "random",
    }
    assert all(scheme.name == name for name, scheme in SCHEMES.items())


class TestRegistryMetadata:
    def test_only_random_is_randomized(self):
        assert [name for name, scheme in SCHEMES.items() if scheme.randomized] == ["random"]

    def test_descriptions(self):
        for scheme in SCHEMES.values():
            assert scheme.description and scheme.description.endswith(".")

    @pytest.mark.parametrize("name", [name for name, scheme in SCHEMES.items() if not scheme.randomized])
    def test_deterministic_schemes_ignore_seed(self, params, realizations, name):
        scheme = SCHEMES[name]
        unseeded = scheme.select(realizations, params)
        assert unseeded.as_tuples() == scheme.select(realizations, params, RngSeed(8)).as_tuples()
