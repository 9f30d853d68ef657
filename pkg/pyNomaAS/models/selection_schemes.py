"""Antenna-selection schemes.

Each scheme picks one BS transmit antenna i, one relay receive antenna j and
one relay transmit antenna k per trial. Ties go to the lowest (lexicographic)
index everywhere, which is what ``np.argmax``/``np.argmin`` return.
"""
from __future__ import annotations

import numpy as np

from pyNomaAS.models.channel import ChannelRealization, RngSeed
from pyNomaAS.models.sinr import AntennaChoice, all_choice_sinrs
from pyNomaAS.models.system_params import SystemParams


def _trials(real):
    return np.arange(real.n_trials)


def _argmax_triple(values):
    """Lexicographically first (i, j, k) maximizing ``values[n, i, j, k]``."""
    n, m_b, m_r, m_t = values.shape
    flat = np.argmax(values.reshape(n, -1), axis=1)
    i, j, k = np.unravel_index(flat, (m_b, m_r, m_t))
    return AntennaChoice(i, j, k)


def select_max_u1(real: ChannelRealization, params: SystemParams) -> AntennaChoice:
    # a1*g_su1[i]/(g_ru1[k]+1) separates: strongest BS->U1, weakest R->U1
    t = _trials(real)
    i = np.argmax(real.g_su1, axis=1)
    k = np.argmin(real.g_ru1, axis=1)
    g = real.g_br[t, i, :]
    s = real.g_si[t, :, k]
    j = np.argmax(params.a2 * g / (params.a1 * g + s + 1.0), axis=1)
    return AntennaChoice(i, j, k)


def select_max_u1_analytic(real: ChannelRealization, params: SystemParams) -> AntennaChoice:
    """max-U1 with the receive antenna chosen on g_br alone (SI ignored)."""
    t = _trials(real)
    i = np.argmax(real.g_su1, axis=1)
    k = np.argmin(real.g_ru1, axis=1)
    j = np.argmax(real.g_br[t, i, :], axis=1)
    return AntennaChoice(i, j, k)


def select_max_u2_exhaustive(real: ChannelRealization, params: SystemParams) -> AntennaChoice:
    return _argmax_triple(all_choice_sinrs(real, params).gamma_2)


def select_max_u2_decoupled(real: ChannelRealization, params: SystemParams) -> AntennaChoice:
    """Best R->U2 link, then least SI into the receive side, then best BS->R.

    With (j, k) fixed the SI term is fixed, so maximizing the relay SINR over
    i reduces to maximizing g_br[i, j].
    """
    t = _trials(real)
    k = np.argmax(real.g_ru2, axis=1)
    j = np.argmin(real.g_si[t, :, k], axis=1)
    i = np.argmax(real.g_br[t, :, j], axis=1)
    return AntennaChoice(i, j, k)


def select_optimum_sumrate(real: ChannelRealization, params: SystemParams) -> AntennaChoice:
    return _argmax_triple(all_choice_sinrs(real, params).sum_rate())


def select_random(real: ChannelRealization, params: SystemParams, seed) -> AntennaChoice:
    """Uniform independent indices.

    ``seed`` is an RngSeed (its selection stream is used) or a numpy Generator.
    """
    rng = seed.selection_generator() if isinstance(seed, RngSeed) else seed
    n = real.n_trials
    m_b, m_r, m_t = real.shape
    return AntennaChoice(
        rng.integers(0, m_b, size=n),
        rng.integers(0, m_r, size=n),
        rng.integers(0, m_t, size=n),
    )


class SelectionScheme:
    name = ""
    description = ""
    randomized = False

    def select(self, real, params, seed=None):
        raise NotImplementedError


class MaxU1(SelectionScheme):
    name = "max_u1"
    description = "Maximizes the near-user SINR over (i, k), then the relay SINR over j."

    def select(self, real, params, seed=None):
        return select_max_u1(real, params)


class MaxU1Analytic(SelectionScheme):
    name = "max_u1_analytic"
    description = "max-U1 with the relay receive antenna picked on the BS->R gain only; the scheme the near-scheme closed forms describe."

    def select(self, real, params, seed=None):
        return select_max_u1_analytic(real, params)


class MaxU2Exhaustive(SelectionScheme):
    name = "max_u2_exhaustive"
    description = "Exhaustive search for the triple maximizing the far-user end-to-end SINR (Optimum AS for U2)."

    def select(self, real, params, seed=None):
        return select_max_u2_exhaustive(real, params)


class MaxU2Decoupled(SelectionScheme):
    name = "max_u2_decoupled"
    description = "Sequential far-user selection: best R->U2, least SI, best BS->R; the scheme the far-scheme closed forms describe."

    def select(self, real, params, seed=None):
        return select_max_u2_decoupled(real, params)


class OptimumSumRate(SelectionScheme):
    name = "optimum_sumrate"
    description = "Exhaustive search for the triple maximizing the instantaneous sum rate."

    def select(self, real, params, seed=None):
        return select_optimum_sumrate(real, params)


class RandomSelection(SelectionScheme):
    name = "random"
    description = "Uniformly random antennas at the BS and at the relay input and output."
    randomized = True

    def select(self, real, params, seed=None):
        if seed is None:
            raise ValueError("random selection needs a seed")
        return select_random(real, params, seed)


SCHEMES = {
    scheme.name: scheme()
    for scheme in (MaxU1, MaxU1Analytic, MaxU2Exhaustive, MaxU2Decoupled, OptimumSumRate, RandomSelection)
}
