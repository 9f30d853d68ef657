"""Instantaneous SINRs and rates for a chosen antenna triple.

All functions are vectorized over the trial axis of a ChannelRealization.
Noise terms are the exact "+1"; no high-SNR approximation is made.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from pyNomaAS.models.channel import ChannelRealization
from pyNomaAS.models.system_params import SystemParams


@dataclass(frozen=True)
class AntennaChoice:
    """Selected BS transmit (i), relay receive (j) and relay transmit (k) indices, one per trial."""

    i: np.ndarray
    j: np.ndarray
    k: np.ndarray

    @classmethod
    def fixed(cls, i, j, k, n_trials=1):
        full = lambda v: np.full(n_trials, v, dtype=np.intp)
        return cls(full(i), full(j), full(k))

    def as_tuples(self):
        return list(zip(self.i.tolist(), self.j.tolist(), self.k.tolist()))

    def check(self, real: ChannelRealization):
        m_b, m_r, m_t = real.shape
        for name, idx, bound in (("i", self.i, m_b), ("j", self.j, m_r), ("k", self.k, m_t)):
            if np.any((idx < 0) | (idx >= bound)):
                raise IndexError(f"antenna index {name} outside [0, {bound})")
        return self


@dataclass(frozen=True)
class SinrBundle:
    gamma_r: np.ndarray
    gamma_12: np.ndarray
    gamma_1: np.ndarray
    gamma_ru2: np.ndarray
    gamma_2: np.ndarray


def _trials(real):
    return np.arange(real.n_trials)


def sinr_relay(real: ChannelRealization, choice: AntennaChoice, params: SystemParams):
    """x2 decoded at the relay, x1 treated as interference, residual SI added."""
    t = _trials(real)
    g = real.g_br[t, choice.i, choice.j]
    s = real.g_si[t, choice.j, choice.k]
    return params.a2 * g / (params.a1 * g + s + 1.0)


def sinr_u2_at_u1(real: ChannelRealization, choice: AntennaChoice, params: SystemParams):
    """x2 observed at U1, the first SIC stage."""
    t = _trials(real)
    g = real.g_su1[t, choice.i]
    return params.a2 * g / (params.a1 * g + real.g_ru1[t, choice.k] + 1.0)


def sinr_u1(real: ChannelRealization, choice: AntennaChoice, params: SystemParams):
    """U1's own symbol after x2 has been cancelled."""
    t = _trials(real)
    return params.a1 * real.g_su1[t, choice.i] / (real.g_ru1[t, choice.k] + 1.0)


def snr_u2(real: ChannelRealization, choice: AntennaChoice, params: SystemParams):
    return real.g_ru2[_trials(real), choice.k]


def e2e_sinr_u2(real: ChannelRealization, choice: AntennaChoice, params: SystemParams):
    return np.minimum(
        np.minimum(sinr_u2_at_u1(real, choice, params), sinr_relay(real, choice, params)),
        snr_u2(real, choice, params),
    )


def sinr_bundle(real: ChannelRealization, choice: AntennaChoice, params: SystemParams) -> SinrBundle:
    gamma_r = sinr_relay(real, choice, params)
    gamma_12 = sinr_u2_at_u1(real, choice, params)
    gamma_ru2 = snr_u2(real, choice, params)
    return SinrBundle(
        gamma_r=gamma_r,
        gamma_12=gamma_12,
        gamma_1=sinr_u1(real, choice, params),
        gamma_ru2=gamma_ru2,
        gamma_2=np.minimum(np.minimum(gamma_12, gamma_r), gamma_ru2),
    )


def instantaneous_rates(bundle: SinrBundle):
    """(rate_u1, rate_u2) in bits/s/Hz."""
    return np.log2(1.0 + bundle.gamma_1), np.log2(1.0 + bundle.gamma_2)


def near_user_ratio(real: ChannelRealization, choice: AntennaChoice):
    """X = g_su1[i] / (g_ru1[k] + 1); gamma_1 = a1*X and gamma_12 = a2*X/(a1*X + 1)."""
    t = _trials(real)
    return real.g_su1[t, choice.i] / (real.g_ru1[t, choice.k] + 1.0)


@dataclass(frozen=True)
class SinrTensors:
    """SINRs for every antenna triple at once.

    gamma_1, gamma_12: (n, m_b, m_t); gamma_r: (n, m_b, m_r, m_t);
    gamma_ru2: (n, m_t); gamma_2: (n, m_b, m_r, m_t).
    """

    gamma_1: np.ndarray
    gamma_12: np.ndarray
    gamma_r: np.ndarray
    gamma_ru2: np.ndarray
    gamma_2: np.ndarray

    def sum_rate(self):
        rate_u1 = np.log2(1.0 + self.gamma_1)[:, :, np.newaxis, :]
        return rate_u1 + np.log2(1.0 + self.gamma_2)


def all_choice_sinrs(real: ChannelRealization, params: SystemParams) -> SinrTensors:
    a1, a2 = params.a1, params.a2
    su1 = real.g_su1[:, :, np.newaxis]
    ru1 = real.g_ru1[:, np.newaxis, :]
    gamma_1 = a1 * su1 / (ru1 + 1.0)
    gamma_12 = a2 * su1 / (a1 * su1 + ru1 + 1.0)
    g = real.g_br[:, :, :, np.newaxis]
    s = real.g_si[:, np.newaxis, :, :]
    gamma_r = a2 * g / (a1 * g + s + 1.0)
    gamma_ru2 = real.g_ru2
    gamma_2 = np.minimum(
        np.minimum(gamma_12[:, :, np.newaxis, :], gamma_r),
        gamma_ru2[:, np.newaxis, np.newaxis, :],
    )
    return SinrTensors(gamma_1, gamma_12, gamma_r, gamma_ru2, gamma_2)
