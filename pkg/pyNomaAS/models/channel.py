"""Rayleigh block-fading realizations of the five channel groups.

Only the power gains |h|^2 enter the SINRs, and |CN(0, s^2)|^2 is exponential
with mean s^2, so gains are drawn directly as scaled standard exponentials.
Every array carries a leading trial axis.
"""
from __future__ import annotations

import csv
import logging
from dataclasses import dataclass

import numpy as np

from pyNomaAS.models.system_params import SystemParams, mean_gains

logger = logging.getLogger(__name__)

# spawn_key suffixes separating the channel stream from the random-AS stream
_CHANNEL_STREAM = 0
_SELECTION_STREAM = 1


@dataclass(frozen=True)
class RngSeed:
    """Root seed plus stream index; equal pairs give equal draws."""

    seed: int
    stream: int = 0

    def _sequence(self, purpose):
        return np.random.SeedSequence(self.seed, spawn_key=(self.stream, purpose))

    def channel_generator(self):
        return np.random.Generator(np.random.Philox(self._sequence(_CHANNEL_STREAM)))

    def selection_generator(self):
        return np.random.Generator(np.random.Philox(self._sequence(_SELECTION_STREAM)))


@dataclass(frozen=True)
class ChannelRealization:
    """Per-antenna power gains for ``n_trials`` independent slots.

    g_br  (n, m_b, m_r)  BS antenna i -> relay receive antenna j
    g_su1 (n, m_b)       BS antenna i -> U1
    g_ru1 (n, m_t)       relay transmit antenna k -> U1 (inter-user interference)
    g_ru2 (n, m_t)       relay transmit antenna k -> U2
    g_si  (n, m_r, m_t)  relay transmit antenna k -> receive antenna j
    """

    g_br: np.ndarray
    g_su1: np.ndarray
    g_ru1: np.ndarray
    g_ru2: np.ndarray
    g_si: np.ndarray

    @classmethod
    def single(cls, g_br, g_su1, g_ru1, g_ru2, g_si):
        """Wrap one slot's gains (no trial axis) as a one-trial realization."""
        return cls(
            g_br=np.asarray(g_br, dtype=float)[np.newaxis],
            g_su1=np.asarray(g_su1, dtype=float)[np.newaxis],
            g_ru1=np.asarray(g_ru1, dtype=float)[np.newaxis],
            g_ru2=np.asarray(g_ru2, dtype=float)[np.newaxis],
            g_si=np.asarray(g_si, dtype=float)[np.newaxis],
        )

    @property
    def n_trials(self):
        return self.g_su1.shape[0]

    @property
    def shape(self):
        """(m_b, m_r, m_t)"""
        return self.g_br.shape[1], self.g_br.shape[2], self.g_ru2.shape[1]


def draw(params: SystemParams, seed: RngSeed, n_trials=1) -> ChannelRealization:
    """Draw ``n_trials`` slots from stream ``seed``.

    Group order within a stream is fixed: br, su1, ru1, ru2, si.
    """
    gains = mean_gains(params)
    rng = seed.channel_generator()
    m_b, m_r, m_t = params.m_b, params.m_r, params.m_t
    g_br = gains.lam_br * rng.standard_exponential((n_trials, m_b, m_r))
    g_su1 = gains.lam_su1 * rng.standard_exponential((n_trials, m_b))
    g_ru1 = gains.lam_ru1 * rng.standard_exponential((n_trials, m_t))
    g_ru2 = gains.lam_ru2 * rng.standard_exponential((n_trials, m_t))
    g_si = gains.lam_si * rng.standard_exponential((n_trials, m_r, m_t))
    return ChannelRealization(g_br, g_su1, g_ru1, g_ru2, g_si)


def realization_columns(m_b, m_r, m_t):
    """Fixed column order of the realization dump."""
    columns = ["trial"]
    columns += [f"g_br_{i}_{j}" for i in range(m_b) for j in range(m_r)]
    columns += [f"g_su1_{i}" for i in range(m_b)]
    columns += [f"g_ru1_{k}" for k in range(m_t)]
    columns += [f"g_ru2_{k}" for k in range(m_t)]
    columns += [f"g_si_{j}_{k}" for j in range(m_r) for k in range(m_t)]
    return columns


def dump_realizations(real: ChannelRealization, path, first_trial=0):
    """Write one CSV row per trial in ``realization_columns`` order."""
    m_b, m_r, m_t = real.shape
    n = real.n_trials
    flat = np.hstack([
        real.g_br.reshape(n, -1),
        real.g_su1,
        real.g_ru1,
        real.g_ru2,
        real.g_si.reshape(n, -1),
    ])
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(realization_columns(m_b, m_r, m_t))
        for t, row in enumerate(flat):
            writer.writerow([first_trial + t] + [format(v, ".17g") for v in row])
    logger.info("wrote %d realizations to %s", n, path)
