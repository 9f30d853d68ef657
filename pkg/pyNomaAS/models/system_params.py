"""System parameters of the FD cooperative NOMA downlink.

Noise variances at the relay and both users are normalized to one, so every
power enters through the transmit SNRs ``rho_s`` (BS) and ``rho_r`` (relay).
"""
from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass
from typing import List, Sequence

from pyNomaAS.errors import ConfigError
from pyNomaAS.utils.helpers import db_to_linear, linear_to_db

logger = logging.getLogger(__name__)

# Alternating order-statistic sums lose digits combinatorially past this.
MAX_STABLE_ANTENNAS = 16

POWER_SPLIT_TOL = 1e-12

SWEEP_TARGETS = ("joint", "rho_s", "rho_r")

_INT_KEYS = ("m_b", "m_r", "m_t")
_DB_KEYS = ("rho_s", "rho_r")


@dataclass(frozen=True)
class SystemParams:
    m_b: int = 4
    m_r: int = 4
    m_t: int = 4
    a1: float = 0.25
    a2: float = 0.75
    rho_s: float = 100.0
    rho_r: float = 100.0
    var_br: float = 1.0
    var_bu1: float = 1.0
    var_ru1: float = 1.0
    var_ru2: float = 1.0
    var_si: float = 0.3
    k1: float = 0.01
    rate1: float = 0.5
    rate2: float = 0.5

    @property
    def theta1(self):
        return 2.0 ** self.rate1 - 1.0

    @property
    def theta2(self):
        return 2.0 ** self.rate2 - 1.0

    @property
    def sinr_ceiling(self):
        """a2/a1, the supremum of every SINR that decodes x2 against x1."""
        return self.a2 / self.a1

    def at_power(self, power_db, target="joint"):
        """Copy with the transmit SNR(s) set to ``power_db``."""
        rho = float(db_to_linear(power_db))
        if target == "joint":
            return dataclasses.replace(self, rho_s=rho, rho_r=rho)
        if target == "rho_s":
            return dataclasses.replace(self, rho_s=rho)
        if target == "rho_r":
            return dataclasses.replace(self, rho_r=rho)
        raise ConfigError(f"unknown sweep target {target!r}", "SWEEP_INVALID")


@dataclass(frozen=True)
class MeanGains:
    """Means of the exponential per-antenna power gains."""

    lam_br: float
    lam_su1: float
    lam_ru1: float
    lam_ru2: float
    lam_si: float


@dataclass(frozen=True)
class SweepSpec:
    power_db: Sequence[float]
    schemes: Sequence[str]
    metrics: Sequence[str] = ("rate_u1", "rate_u2", "rate_sum", "outage_u1", "outage_u2", "jain")
    trials: int = 1_000_000
    seed: int = 0
    target: str = "joint"
    workers: int = 1
    # residual SI variances to sweep; empty keeps the configured var_si
    var_si: Sequence[float] = ()


def validate(params: SystemParams) -> SystemParams:
    """Return ``params`` unchanged if every invariant holds.

    Raises ConfigError naming the first violated invariant.
    """
    for name in _INT_KEYS:
        count = getattr(params, name)
        if isinstance(count, bool) or int(count) != count or count < 1:
            raise ConfigError(f"{name}={count!r} must be a positive integer", "ANTENNA_COUNT_INVALID")
    if abs(params.a1 + params.a2 - 1.0) > POWER_SPLIT_TOL or not 0.0 < params.a1 < params.a2:
        raise ConfigError(
            f"a1={params.a1!r}, a2={params.a2!r} need a1 + a2 = 1 and 0 < a1 < a2",
            "POWER_SPLIT_INVALID",
        )
    for name in ("rho_s", "rho_r"):
        if not getattr(params, name) > 0.0:
            raise ConfigError(f"{name}={getattr(params, name)!r} must be > 0", "SNR_INVALID")
    for name in ("var_br", "var_bu1", "var_ru1", "var_ru2", "var_si"):
        if not getattr(params, name) > 0.0:
            raise ConfigError(f"{name}={getattr(params, name)!r} must be > 0", "VARIANCE_INVALID")
    if not params.k1 >= 0.0:
        raise ConfigError(f"k1={params.k1!r} must be >= 0", "INTERFERENCE_INVALID")
    for name in ("rate1", "rate2"):
        if not getattr(params, name) > 0.0:
            raise ConfigError(f"{name}={getattr(params, name)!r} must be > 0", "RATE_INVALID")

    largest = max(params.m_b, params.m_r, params.m_t)
    if largest > MAX_STABLE_ANTENNAS:
        logger.warning(
            "%d antennas exceeds %d; closed-form alternating sums may lose accuracy",
            largest, MAX_STABLE_ANTENNAS,
        )
    return params


def mean_gains(params: SystemParams) -> MeanGains:
    # k1 scales the R->U1 variance: the inter-user channel is CN(0, k1*var_ru1)
    return MeanGains(
        lam_br=params.rho_s * params.var_br,
        lam_su1=params.rho_s * params.var_bu1,
        lam_ru1=params.rho_r * params.k1 * params.var_ru1,
        lam_ru2=params.rho_r * params.var_ru2,
        lam_si=params.rho_r * params.var_si,
    )


def parse_params(lines: Sequence[str], source="<string>") -> SystemParams:
    """Parse ``key = value`` lines; ``rho_s``/``rho_r`` are in dB."""
    names = {f.name for f in dataclasses.fields(SystemParams)}
    values = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'", "CONFIG_SYNTAX")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in names:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}", "CONFIG_KEY_UNKNOWN")
        try:
            if key in _INT_KEYS:
                values[key] = int(value)
            elif key in _DB_KEYS:
                values[key] = float(db_to_linear(float(value)))
            else:
                values[key] = float(value)
        except ValueError as exc:
            raise ConfigError(
                f"{source}:{lineno}: bad value {value!r} for {key}", "CONFIG_VALUE_INVALID"
            ) from exc
    return validate(SystemParams(**values))


def load_params(path) -> SystemParams:
    with open(path, encoding="utf-8") as handle:
        lines = handle.readlines()
    params = parse_params(lines, source=str(path))
    logger.info("loaded %s (%d lines)", path, len(lines))
    return params


def format_params(params: SystemParams) -> List[str]:
    lines = []
    for f in dataclasses.fields(params):
        value = getattr(params, f.name)
        if f.name in _DB_KEYS:
            lines.append(f"{f.name} = {float(linear_to_db(value))!r}  # dB")
        else:
            lines.append(f"{f.name} = {value!r}")
    return lines


def dump_params(params: SystemParams, path):
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("\n".join(format_params(params)) + "\n")
