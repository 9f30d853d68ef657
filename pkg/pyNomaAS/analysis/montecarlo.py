"""Monte Carlo estimates of ergodic rates, outage and fairness.

Trials are cut into fixed-size chunks; chunk ``s`` is drawn from stream
``RngSeed(seed, s)``, so results depend only on (seed, trials) and never on
the worker count. Each chunk is drawn once and fed to every requested scheme
(common random numbers), which makes per-realization dominance between
schemes exact within a sweep row.
"""
from __future__ import annotations

import csv
import dataclasses
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from pyNomaAS.analysis.analytic import zeta
from pyNomaAS.analysis.metrics import (
    MONTE_CARLO,
    MetricEstimate,
    MetricSet,
    fairness,
    row_status,
)
from pyNomaAS.errors import ConfigError
from pyNomaAS.models.channel import ChannelRealization, RngSeed, draw
from pyNomaAS.models.selection_schemes import SCHEMES
from pyNomaAS.models.sinr import (
    AntennaChoice,
    SinrBundle,
    instantaneous_rates,
    near_user_ratio,
    sinr_bundle,
)
from pyNomaAS.models.system_params import SWEEP_TARGETS, SweepSpec, SystemParams, validate

logger = logging.getLogger(__name__)

METRICS = ("rate_u1", "rate_u2", "rate_sum", "outage_u1", "outage_u2", "jain")

CHUNK_TRIALS = 1 << 15

_SAMPLED = ("rate_u1", "rate_u2", "rate_sum", "outage_u1", "outage_u2")


@dataclass(frozen=True)
class RunningStats:
    """Count, mean and sum of squared deviations of a sample."""

    count: int
    mean: float
    m2: float

    @classmethod
    def of(cls, samples):
        samples = np.asarray(samples, dtype=float)
        mean = float(samples.mean())
        return cls(samples.size, mean, float(np.sum((samples - mean) ** 2)))

    def merge(self, other: "RunningStats") -> "RunningStats":
        count = self.count + other.count
        delta = other.mean - self.mean
        mean = self.mean + delta * other.count / count
        m2 = self.m2 + other.m2 + delta * delta * self.count * other.count / count
        return RunningStats(count, mean, m2)

    @property
    def std_error(self):
        if self.count < 2:
            return 0.0
        return math.sqrt(self.m2 / (self.count - 1) / self.count)


def tree_merge(stats: Sequence[RunningStats]) -> RunningStats:
    """Pairwise merge in index order; the result is independent of scheduling."""
    if len(stats) == 1:
        return stats[0]
    half = len(stats) // 2
    return tree_merge(stats[:half]).merge(tree_merge(stats[half:]))


def near_user_success(bundle: SinrBundle, params: SystemParams):
    """U1 decodes x2 (first SIC stage) and then its own x1."""
    return (bundle.gamma_12 > params.theta2) & (bundle.gamma_1 > params.theta1)


def near_user_success_zeta(real: ChannelRealization, choice: AntennaChoice, params: SystemParams):
    """The same event as a single threshold on g_su1/(g_ru1 + 1)."""
    return near_user_ratio(real, choice) > zeta(params)


def far_user_success(bundle: SinrBundle, params: SystemParams):
    """Relay decodes x2 and U2 receives it above threshold."""
    return (bundle.gamma_r > params.theta2) & (bundle.gamma_ru2 > params.theta2)


def trial_metrics(bundle: SinrBundle, params: SystemParams) -> Dict[str, np.ndarray]:
    """Per-trial samples whose means are the ergodic rates and outage probabilities."""
    rate_u1, rate_u2 = instantaneous_rates(bundle)
    return {
        "rate_u1": rate_u1,
        "rate_u2": rate_u2,
        "rate_sum": rate_u1 + rate_u2,
        "outage_u1": (~near_user_success(bundle, params)).astype(float),
        "outage_u2": (~far_user_success(bundle, params)).astype(float),
    }


def _chunk_sizes(trials, chunk):
    full, rest = divmod(trials, chunk)
    return [chunk] * full + ([rest] if rest else [])


def _run_chunk(params, schemes, seed, stream, n_trials):
    key = RngSeed(seed, stream)
    real = draw(params, key, n_trials)
    stats = {}
    for name in schemes:
        scheme = SCHEMES[name]
        choice = scheme.select(real, params, key) if scheme.randomized else scheme.select(real, params)
        samples = trial_metrics(sinr_bundle(real, choice, params), params)
        stats[name] = {metric: RunningStats.of(samples[metric]) for metric in _SAMPLED}
    return stats


def estimate_metrics(
    params: SystemParams,
    schemes: Sequence[str],
    trials: int,
    seed: int,
    workers: int = 1,
    chunk: int = CHUNK_TRIALS,
) -> Dict[str, MetricSet]:
    """MetricSet per scheme from ``trials`` common realizations."""
    if trials < 1:
        raise ConfigError(f"trials={trials} must be >= 1", "SWEEP_INVALID")
    unknown = [name for name in schemes if name not in SCHEMES]
    if unknown:
        raise ConfigError(f"unknown scheme(s) {unknown}", "SWEEP_INVALID")

    sizes = _chunk_sizes(trials, chunk)
    task = lambda stream: _run_chunk(params, schemes, seed, stream, sizes[stream])
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(task, range(len(sizes))))
    else:
        chunks = [task(stream) for stream in range(len(sizes))]

    infeasible = params.theta2 >= params.sinr_ceiling
    if infeasible:
        logger.warning(
            "theta2=%g >= a2/a1=%g: x2 is never decodable, outage is 1", params.theta2, params.sinr_ceiling
        )

    results = {}
    for name in schemes:
        merged = {
            metric: tree_merge([chunk_stats[name][metric] for chunk_stats in chunks])
            for metric in _SAMPLED
        }
        estimates = {
            metric: MetricEstimate(stats.mean, stats.std_error, stats.count, MONTE_CARLO)
            for metric, stats in merged.items()
        }
        jain, undefined = fairness(estimates["rate_u1"], estimates["rate_u2"])
        results[name] = MetricSet(
            jain_index=jain,
            threshold_infeasible=infeasible,
            status=row_status(infeasible=infeasible, jain_undefined=undefined),
            jain_undefined=undefined,
            **estimates,
        )
    return results


def estimate_rates(params: SystemParams, scheme: str, trials: int, seed: int, workers: int = 1):
    """(rate_u1, rate_u2, rate_sum) estimates in bits/s/Hz."""
    metrics = estimate_metrics(params, [scheme], trials, seed, workers)[scheme]
    return metrics.rate_u1, metrics.rate_u2, metrics.rate_sum


def estimate_outage(params: SystemParams, scheme: str, trials: int, seed: int, workers: int = 1):
    """(outage_u1, outage_u2) event frequencies."""
    metrics = estimate_metrics(params, [scheme], trials, seed, workers)[scheme]
    return metrics.outage_u1, metrics.outage_u2


@dataclass(frozen=True)
class SweepRow:
    power_db: float
    scheme: str
    metrics: MetricSet
    rel_diff: Optional[float] = None
    var_si: Optional[float] = None

    @property
    def kind(self):
        return self.metrics.rate_u1.kind


def validate_sweep(sweep: SweepSpec) -> SweepSpec:
    if not sweep.power_db or not sweep.schemes or not sweep.metrics:
        raise ConfigError("power grid, schemes and metrics must be non-empty", "SWEEP_INVALID")
    if sweep.trials < 1:
        raise ConfigError(f"trials={sweep.trials} must be >= 1", "SWEEP_INVALID")
    unknown = [name for name in sweep.schemes if name not in SCHEMES]
    unknown += [name for name in sweep.metrics if name not in METRICS]
    if unknown:
        raise ConfigError(f"unknown scheme/metric identifier(s) {unknown}", "SWEEP_INVALID")
    if sweep.target not in SWEEP_TARGETS:
        raise ConfigError(f"unknown sweep target {sweep.target!r}", "SWEEP_INVALID")
    if sweep.workers < 1:
        raise ConfigError(f"workers={sweep.workers} must be >= 1", "SWEEP_INVALID")
    bad = [value for value in sweep.var_si if not value > 0.0]
    if bad:
        raise ConfigError(f"var_si values {bad} must be > 0", "SWEEP_INVALID")
    return sweep


def sweep_points(params: SystemParams, sweep: SweepSpec) -> Iterator[Tuple[float, SystemParams]]:
    """(power_db, parameters) in CSV order: var_si outermost, then power."""
    for var_si in tuple(sweep.var_si) or (params.var_si,):
        base = dataclasses.replace(params, var_si=float(var_si))
        for power_db in sweep.power_db:
            yield float(power_db), validate(base.at_power(power_db, sweep.target))


def run_sweep(params: SystemParams, sweep: SweepSpec) -> List[SweepRow]:
    """Monte Carlo rows per (var_si, power point, scheme), same seed at every point."""
    validate_sweep(sweep)
    rows = []
    for power_db, point in sweep_points(params, sweep):
        started = time.perf_counter()
        results = estimate_metrics(point, sweep.schemes, sweep.trials, sweep.seed, sweep.workers)
        logger.info(
            "%g dB, var_si=%g: %d trials x %d scheme(s) in %.1fs",
            power_db, point.var_si, sweep.trials, len(sweep.schemes), time.perf_counter() - started,
        )
        rows.extend(SweepRow(power_db, name, results[name], var_si=point.var_si) for name in sweep.schemes)
    return rows


CSV_COLUMNS = (
    "power_db", "var_si", "scheme", "kind",
    "rate_u1", "rate_u1_se", "rate_u2", "rate_u2_se", "rate_sum",
    "outage_u1", "outage_u1_se", "outage_u2", "outage_u2_se",
    "jain", "trials", "status", "rel_diff",
)


def _fmt(value):
    return format(float(value), ".17g")


def format_row(row: SweepRow, metrics: Sequence[str] = METRICS) -> List[str]:
    m = row.metrics
    cells = {
        "power_db": _fmt(row.power_db),
        "var_si": "" if row.var_si is None else _fmt(row.var_si),
        "scheme": row.scheme,
        "kind": row.kind,
        "trials": str(m.rate_u1.trials),
        "status": m.status,
        "rel_diff": "" if row.rel_diff is None else _fmt(row.rel_diff),
    }
    for metric in METRICS:
        estimate = m.get(metric)
        wanted = metric in metrics
        cells[metric] = _fmt(estimate.value) if wanted else ""
        if metric in ("rate_u1", "rate_u2", "outage_u1", "outage_u2"):
            cells[f"{metric}_se"] = _fmt(estimate.std_error) if wanted else ""
    return [cells[column] for column in CSV_COLUMNS]


def write_csv(rows: Sequence[SweepRow], path, metrics: Sequence[str] = METRICS):
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            writer.writerow(format_row(row, metrics))
    logger.info("wrote %d rows to %s", len(rows), path)
