"""Analytic sweeps and Monte Carlo / closed-form pairing on the shared CSV schema."""
from __future__ import annotations

import dataclasses
import logging
from typing import List

from pyNomaAS.analysis.analytic import ANALYTIC_SCHEMES, analytic_metrics
from pyNomaAS.analysis.montecarlo import SweepRow, run_sweep, sweep_points, validate_sweep
from pyNomaAS.models.system_params import SweepSpec, SystemParams

logger = logging.getLogger(__name__)

MODES = ("mc", "analytic", "both")


def _without_closed_form(schemes):
    missing = [name for name in schemes if name not in ANALYTIC_SCHEMES]
    if missing:
        logger.warning("no closed form for %s; analytic rows skipped", ", ".join(missing))
    return missing


def run_analytic_sweep(params: SystemParams, sweep: SweepSpec) -> List[SweepRow]:
    validate_sweep(sweep)
    _without_closed_form(sweep.schemes)
    rows = []
    for power_db, point in sweep_points(params, sweep):
        for name in sweep.schemes:
            if name in ANALYTIC_SCHEMES:
                rows.append(SweepRow(power_db, name, analytic_metrics(point, name), var_si=point.var_si))
    return rows


def relative_difference(mc: SweepRow, analytic: SweepRow):
    """Largest |mc - analytic| / analytic over the two user rates."""
    diffs = []
    for metric in ("rate_u1", "rate_u2"):
        reference = analytic.metrics.get(metric).value
        if reference > 0.0:
            diffs.append(abs(mc.metrics.get(metric).value - reference) / reference)
    return max(diffs) if diffs else None


def run_paired_sweep(params: SystemParams, sweep: SweepSpec) -> List[SweepRow]:
    """Monte Carlo row followed by its analytic row, both carrying rel_diff."""
    mc_rows = run_sweep(params, sweep)
    analytic_rows = {(row.var_si, row.power_db, row.scheme): row for row in run_analytic_sweep(params, sweep)}
    rows = []
    for mc in mc_rows:
        analytic = analytic_rows.get((mc.var_si, mc.power_db, mc.scheme))
        if analytic is None:
            rows.append(mc)
            continue
        diff = relative_difference(mc, analytic)
        rows.append(dataclasses.replace(mc, rel_diff=diff))
        rows.append(dataclasses.replace(analytic, rel_diff=diff))
    return rows


def sweep_rows(params: SystemParams, sweep: SweepSpec, mode="mc") -> List[SweepRow]:
    if mode == "mc":
        return run_sweep(params, sweep)
    if mode == "analytic":
        return run_analytic_sweep(params, sweep)
    if mode == "both":
        return run_paired_sweep(params, sweep)
    raise ValueError(f"unknown mode {mode!r}")
