"""Command-line front end.

    python -m pyNomaAS.main sweep  [config] --mode both --schemes max_u1_analytic --power 0:50:5
    python -m pyNomaAS.main validate [config]
    python -m pyNomaAS.main draw [config] --trials 1000 -o channels.csv
    python -m pyNomaAS.main schemes

A grid starting below zero must be attached with "=", as in --power=-20:40:10;
otherwise argparse reads it as an option.

Exit codes: 0 success, 1 usage, 2 invalid config or I/O error, 3 validation failure.
"""
from __future__ import annotations

import argparse
import logging
import sys

from pyNomaAS.analysis.analytic import ANALYTIC_SCHEMES
from pyNomaAS.analysis.montecarlo import METRICS, write_csv
from pyNomaAS.analysis.sweep import MODES, sweep_rows
from pyNomaAS.analysis.validation import ValidationOptions, run_checks
from pyNomaAS.errors import ConfigError, NomaASError
from pyNomaAS.models.channel import RngSeed, draw, dump_realizations
from pyNomaAS.models.selection_schemes import SCHEMES
from pyNomaAS.models.system_params import SWEEP_TARGETS, SweepSpec, SystemParams, load_params, validate
from pyNomaAS.utils.helpers import parse_power_grid

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_CONFIG = 2
EXIT_VALIDATION = 3


class UsageError(Exception):
    pass


class ArgumentParser(argparse.ArgumentParser):
    """argparse exits with 2 on bad usage; 2 is reserved for config errors here."""

    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")


def _identifiers(text, known, what):
    names = [part.strip() for part in text.split(",") if part.strip()]
    unknown = [name for name in names if name not in known]
    if unknown or not names:
        raise UsageError(f"unknown {what}: {', '.join(unknown) or text!r} (choose from {', '.join(known)})")
    return names


def _load(path):
    return load_params(path) if path else validate(SystemParams())


def build_parser():
    parser = ArgumentParser(prog="pyNomaAS", description="Antenna selection in FD cooperative NOMA")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    parser.add_argument("-q", "--quiet", action="store_true", help="warnings only")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=ArgumentParser)

    sweep = commands.add_parser("sweep", help="ergodic rate / outage / fairness vs transmit power")
    sweep.add_argument("config", nargs="?", help="key = value parameter file (defaults if omitted)")
    sweep.add_argument("--mode", choices=MODES, default="mc")
    sweep.add_argument("--schemes", default=",".join(SCHEMES), help="comma list; see the schemes command")
    sweep.add_argument("--metrics", default=",".join(METRICS))
    sweep.add_argument(
        "--power", default="0:50:5",
        help="dB grid, start:stop:step (inclusive) or list; write --power=-20:40:10 for a negative start",
    )
    sweep.add_argument("--var-si", default="", help="residual SI variances to sweep, list or start:stop:step")
    sweep.add_argument("--target", choices=SWEEP_TARGETS, default="joint", help="which SNR the grid sets")
    sweep.add_argument("--trials", type=int, default=1_000_000)
    sweep.add_argument("--seed", type=int, default=0)
    sweep.add_argument("--workers", type=int, default=1)
    sweep.add_argument("-o", "--output", default="sweep.csv")

    check = commands.add_parser("validate", help="run the invariant and cross-validation suite")
    check.add_argument("config", nargs="?")
    check.add_argument("--power", default="0,10,20,30")
    check.add_argument("--trials", type=int, default=ValidationOptions.trials)
    check.add_argument("--seed", type=int, default=ValidationOptions.seed)
    check.add_argument("--sigmas", type=float, default=ValidationOptions.sigmas)

    dump = commands.add_parser("draw", help="dump channel realizations to CSV")
    dump.add_argument("config", nargs="?")
    dump.add_argument("--trials", type=int, default=1000)
    dump.add_argument("--seed", type=int, default=0)
    dump.add_argument("--stream", type=int, default=0)
    dump.add_argument("-o", "--output", default="channels.csv")

    commands.add_parser("schemes", help="list the antenna-selection schemes")
    return parser


def cmd_sweep(args):
    params = _load(args.config)
    sweep = SweepSpec(
        power_db=parse_power_grid(args.power),
        schemes=_identifiers(args.schemes, list(SCHEMES), "scheme"),
        metrics=_identifiers(args.metrics, list(METRICS), "metric"),
        trials=args.trials,
        seed=args.seed,
        target=args.target,
        workers=args.workers,
        var_si=parse_power_grid(args.var_si, "var_si grid") if args.var_si else (),
    )
    rows = sweep_rows(params, sweep, args.mode)
    write_csv(rows, args.output, sweep.metrics)

    print(
        f"{'power_db':>8} {'var_si':>7}  {'scheme':<18} {'kind':<11} "
        f"{'rate_sum':>9} {'out_u1':>10} {'out_u2':>10} {'jain':>6}"
    )
    for row in rows:
        m = row.metrics
        print(
            f"{row.power_db:>8g} {row.var_si:>7g}  {row.scheme:<18} {row.kind:<11} {m.rate_sum.value:>9.4f} "
            f"{m.outage_u1.value:>10.3e} {m.outage_u2.value:>10.3e} {m.jain_index.value:>6.3f}"
            + ("" if m.status == "ok" else f"  [{m.status}]")
        )
    print(f"{len(rows)} rows written to {args.output}")
    return EXIT_OK


def cmd_validate(args):
    params = _load(args.config)
    options = ValidationOptions(
        power_db=tuple(parse_power_grid(args.power)), trials=args.trials, seed=args.seed, sigmas=args.sigmas
    )
    results = run_checks(params, options)
    width = max(len(result.name) for result in results)
    for result in results:
        print(f"{'PASS' if result.passed else 'FAIL'}  {result.name:<{width}}  {result.detail}")
    passed = all(result.passed for result in results)
    print(f"{sum(r.passed for r in results)}/{len(results)} checks passed")
    return EXIT_OK if passed else EXIT_VALIDATION


def cmd_draw(args):
    params = _load(args.config)
    real = draw(params, RngSeed(args.seed, args.stream), args.trials)
    dump_realizations(real, args.output)
    print(f"{real.n_trials} realizations written to {args.output}")
    return EXIT_OK


def cmd_schemes(args):
    width = max(len(name) for name in SCHEMES)
    for name, scheme in SCHEMES.items():
        closed = "closed form" if name in ANALYTIC_SCHEMES else "simulation only"
        print(f"{name:<{width}}  {closed:<15}  {scheme.description}")
    return EXIT_OK


COMMANDS = {"sweep": cmd_sweep, "validate": cmd_validate, "draw": cmd_draw, "schemes": cmd_schemes}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
        logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NomaASError as exc:
        logger.error("numerical failure: %s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
