import math

import numpy as np

from pyNomaAS.errors import ConfigError


def db_to_linear(value_db):
    """Power ratio in dB to linear scale."""
    return 10.0 ** (np.asarray(value_db, dtype=float) / 10.0)


def linear_to_db(value):
    return 10.0 * np.log10(value)


def parse_power_grid(text, what="power grid"):
    """Parse a grid of dB points (or any other swept value).

    Accepts ``start:stop:step`` (stop inclusive), a comma separated list,
    or a single value.

    >>> parse_power_grid("0:50:5")[-1]
    50.0
    """
    text = text.strip()
    try:
        if ":" in text:
            start, stop, step = (float(part) for part in text.split(":"))
            if step <= 0 or stop < start:
                raise ConfigError(f"empty {what} {text!r}", "SWEEP_INVALID")
            # stop is inclusive up to rounding; never step past it
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            return [float(start + n * step) for n in range(count)]
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"cannot parse {what} {text!r}", "SWEEP_INVALID") from exc


def compensated_sum(terms, axis=0):
    """Neumaier-compensated sum of ``terms`` along ``axis``.

    Used for the alternating binomial sums, whose partial sums cancel.
    """
    terms = np.moveaxis(np.asarray(terms, dtype=float), axis, 0)
    total = np.zeros(terms.shape[1:])
    carry = np.zeros(terms.shape[1:])
    for term in terms:
        t = total + term
        big = np.abs(total) >= np.abs(term)
        carry += np.where(big, (total - t) + term, (term - t) + total)
        total = t
    return total + carry
