"""RM(1,m) code-rate table at BER 1e-3 and the SIR-to-throughput map."""

from __future__ import annotations

import csv
import io
from typing import NamedTuple

import numpy as np

from .errors import InvalidParameterError

BER_TARGET = 1e-3


class RateRow(NamedTuple):
    m: int
    rate: float
    sir_db: float


# Ordered by m; rates and SIR thresholds both strictly decreasing.
RATE_TABLE: tuple[RateRow, ...] = (
    RateRow(2, 0.75, 6.0),
    RateRow(3, 0.5, 5.15),
    RateRow(4, 0.3125, 4.6),
    RateRow(5, 0.1875, 4.1),
    RateRow(6, 0.1094, 3.75),
    RateRow(7, 0.0625, 3.45),
    RateRow(8, 0.0352, 3.2),
    RateRow(9, 0.0195, 3.1),
    RateRow(10, 0.0107, 2.8),
)
MAX_RATE = RATE_TABLE[0].rate

_THRESHOLDS = np.array([r.sir_db for r in RATE_TABLE[::-1]])
_RATES = np.array([0.0] + [r.rate for r in RATE_TABLE[::-1]])


def required_sir_db(m: int) -> float:
    for row in RATE_TABLE:
        if row.m == m:
            return row.sir_db
    raise InvalidParameterError(f"m must be in 2..10, got {m}")


def to_db(sir_linear):
    """10 log10 of a linear SIR; infinity maps to infinity."""
    with np.errstate(divide="ignore"):
        out = 10.0 * np.log10(np.asarray(sir_linear, dtype=float))
    return float(out) if np.ndim(out) == 0 else out


def normalized_throughput(sir_db):
    """Highest code rate whose SIR requirement is met; 0 below 2.8 dB.

    Accepts a scalar or an array of dB values (``inf`` gives the top rate).
    """
    x = np.asarray(sir_db, dtype=float)
    out = _RATES[np.searchsorted(_THRESHOLDS, x, side="right")]
    return float(out) if out.ndim == 0 else out


def rate_table_csv() -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["m", "rate", "sir_db"])
    for row in RATE_TABLE:
        w.writerow([row.m, repr(row.rate), repr(row.sir_db)])
    return buf.getvalue()


def parse_rate_table_csv(text: str) -> list[RateRow]:
    rows = csv.DictReader(io.StringIO(text))
    return [RateRow(int(r["m"]), float(r["rate"]), float(r["sir_db"])) for r in rows]
