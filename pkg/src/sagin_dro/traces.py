"""Demand traces: CSV ingestion, per-minute aggregation and a synthetic generator.

Trace files are CSV with a ``timestamp,demand`` header, timestamps in integer
minutes and demand in bits. Lines starting with ``#`` carry metadata as
``# key=value`` and are otherwise ignored.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

log = logging.getLogger(__name__)

DEFAULT_FRACTION = 0.1


@dataclass(frozen=True)
class TraceRecord:
    timestamp: int  # minutes
    demand: float  # bits

    def __post_init__(self):
        if self.demand < 0 or not np.isfinite(self.demand):
            raise ValueError(f"demand must be finite and >= 0, got {self.demand}")


class TraceFormatError(ValueError):
    def __init__(self, path, line: int, msg: str):
        super().__init__(f"{path}:{line}: {msg}")
        self.line = line


def _parse_records(path) -> tuple[list[TraceRecord], dict]:
    records: list[TraceRecord] = []
    meta: dict = {}
    header_seen = False
    with open(path, newline="") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, sep, val = line[1:].strip().partition("=")
                if sep:
                    meta[key.strip()] = val.strip()
                continue
            fields = next(csv.reader([line]))
            if not header_seen and [f.strip().lower() for f in fields] == ["timestamp", "demand"]:
                header_seen = True
                continue
            if len(fields) != 2:
                raise TraceFormatError(path, lineno, f"expected 2 fields, got {len(fields)}")
            try:
                ts_f = float(fields[0])
                demand = float(fields[1])
            except ValueError:
                raise TraceFormatError(path, lineno, f"non-numeric field in {line!r}") from None
            if ts_f != int(ts_f):
                raise TraceFormatError(path, lineno, f"timestamp {fields[0]!r} is not an integer minute")
            if demand < 0 or not np.isfinite(demand):
                raise TraceFormatError(path, lineno, f"demand must be finite and >= 0, got {fields[1]!r}")
            if records and int(ts_f) < records[-1].timestamp:
                raise TraceFormatError(path, lineno, "timestamps must be nondecreasing")
            records.append(TraceRecord(int(ts_f), demand))
    return records, meta


def read_trace(path) -> list[TraceRecord]:
    return _parse_records(path)[0]


def read_metadata(path) -> dict:
    return _parse_records(path)[1]


def aggregate(records: list[TraceRecord], fraction: float = DEFAULT_FRACTION) -> list[float]:
    """Per-minute demand sums times `fraction`, in trace order."""
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"fraction must lie in (0, 1], got {fraction}")
    sums: dict[int, float] = {}
    for r in records:
        sums[r.timestamp] = sums.get(r.timestamp, 0.0) + r.demand
    return [v * fraction for v in sums.values()]


def ingest_trace(path, fraction: float = DEFAULT_FRACTION) -> list[float]:
    """Task volume (bits) per one-minute slot from a demand CSV."""
    if not 0.0 < fraction <= 1.0:
        raise ValueError(f"fraction must lie in (0, 1], got {fraction}")
    records = read_trace(path)
    if not records:
        log.warning("trace %s has no records", path)
        return []
    return aggregate(records, fraction)


def synth_trace(seed: int, minutes: int, level: float, burstiness: float) -> list[TraceRecord]:
    """One record per minute with gamma-distributed demand.

    The marginal has mean `level` and coefficient of variation `burstiness`
    (shape 1/b^2, scale level*b^2); burstiness 0 gives a constant trace.
    """
    if minutes < 0:
        raise ValueError("minutes must be >= 0")
    if level < 0 or burstiness < 0:
        raise ValueError("level and burstiness must be >= 0")
    if burstiness == 0 or level == 0:
        demand = np.full(minutes, float(level))
    else:
        rng = np.random.default_rng(seed)
        demand = rng.gamma(1.0 / burstiness**2, level * burstiness**2, minutes)
    return [TraceRecord(t, float(d)) for t, d in enumerate(demand)]


def synth_metadata(seed: int, minutes: int, level: float, burstiness: float) -> dict:
    marginal = "constant" if burstiness == 0 or level == 0 else "gamma"
    meta = {"generator": "synth_trace", "marginal": marginal, "seed": seed, "minutes": minutes,
            "mean_bits": level, "cv": burstiness}
    if marginal == "gamma":
        meta["shape"] = 1.0 / burstiness**2
        meta["scale_bits"] = level * burstiness**2
    return meta


def write_trace(path, records: list[TraceRecord], metadata: dict | None = None) -> None:
    with open(path, "w", newline="") as fh:
        for k, v in (metadata or {}).items():
            fh.write(f"# {k}={v}\n")
        w = csv.writer(fh)
        w.writerow(["timestamp", "demand"])
        for r in records:
            w.writerow([r.timestamp, repr(r.demand)])


# Bundled data: eight "days" of 300 minutes (the first five hours of each day),
# generated by synth_trace with the parameters below. The single-day file is
# the first 300 minutes of the same trace.
BUNDLED_SEED = 20240
BUNDLED_LEVEL = 2.5e9
BUNDLED_CV = 0.6
BUNDLED_MINUTES = 2400


def data_path(name: str) -> Path:
    return Path(str(resources.files("sagin_dro") / "data" / name))


def bundled_trace_path(day_only: bool = False) -> Path:
    return data_path("synthetic_day.csv" if day_only else "synthetic_trace.csv")


def bundled_scenario_path() -> Path:
    return data_path("scenario.json")
