"""Parameter sweeps over history size, confidence, BS capacity and volume scale.

Protocol for one cell (axis value, seed):

* the trace is aggregated to per-slot volumes and scaled by the volume scale;
* the support is K equal-width bin centres over the whole (scaled) trace and
  every volume is snapped to it;
* the first ``history_size`` slots give the reference distribution;
* the channel is drawn with the cell's seed;
* each policy plans once and is evaluated on consecutive T-slot windows of
  the held-out part of the trace, i.e. everything after the largest history
  size appearing in the spec, so all cells of a sweep share one test set.

Policies that plan against an ambiguity set (dro, greedy) get one row per
metric. The deterministic policies do not depend on the metric and get a
single row per cell with metric ``-`` and an empty theta.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import time
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .ambiguity import AmbiguitySet, Metric, SupportSet, quantize_trace
from .baselines import POLICIES, plan_for
from .channel import realize_rates
from .dro import evaluate_plan
from .scenario import Scenario
from .traces import DEFAULT_FRACTION, bundled_scenario_path, bundled_trace_path, ingest_trace

log = logging.getLogger(__name__)

AXES = ("history_size", "confidence", "bs_capacity", "volume_scale")
ROBUST_POLICIES = ("dro", "greedy")
NO_METRIC = "-"
COLUMNS = ("policy", "metric", "axis", "axis_value", "seed", "latency_s", "worst_case_latency_s",
           "energy_j", "theta", "drops", "ms")
CONVENTION = ("robust policies (dro, greedy) have one row per metric; deterministic policies "
              "one row per cell with metric '-'; empty numeric fields mark a failed cell")


@dataclass
class ExperimentSpec:
    axis: str
    values: list
    metrics: list = field(default_factory=lambda: ["kantorovich"])
    policies: list = field(default_factory=lambda: list(POLICIES))
    seeds: list = field(default_factory=lambda: [0, 1, 2, 3, 4])
    scenario_path: str | None = None
    trace_path: str | None = None
    output_path: str | None = None
    history_size: int = 300
    confidence: float = 0.95
    K: int = 9
    fraction: float = DEFAULT_FRACTION
    volume_scale: float = 1.0
    max_windows: int | None = None

    def __post_init__(self):
        if self.axis not in AXES:
            raise ValueError(f"axis must be one of {AXES}, got {self.axis!r}")
        if not self.values:
            raise ValueError("axis values must be nonempty")
        if not self.seeds:
            raise ValueError("seeds must be nonempty")
        self.metrics = [Metric.parse(m).value for m in self.metrics]
        for p in self.policies:
            if p not in POLICIES:
                raise ValueError(f"unknown policy {p!r}")

    def rows_per_cell(self) -> int:
        robust = sum(p in ROBUST_POLICIES for p in self.policies)
        return robust * len(self.metrics) + (len(self.policies) - robust)

    def grid_size(self) -> int:
        return len(self.values) * len(self.seeds) * self.rows_per_cell()

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentSpec":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown spec keys: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def load(cls, path) -> "ExperimentSpec":
        return cls.from_dict(json.loads(Path(path).read_text()))


@dataclass
class ResultRow:
    policy: str
    metric: str
    axis: str
    axis_value: float
    seed: int
    latency_s: float | None
    worst_case_latency_s: float | None
    energy_j: float | None
    theta: float | None
    drops: int | None
    ms: float

    def __post_init__(self):
        for name in ("axis_value", "latency_s", "worst_case_latency_s", "energy_j", "theta", "ms"):
            v = getattr(self, name)
            if v is not None:
                setattr(self, name, float(v))
        self.seed = int(self.seed)
        if self.drops is not None:
            self.drops = int(self.drops)

    @property
    def failed(self) -> bool:
        return self.latency_s is None

    def as_list(self) -> list:
        return [getattr(self, c) for c in COLUMNS]


@dataclass
class ExperimentResult:
    spec: ExperimentSpec
    rows: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"convention": CONVENTION, "spec": self.spec.to_dict(),
                "rows": [asdict(r) for r in self.rows], "failures": list(self.failures)}

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentResult":
        return cls(ExperimentSpec.from_dict(d["spec"]), [ResultRow(**r) for r in d["rows"]],
                   [dict(f) for f in d.get("failures", [])])

    def summary(self, column: str = "latency_s") -> dict:
        """Mean and std over seeds of one numeric column, keyed by (policy, metric, axis_value)."""
        groups: dict = {}
        for r in self.rows:
            if not r.failed:
                groups.setdefault((r.policy, r.metric, r.axis_value), []).append(getattr(r, column))
        return {k: {"mean": float(np.mean(v)), "std": float(np.std(v)), "n": len(v)}
                for k, v in groups.items()}


def _windows(volumes: np.ndarray, start: int, T: int, limit: int | None) -> np.ndarray:
    rest = volumes[start:]
    n = rest.size // T
    if limit is not None:
        n = min(n, limit)
    return rest[: n * T].reshape(n, T)


def _cell_setup(spec: ExperimentSpec, scenario: Scenario, volumes: np.ndarray, value):
    """Scenario, volumes, history size and confidence for one axis value."""
    history, beta, scale = spec.history_size, spec.confidence, spec.volume_scale
    if spec.axis == "history_size":
        history = int(value)
    elif spec.axis == "confidence":
        beta = float(value)
    elif spec.axis == "volume_scale":
        scale = float(value)
    else:
        scenario = scenario.with_(bs_list=tuple(
            replace(bs, capacity_bps=float(value)) for bs in scenario.bs_list))
    return scenario, volumes * scale, history, beta


def _evaluate(plan, windows, scenario, rates):
    lat = energy = 0.0
    drops = 0
    for w in windows:
        ev = evaluate_plan(plan, w, scenario, rates)
        lat += ev.latency_s
        energy += ev.energy_j
        drops += ev.drops
    n = max(len(windows), 1)
    return lat / n, energy / n, drops


def load_inputs(spec: ExperimentSpec) -> tuple[Scenario, np.ndarray]:
    scenario = Scenario.load(spec.scenario_path or bundled_scenario_path())
    volumes = np.asarray(ingest_trace(spec.trace_path or bundled_trace_path(), spec.fraction))
    return scenario, volumes


def iter_cells(spec: ExperimentSpec, scenario: Scenario | None = None, volumes=None):
    """Yield result rows in deterministic grid order."""
    if scenario is None or volumes is None:
        scenario, volumes = load_inputs(spec)
    volumes = np.asarray(volumes, dtype=float)
    max_hist = max(int(v) for v in spec.values) if spec.axis == "history_size" else spec.history_size
    if volumes.size < max_hist + scenario.T:
        raise ValueError(f"trace has {volumes.size} slots; need more than {max_hist} for history "
                         f"plus at least one {scenario.T}-slot evaluation window")
    for value in spec.values:
        sc, vols, history, beta = _cell_setup(spec, scenario, volumes, value)
        support, snapped = quantize_trace(vols, spec.K)
        windows = _windows(snapped, max_hist, sc.T, spec.max_windows)
        for seed in spec.seeds:
            rates = realize_rates(sc, int(seed))
            for policy in spec.policies:
                metrics = spec.metrics if policy in ROBUST_POLICIES else [NO_METRIC]
                for metric in metrics:
                    yield _run_cell(spec, policy, metric, value, int(seed), sc, rates, support,
                                    snapped[:history], beta, windows)


def _run_cell(spec, policy, metric, value, seed, sc, rates, support: SupportSet, history, beta, windows):
    t0 = time.perf_counter()
    theta = None
    try:
        m = metric if metric != NO_METRIC else spec.metrics[0]
        amb = AmbiguitySet.calibrated(m, support, history, beta)
        if policy in ROBUST_POLICIES:
            theta = amb.theta
        plan = plan_for(policy, sc, rates, amb)
        lat, energy, drops = _evaluate(plan, windows, sc, rates)
        return ResultRow(policy, metric, spec.axis, float(value), seed, lat, plan.worst_case_objective,
                         energy, theta, drops, (time.perf_counter() - t0) * 1e3), None
    except Exception as exc:  # a failed cell is recorded, the sweep goes on
        log.warning("cell %s/%s/%s=%s/seed %d failed: %s", policy, metric, spec.axis, value, seed, exc)
        row = ResultRow(policy, metric, spec.axis, float(value), seed, None, None, None, theta, None,
                        (time.perf_counter() - t0) * 1e3)
        return row, f"{type(exc).__name__}: {exc}"


def _csv_header() -> str:
    return f"# {CONVENTION}\n" + ",".join(COLUMNS) + "\n"


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _csv_line(row: ResultRow) -> str:
    return ",".join(_fmt(v) for v in row.as_list()) + "\n"


def run_experiment(spec: ExperimentSpec, scenario: Scenario | None = None, volumes=None) -> ExperimentResult:
    """Evaluate the whole grid; rows are appended to ``spec.output_path`` (CSV) as they finish."""
    result = ExperimentResult(spec)
    out = None
    if spec.output_path:
        out = open(spec.output_path, "w")
        out.write(_csv_header())
        out.flush()
    try:
        for row, err in iter_cells(spec, scenario, volumes):
            result.rows.append(row)
            if err is not None:
                result.failures.append({"policy": row.policy, "metric": row.metric,
                                        "axis_value": row.axis_value, "seed": row.seed, "error": err})
            if out:
                out.write(_csv_line(row))
                out.flush()
    finally:
        if out:
            out.close()
    return result


def results_to_csv(result: ExperimentResult) -> str:
    buf = io.StringIO()
    buf.write(_csv_header())
    for r in result.rows:
        buf.write(_csv_line(r))
    return buf.getvalue()


def results_to_json(result: ExperimentResult) -> str:
    return json.dumps(result.to_dict(), indent=2)


def emit_results(result: ExperimentResult, path, fmt: str = "csv") -> None:
    if fmt == "csv":
        text = results_to_csv(result)
    elif fmt == "json":
        text = results_to_json(result)
    else:
        raise ValueError(f"format must be csv or json, got {fmt!r}")
    Path(path).write_text(text)


def read_results_csv(path) -> list[dict]:
    """Parse an emitted CSV back into dicts (numbers as floats, blanks as None)."""
    with open(path) as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    out = []
    for rec in csv.DictReader(lines):
        row = {}
        for k, v in rec.items():
            if k in ("policy", "metric", "axis"):
                row[k] = v
            elif v == "":
                row[k] = None
            elif k in ("seed", "drops"):
                row[k] = int(v)
            else:
                row[k] = float(v)
        out.append(row)
    return out


def theta_table(history_sizes, betas=(0.95,), K: int = 9) -> list[dict]:
    """Closed-form tolerance for every metric over a grid (no solving)."""
    from .ambiguity import tolerance
    return [{"metric": m.value, "history_size": int(n), "confidence": b, "theta": tolerance(m, K, int(n), b)}
            for m in Metric for b in betas for n in history_sizes]
