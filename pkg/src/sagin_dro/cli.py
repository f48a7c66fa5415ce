"""Command-line entry point: plan, sweep, gen-trace, validate."""

from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from .ambiguity import AmbiguitySet, quantize_trace
from .baselines import POLICIES, plan_for
from .channel import realize_rates
from .dro import InfeasibleScenario
from .experiment import AXES, ExperimentSpec, emit_results, run_experiment
from .scenario import Scenario
from .traces import (
    DEFAULT_FRACTION, bundled_scenario_path, bundled_trace_path, ingest_trace, synth_metadata,
    synth_trace, write_trace,
)

HISTORY_HELP = ("number of leading trace slots used to build the reference distribution; "
                "sweeps evaluate on the slots after the largest history size")


def _load_scenario(path):
    return Scenario.load(path or bundled_scenario_path())


def cmd_plan(args) -> int:
    sc = _load_scenario(args.scenario)
    volumes = np.asarray(ingest_trace(args.trace or bundled_trace_path(), args.fraction))
    if volumes.size < args.history:
        print(f"error: trace has {volumes.size} slots, fewer than --history {args.history}", file=sys.stderr)
        return 2
    support, snapped = quantize_trace(volumes, args.K)
    amb = AmbiguitySet.calibrated(args.metric, support, snapped[: args.history], args.beta)
    rates = realize_rates(sc, args.seed)
    try:
        plan = plan_for(args.policy, sc, rates, amb)
    except InfeasibleScenario as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    text = plan.to_json(indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 0


def _parse_values(s: str) -> list[float]:
    return [float(v) for v in s.split(",") if v.strip()]


def cmd_sweep(args) -> int:
    if args.spec:
        spec = ExperimentSpec.load(args.spec)
    else:
        if not args.axis or not args.values:
            print("error: give --spec or both --axis and --values", file=sys.stderr)
            return 2
        spec = ExperimentSpec(axis=args.axis, values=_parse_values(args.values),
                              metrics=args.metrics.split(","), seeds=list(range(args.seeds)),
                              history_size=args.history, confidence=args.beta)
    for attr in ("scenario", "trace"):
        val = getattr(args, attr)
        if val:
            setattr(spec, f"{attr}_path", val)
    # incremental rows go to the CSV; JSON is written once at the end
    if args.out and args.format == "csv":
        spec.output_path = args.out
    result = run_experiment(spec)
    if args.out and args.format == "json":
        emit_results(result, args.out, "json")
    elif not args.out:
        from .experiment import results_to_csv, results_to_json
        sys.stdout.write(results_to_csv(result) if args.format == "csv" else results_to_json(result) + "\n")
    for f in result.failures:
        print(f"failed cell: {f}", file=sys.stderr)
    return 0


def cmd_gen_trace(args) -> int:
    records = synth_trace(args.seed, args.minutes, args.level, args.burstiness)
    meta = synth_metadata(args.seed, args.minutes, args.level, args.burstiness)
    if args.out:
        write_trace(args.out, records, meta)
    else:
        for k, v in meta.items():
            print(f"# {k}={v}")
        print("timestamp,demand")
        for r in records:
            print(f"{r.timestamp},{r.demand!r}")
    return 0


def cmd_validate(args) -> int:
    try:
        sc = _load_scenario(args.scenario)
    except (OSError, ValueError, TypeError, KeyError) as exc:
        print(f"error: cannot load scenario: {exc}", file=sys.stderr)
        return 1
    issues = sc.validate()
    report = {"ok": not issues, "issues": issues, "T": sc.T, "N": sc.N, "M": sc.M,
              "energy_budget_j": sc.energy_budget()}
    print(json.dumps(report, indent=2) if args.format == "json" else
          ("ok" if not issues else "\n".join(issues)))
    return 0 if not issues else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sagin-dro", description="Robust task offloading for a UAV relay.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--scenario", help="scenario JSON (default: bundled)")
        sp.add_argument("--trace", help="demand CSV timestamp,demand (default: bundled synthetic trace)")
        sp.add_argument("--out", help="output file (default: stdout)")

    sp = sub.add_parser("plan", help="solve once and print the plan as JSON")
    common(sp)
    sp.add_argument("--metric", default="kantorovich", choices=["l1", "linf", "kantorovich"])
    sp.add_argument("--beta", type=float, default=0.95, help="confidence level")
    sp.add_argument("--history", type=int, default=300, help=HISTORY_HELP)
    sp.add_argument("--seed", type=int, default=0, help="channel realization seed")
    sp.add_argument("--policy", default="dro", choices=POLICIES)
    sp.add_argument("--fraction", type=float, default=DEFAULT_FRACTION, help="share of per-minute demand")
    sp.add_argument("--K", type=int, default=9, help="support size")
    sp.set_defaults(func=cmd_plan)

    sp = sub.add_parser("sweep", help="run an experiment grid")
    common(sp)
    sp.add_argument("--spec", help="experiment spec JSON")
    sp.add_argument("--axis", choices=AXES)
    sp.add_argument("--values", help="comma-separated axis values")
    sp.add_argument("--metrics", default="kantorovich", help="comma-separated metrics")
    sp.add_argument("--metric", dest="metrics", help="alias of --metrics")
    sp.add_argument("--seeds", type=int, default=5, help="number of seeds (0..n-1)")
    sp.add_argument("--seed", type=int, dest="seeds", help="alias of --seeds")
    sp.add_argument("--beta", type=float, default=0.95)
    sp.add_argument("--history", type=int, default=300, help=HISTORY_HELP)
    sp.add_argument("--format", default="csv", choices=["csv", "json"])
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("gen-trace", help="write a synthetic demand trace")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--minutes", type=int, default=300)
    sp.add_argument("--level", type=float, default=2.5e9, help="mean demand per minute, bits")
    sp.add_argument("--burstiness", type=float, default=0.6, help="coefficient of variation")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_gen_trace)

    sp = sub.add_parser("validate", help="lint a scenario file")
    sp.add_argument("--scenario")
    sp.add_argument("--format", default="text", choices=["text", "json"])
    sp.set_defaults(func=cmd_validate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
