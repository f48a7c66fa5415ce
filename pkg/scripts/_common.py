"""Shared argument handling for the figure scripts."""

import argparse
import time
from pathlib import Path

from sagin_dro.experiment import ExperimentSpec, run_experiment


def parser(description: str, default_out: str) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(description=description)
    p.add_argument("--out", default=default_out, help="CSV written incrementally")
    p.add_argument("--seeds", type=int, default=5)
    p.add_argument("--scenario")
    p.add_argument("--trace")
    p.add_argument("--max-windows", type=int, default=None, help="cap on evaluation windows (quick runs)")
    return p


def run(spec: ExperimentSpec, args, label: str):
    spec.seeds = list(range(args.seeds))
    spec.scenario_path, spec.trace_path = args.scenario, args.trace
    spec.max_windows = args.max_windows
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    spec.output_path = args.out
    t0 = time.perf_counter()
    res = run_experiment(spec)
    print(f"{label}: {len(res.rows)} rows, {len(res.failures)} failed, {time.perf_counter() - t0:.1f} s -> {args.out}")
    return res


def print_summary(res, axis_name: str):
    wc = res.summary("worst_case_latency_s")
    rows = sorted(res.summary().items(), key=lambda kv: (kv[0][2], kv[0][0], kv[0][1]))
    print(f"{axis_name:>12} {'policy':<22}{'metric':<13}{'mean s':>9}{'std':>8}{'worst case':>12}")
    for key, s in rows:
        policy, metric, value = key
        print(f"{value:>12g} {policy:<22}{metric:<13}{s['mean']:>9.3f}{s['std']:>8.3f}{wc[key]['mean']:>12.3f}")

