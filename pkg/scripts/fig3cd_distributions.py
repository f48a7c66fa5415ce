"""Reference and worst-case distributions per metric for two history sizes."""

import argparse

import numpy as np

from sagin_dro.ambiguity import AmbiguitySet, Metric, empirical_distribution, quantize_trace
from sagin_dro.channel import realize_rates
from sagin_dro.dro import worst_case_distribution
from sagin_dro.experiment import ExperimentSpec, load_inputs

if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--histories", default="200,2200")
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()
    sc, vols = load_inputs(ExperimentSpec(axis="history_size", values=[1]))
    support, snapped = quantize_trace(vols, 9)
    rates = realize_rates(sc, args.seed)
    np.set_printoptions(precision=3, suppress=True)
    print("support Mbit", support.array / 1e6)
    print("whole trace ", empirical_distribution(snapped, support).array)
    for n in (int(v) for v in args.histories.split(",")):
        print(f"history {n}")
        for m in Metric:
            amb = AmbiguitySet.calibrated(m, support, snapped[:n], 0.95)
            P, _ = worst_case_distribution(sc, rates, amb)
            print(f"  {m.value:<12} P0 {amb.reference.array}")
            print(f"  {'':<12} P* {P.array}")
