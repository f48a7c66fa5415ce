"""Robust latency per metric against the confidence level, 1000-sample reference."""

from _common import parser, print_summary, run
from sagin_dro.experiment import ExperimentSpec

if __name__ == "__main__":
    args = parser(__doc__, "results/fig4.csv").parse_args()
    spec = ExperimentSpec(axis="confidence", values=[0.5, 0.6, 0.7, 0.8, 0.9],
                          metrics=["l1", "linf", "kantorovich"], policies=["dro"], history_size=1000)
    print_summary(run(spec, args, "fig4"), "beta")
