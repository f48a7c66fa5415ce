"""Robust and greedy latency per metric against history size."""

from _common import parser, print_summary, run
from sagin_dro.experiment import ExperimentSpec

if __name__ == "__main__":
    args = parser(__doc__, "results/fig3a.csv").parse_args()
    spec = ExperimentSpec(axis="history_size", values=[50, 100, 200, 300, 500, 1000],
                          metrics=["l1", "linf", "kantorovich"], policies=["dro", "greedy"])
    print_summary(run(spec, args, "fig3a"), "history")
