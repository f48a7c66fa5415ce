"""Latency of the four schemes against history size (Kantorovich ball)."""

from _common import parser, print_summary, run
from sagin_dro.experiment import ExperimentSpec

if __name__ == "__main__":
    args = parser(__doc__, "results/fig2.csv").parse_args()
    spec = ExperimentSpec(axis="history_size", values=[50, 100, 150, 200, 250, 300],
                          metrics=["kantorovich"])
    res = run(spec, args, "fig2")
    print_summary(res, "history")
    s = res.summary()
    dro, det = s["dro", "kantorovich", 300.0]["mean"], s["deterministic", "-", 300.0]["mean"]
    greedy = s["greedy", "kantorovich", 300.0]["mean"]
    print(f"at K'=300: {100 * (1 - dro / det):.1f}% below deterministic, "
          f"{100 * (1 - dro / greedy):.1f}% below greedy")
