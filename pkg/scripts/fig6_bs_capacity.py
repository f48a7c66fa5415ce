"""Robust latency and server choice against the BS capacity."""

from _common import parser, print_summary, run
from sagin_dro.experiment import ExperimentSpec

if __name__ == "__main__":
    args = parser(__doc__, "results/fig6.csv").parse_args()
    caps = [float(c) * 1e6 for c in range(5, 41, 5)]
    spec = ExperimentSpec(axis="bs_capacity", values=caps, policies=["dro"])
    print_summary(run(spec, args, "fig6"), "C_b bps")
