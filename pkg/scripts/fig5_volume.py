"""Robust latency against history size for scaled task-volume supports."""

from _common import parser, print_summary, run
from sagin_dro.experiment import ExperimentSpec

if __name__ == "__main__":
    p = parser(__doc__, "results/fig5_x{scale}.csv")
    p.add_argument("--scales", default="0.5,0.7,0.9,1.1,1.3")
    args = p.parse_args()
    template = args.out
    for scale in (float(s) for s in args.scales.split(",")):
        args.out = template.format(scale=scale)
        spec = ExperimentSpec(axis="history_size", values=[50, 100, 150, 200, 250, 300],
                              policies=["dro"], volume_scale=scale)
        print_summary(run(spec, args, f"fig5 scale {scale:g}"), "history")
