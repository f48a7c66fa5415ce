"""Ball radius per metric against history size (no solves)."""

import argparse
import csv
import sys

from sagin_dro.experiment import theta_table

if __name__ == "__main__":
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--K", type=int, default=9)
    p.add_argument("--beta", type=float, default=0.95)
    p.add_argument("--out", help="CSV path (default: stdout)")
    args = p.parse_args()
    rows = theta_table(range(50, 3001, 50), [args.beta], args.K)
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.DictWriter(fh, fieldnames=list(rows[0]))
    w.writeheader()
    w.writerows(rows)
