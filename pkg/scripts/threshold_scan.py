#!/usr/bin/env python3
"""Trajectory-error proxy on TwoPoint(q) across c for eps_n = |1 - 2q| - c sqrt(llog n / n).

The proxy is the fraction of simulated trajectories with an error at any n in the grid.
It is only a finite stand-in for almost-sure behaviour; the switch is expected near
c* = 2 sqrt(2 q (1 - q)).
"""

import argparse
import math
import os

import numpy as np

from relaxfrechet.rates import two_point_strong_rate
from relaxfrechet.simulate import threshold_scan, two_point


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--q", type=float, default=0.75)
    ap.add_argument("--factors", type=float, nargs="+", default=[0.5, 0.75, 1.0, 1.25, 1.5, 2.0])
    ap.add_argument("--n-min", type=float, default=1e3)
    ap.add_argument("--n-max", type=float, default=1e5)
    ap.add_argument("--n-points", type=int, default=21)
    ap.add_argument("--trials", type=int, default=200)
    ap.add_argument("--seed", type=int, default=11)
    ap.add_argument("--burn-in", type=int, default=0)
    ap.add_argument("--threads", type=int)
    ap.add_argument("--out", default="results/threshold_scan.csv")
    args = ap.parse_args()

    c_star = 2 * math.sqrt(2 * args.q * (1 - args.q))
    grid = np.unique(np.round(np.logspace(math.log10(args.n_min), math.log10(args.n_max), args.n_points)).astype(int))
    res = threshold_scan(two_point(args.q), two_point_strong_rate(args.q, 0.0),
                         [f * c_star for f in args.factors], grid.tolist(), args.trials, args.seed,
                         sign=-1.0, burn_in=args.burn_in, threads=args.threads)
    print(f"c* = {c_star:.4f}")
    for f, te in zip(args.factors, res.trajectory_errors()):
        print(f"  c = {f:4.2f} c*  proxy = {te:.3f}")
    os.makedirs(os.path.dirname(args.out) or ".", exist_ok=True)
    with open(args.out, "w") as fh:
        fh.write(res.to_csv())
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
