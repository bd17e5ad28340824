#!/usr/bin/env python3
"""Arc example: P(gap at (1,0) > (4p/(p-1)) c^2 / n) by Monte Carlo, next to two reference limits.

``half_erfc`` is the normal tail P(N > 2c).  ``clt_limit`` is 2 Phi(-2 sqrt(2) c), obtained
from the second-order expansion gap ~ (2p/(p-1)) (k_n/n)^2 with k_n/sqrt(n) -> N(0, 1/4).
``exact`` sums the binomial law of the number of draws at (0, 1) against the closed-form gap.
"""

import argparse
import math

import numpy as np
from scipy.stats import binom, norm

from relaxfrechet.simulate import arc_gap, arc_weak_error_frequency


def exact_probability(p, c, n):
    k = np.arange(1, n)
    hit = np.array([arc_gap(p, int(j), n) > (4 * p / (p - 1)) * c * c / n for j in k])
    pmf = binom.pmf(k, n, 0.5)
    return float(pmf[hit].sum() / pmf.sum())


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p", type=float, nargs="+", default=[1.5, 2.0, 3.0])
    ap.add_argument("--c", type=float, nargs="+", default=[0.25, 0.5, 1.0])
    ap.add_argument("--n", type=int, default=10**4)
    ap.add_argument("--trials", type=int, default=10**5)
    ap.add_argument("--seed", type=int, default=2024)
    args = ap.parse_args()

    print("p,c,n,trials,freq,exact,half_erfc,clt_limit")
    for p in args.p:
        for c in args.c:
            f = arc_weak_error_frequency(p, c, args.n, args.trials, args.seed)
            print(f"{p},{c},{args.n},{args.trials},{f:.5f},{exact_probability(p, c, args.n):.5f},"
                  f"{0.5 * math.erfc(c * math.sqrt(2)):.5f},{2 * norm.cdf(-2 * math.sqrt(2) * c):.5f}")


if __name__ == "__main__":
    main()
