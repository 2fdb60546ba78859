#!/usr/bin/env python3
"""Capacity-based parabolicity table for the model manifolds.

Prints cap_p(B_1, B_b) trends and the resulting p-parabolic /
p-hyperbolic classification for Euclidean models over a (N, p) grid and
for the hyperbolic plane.
"""
import argparse

from phardy.capacity import classify_parabolicity
from phardy.geometry import euclidean_radial, hyperbolic_radial


def row(model, name, p):
    cls = classify_parabolicity(model, p)
    flag = " (inconclusive)" if cls.inconclusive else ""
    print(f"{name:>14} p={p:<4g} {cls.classification:<14} "
          f"liminf={cls.liminf_estimate:10.3e} "
          f"last/first={cls.last_over_first:8.2e} "
          f"steepest slope={cls.steepest_slope:7.3f}{flag}")


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--pvals", type=float, nargs="+", default=[1.5, 2.0, 3.0, 4.0])
    args = ap.parse_args()
    for n in (2, 3, 4):
        for p in args.pvals:
            row(euclidean_radial(n), f"euclidean(N={n})", p)
    for p in args.pvals[:3]:
        row(hyperbolic_radial(2), "hyperbolic(N=2)", p)


if __name__ == "__main__":
    main()
