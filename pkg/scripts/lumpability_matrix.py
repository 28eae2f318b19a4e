#!/usr/bin/env python3
"""Print which marginals of each coupled kernel are Markov, per graph and p.

Usage: python3 scripts/lumpability_matrix.py [--csv out.csv]
"""

import argparse
import csv
import sys
from fractions import Fraction

from isingfk.analysis import check_lumpability
from isingfk.graph import bundled_family
from isingfk.kernels import COUPLED_KERNELS, make_kernel
from isingfk.measures import CouplingParams

PS = (Fraction(1, 3), Fraction(1, 2), Fraction(2, 3))


def rows():
    for gname, g in bundled_family().items():
        for p in PS:
            params = CouplingParams(p)
            for name in COUPLED_KERNELS:
                kern = make_kernel(name, params, g)
                spin = check_lumpability(kern, "spin", "compatible").lumpable
                edge = check_lumpability(kern, "edge", "compatible").lumpable
                yield gname, f"{p.numerator}/{p.denominator}", name, spin, edge


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--csv")
    args = ap.parse_args()
    out = open(args.csv, "w", newline="") if args.csv else sys.stdout
    w = csv.writer(out)
    w.writerow(["graph", "p", "kernel", "spin_lumpable", "edge_lumpable"])
    w.writerows(rows())
    if args.csv:
        out.close()


if __name__ == "__main__":
    main()
