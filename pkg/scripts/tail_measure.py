"""Harmonic tail measure of normalized log central values on a V grid.

    python3 scripts/tail_measure.py --weights 40:80:10
"""

import argparse

import numpy as np

from sym2moments.cli import parse_weights
from sym2moments.moments import tail_measure, weight_data


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--weights", default="40:80:10")
    ap.add_argument("--grid", type=float, nargs=3, default=[-4.0, 2.0, 0.5], metavar=("LO", "HI", "STEP"))
    args = ap.parse_args()
    lo, hi, step = args.grid
    grid = np.arange(lo, hi + step / 2, step)
    print("kappa,V,measure,excluded")
    for k in parse_weights(args.weights):
        d = weight_data(k)
        for V in grid:
            t = tail_measure(k, float(V), d)
            print(f"{k},{V:g},{t.measure!r},{t.excluded}")


if __name__ == "__main__":
    main()
