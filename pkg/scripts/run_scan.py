"""Moment scan across weights: CSV, fitted slope and an SVG chart.

    python3 scripts/run_scan.py --weights 12:300:8 --k 0.5 --out scan.csv --plot scan.svg
"""

import argparse
import math
import sys
from pathlib import Path

from sym2moments.cli import parse_weights
from sym2moments.moments import scaling_scan
from sym2moments.svgplot import line_chart


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--weights", default="12:120:4")
    ap.add_argument("--k", type=float, nargs="+", default=[0.25, 0.5, 1.0])
    ap.add_argument("--out", default="scan.csv")
    ap.add_argument("--plot", default=None)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    weights = parse_weights(args.weights)
    series = []
    out = Path(args.out)
    for k in args.k:
        path = out.with_name(f"{out.stem}_k{k:g}{out.suffix}") if len(args.k) > 1 else out
        with open(path, "w", newline="") as fh:
            res = scaling_scan(weights, k, out=fh, workers=args.workers, progress=lambda w: print(f"  weight {w}", file=sys.stderr))
        print(f"k={k:g}: {len(res.rows)} rows -> {path}; slope {res.slope:.4f}, target k(2k+1) = {res.target_slope:g}")
        pts = [(math.log(math.log(r.kappa)), math.log(r.harmonic_moment)) for r in res.rows if r.harmonic_moment > 0]
        if pts:
            xs, ys = zip(*pts)
            series.append((f"k={k:g}", xs, ys))
    if args.plot and series:
        Path(args.plot).write_text(line_chart(series, "harmonic moments", "log log kappa", "log moment"))
        print(f"plot -> {args.plot}")


if __name__ == "__main__":
    main()
