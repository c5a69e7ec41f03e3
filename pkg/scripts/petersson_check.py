"""Tabulate both sides of the trace formula for a range of weights.

    python3 scripts/petersson_check.py --weights 12:40:4 --max-index 4
"""

import argparse

from sym2moments.cli import parse_weights
from sym2moments.moments import weight_data
from sym2moments.petersson import delta_geometric, delta_spectral


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--weights", default="12:40:4")
    ap.add_argument("--max-index", type=int, default=4)
    ap.add_argument("--c-max", type=int, default=10**5)
    args = ap.parse_args()
    print("kappa,m,n,geometric,tail_bound,c_used,spectral,abs_diff")
    for k in parse_weights(args.weights):
        d = weight_data(k)
        for m in range(1, args.max_index + 1):
            for n in range(m, args.max_index + 1):
                g = delta_geometric(k, m, n, args.c_max)
                s = delta_spectral(k, m, n, d.forms, d.omegas)
                print(f"{k},{m},{n},{g.value!r},{g.tail_bound:.3e},{g.c_used},{s!r},{abs(g.value - s):.3e}")


if __name__ == "__main__":
    main()
