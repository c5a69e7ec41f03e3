"""GRH log-bound margins for every form up to a weight, both variants.

    python3 scripts/grh_margins.py --max-weight 60
"""

import argparse

from sym2moments.cache import default_store
from sym2moments.moments import weight_data
from sym2moments.symsq import grh_bound_report

XS = (1e3, 1e4, 1e5)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-weight", type=int, default=60)
    args = ap.parse_args()
    print("kappa,form,x,variant,log_abs_L,rhs,margin,indeterminate")
    worst = float("inf")
    for k in range(12, args.max_weight + 1, 2):
        d = weight_data(k)
        for f0, central in zip(d.forms, d.central):
            f = default_store().get(k, int(max(XS)))[f0.index]
            for x in XS:
                for variant in ("coarse", "simplified"):
                    r = grh_bound_report(f, x, variant, central)
                    if not r.indeterminate:
                        worst = min(worst, r.margin)
                    print(f"{k},{f.index},{x:g},{variant},{r.lhs!r},{r.rhs_explicit!r},{r.margin!r},{int(r.indeterminate)}")
    print(f"# minimum margin {worst:.6f}")


if __name__ == "__main__":
    main()
