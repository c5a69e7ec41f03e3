"""Verification suites: each check records a pass flag, a margin and a count."""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable, Sequence

import flint

from .arith import fourth_power_expand, prime_range, square_expand
from .cache import default_store
from .errors import DomainError
from .hecke import cusp_dim, hecke_residual
from .mollifier import build_params, evaluate_polynomial, expand_polynomial, n_total, to_lambda_basis
from .moments import holder_exponents, holder_verify, weight_data
from .petersson import delta_geometric, delta_spectral
from .symsq import LAMBDA0, completed_lambda, grh_bound_report, lvalue, lvalue_series

HECKE_WEIGHTS = (12, 16, 18, 20, 22, 24, 26, 28)
PETERSSON_WEIGHTS = (12, 16, 20, 24, 28, 32, 36, 40)
DELTA_REGIME_WEIGHTS = (120, 200)
AFE_WEIGHTS = tuple(k for k in range(12, 61, 2) if cusp_dim(k))
MOLLIFIER_KS = (0.0, 0.25, 0.4, 1.0, 1.5)
GRH_FLOOR = -5.0
GRH_XS = (1e3, 1e4, 1e5)
SERIES_PRIMES = 10**5


@dataclass
class Check:
    suite: str
    name: str
    passed: bool
    margin: float
    count: int = 1
    detail: str = ""


@dataclass
class SuiteResult:
    suite: str
    checks: list[Check] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, name: str, passed: bool, margin: float, count: int = 1, detail: str = "") -> None:
        self.checks.append(Check(self.suite, name, bool(passed), float(margin), count, detail))

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "passed": self.passed,
            "seconds": round(self.seconds, 3),
            "checks": [asdict(c) for c in self.checks],
        }


def _in_range(weights: Iterable[int], lo: int | None, hi: int | None) -> list[int]:
    return [k for k in weights if (lo is None or k >= lo) and (hi is None or k <= hi)]


def suite_hecke(lo=None, hi=None) -> SuiteResult:
    res = SuiteResult("hecke")
    store = default_store()
    worst_rel, worst_del, npairs = 0.0, 0.0, 0
    for k in _in_range(HECKE_WEIGHTS, lo, hi):
        forms = store.get(k, 2500)
        res.add(f"count k={k}", len(forms) == cusp_dim(k), 0.0)
        for f in forms:
            for m in range(1, 2501):
                for n in range(m, 2500 // m + 1):
                    worst_rel = max(worst_rel, hecke_residual(f, m, n))
                    npairs += 1
            for p in prime_range(1, 1000):
                worst_del = max(worst_del, abs(f.lam(p)) - 2)
    res.add("hecke relation mn<=2500", worst_rel < 1e-9, 1e-9 - worst_rel, npairs, f"max residual {worst_rel:.3e}")
    res.add("deligne |lambda(p)|<=2, p<=1000", worst_del <= 1e-9, 1e-9 - worst_del, detail=f"max excess {worst_del:.3e}")
    if lo is None or lo <= 12 <= (hi or 12):
        f = store.get(12, 2500)[0]
        spots = [(f.lam(2) * 2**5.5, -24), (f.lam(3) * 3**5.5, 252), (f.lam(4) * 2**11, -1472)]
        err = max(abs(a - b) for a, b in spots)
        res.add("tau spot values", err < 1e-9, 1e-9 - err, 3, f"max |err| {err:.2e}")
    return res


def suite_petersson(lo=None, hi=None, c_max: int = 10**5) -> SuiteResult:
    res = SuiteResult("petersson")
    for k in _in_range(PETERSSON_WEIGHTS, lo, hi):
        d = weight_data(k)
        worst = math.inf
        for m in range(1, 5):
            for n in range(m, 5):
                g = delta_geometric(k, m, n, c_max)
                s = delta_spectral(k, m, n, d.forms, d.omegas)
                worst = min(worst, g.tail_bound + 1e-6 - abs(g.value - s))
        res.add(f"trace formula k={k}", worst >= 0, worst, 10)
    for k in _in_range(DELTA_REGIME_WEIGHTS, lo, hi):
        worst = math.inf
        cnt = 0
        for m in range(1, 5):
            for n in range(1, 5):
                if m * n <= k * k / 1e4:
                    g = delta_geometric(k, m, n, c_max)
                    worst = min(worst, 1e-8 - abs(g.value - (m == n)))
                    cnt += 1
        res.add(f"near-diagonal regime k={k}", worst > 0, worst, cnt)
    return res


def euler_recursion_symbolic(j_max: int = 6) -> bool:
    """Check ``b(p^j)`` from the local recursion against ``sum_i lambda(p^{2j-4i})``.

    Both sides are integer polynomials in ``x = lambda(p)``, with
    ``lambda(p^e) = U_e(x/2)`` (the Hecke recursion).
    """
    x = flint.fmpz_poly([0, 1])
    lam = [flint.fmpz_poly([1]), x]
    for _ in range(2 * j_max + 2):
        lam.append(x * lam[-1] - lam[-2])
    A = lam[2]
    b = [flint.fmpz_poly([1])]
    for j in range(1, j_max + 1):
        v = A * b[j - 1]
        if j >= 2:
            v -= A * b[j - 2]
        if j >= 3:
            v += b[j - 3]
        b.append(v)
    for j in range(j_max + 1):
        direct = flint.fmpz_poly(0)
        for i in range(j // 2 + 1):
            direct += lam[2 * (j - 2 * i)]
        if direct != b[j]:
            return False
    return True


def suite_afe(lo=None, hi=None) -> SuiteResult:
    res = SuiteResult("afe")
    store = default_store()
    worst_series = worst_fe = worst_real = 0.0
    cnt = 0
    for k in _in_range(AFE_WEIGHTS, lo, hi):
        for f in store.get(k, SERIES_PRIMES):
            cnt += 1
            a = lvalue(f, 2.0).value.real
            worst_series = max(worst_series, abs(a - lvalue_series(f, 2.0, SERIES_PRIMES).real))
            for sig in (0.3, 0.5):
                x, y = completed_lambda(f, sig), completed_lambda(f, 1 - sig)
                worst_fe = max(worst_fe, float(abs(x.value - y.value) / abs(x.value)))
            for t in (0.3, 1.0):
                z = completed_lambda(f, complex(0.5, t))
                w = completed_lambda(f, complex(0.5, -t))
                rel_im = float(abs(z.value.imag) / abs(z.value))
                rel_conj = float(abs(z.value - w.value.conjugate()) / abs(z.value))
                worst_real = max(worst_real, rel_im, rel_conj)
    res.add("AFE vs Euler product at s=2", worst_series < 1e-8, 1e-8 - worst_series, cnt, f"max {worst_series:.2e}")
    res.add("functional equation 0.3/0.7, 0.5", worst_fe < 1e-6, 1e-6 - worst_fe, cnt, f"max rel {worst_fe:.2e}")
    res.add("critical-line reality", worst_real < 1e-6, 1e-6 - worst_real, cnt, f"max rel {worst_real:.2e}")
    res.add("local recursion j<=6 (symbolic)", euler_recursion_symbolic(6), 0.0, 7)
    return res


def suite_mollifier(lo=None, hi=None) -> SuiteResult:
    res = SuiteResult("mollifier")
    worst_prod, worst_fid = math.inf, 0.0
    sq_ok = fp_ok = True
    n_idx = 0
    seen = set()
    for kap in _in_range(HECKE_WEIGHTS, lo, hi):
        d = weight_data(kap)
        for k in MOLLIFIER_KS:
            p = build_params(k, kap, desk_scale=True)
            for a in {2 * k - 1, 2 * k - 2}:
                for f in d.forms:
                    worst_prod = min(worst_prod, n_total(f, p, a) * n_total(f, p, -a) - (1 - 1e-12))
                poly = expand_polynomial(p, a)
                lb = to_lambda_basis(poly)
                for f in d.forms:
                    direct = n_total(f, p, a)
                    worst_fid = max(
                        worst_fid,
                        abs(evaluate_polynomial(poly, f) - direct),
                        abs(lb.evaluate(f) - direct),
                    )
                for n, fa in poly.factors.items():
                    if n in seen:
                        continue
                    seen.add(n)
                    n_idx += 1
                    om = sum(e for _, e in fa)
                    se = square_expand(fa)
                    sq_ok &= all(c >= 0 for c in se.terms.values()) and sum(se.terms.values()) <= 3**om
                    fe = fourth_power_expand(fa)
                    fp_ok &= fe.coefficient_sum() <= 8**om
    res.add("N(a)N(-a) >= 1 - 1e-12", worst_prod >= 0, worst_prod)
    res.add("expansion fidelity", worst_fid < 1e-9, 1e-9 - worst_fid, detail=f"max {worst_fid:.2e}")
    res.add("sum c_n(t) <= 3^Omega", sq_ok, 0.0, n_idx)
    res.add("sum |d_n(t)| <= 8^Omega", fp_ok, 0.0, n_idx)
    return res


def suite_holder(lo=None, hi=None, out: Callable[[str], None] | None = None) -> SuiteResult:
    res = SuiteResult("holder")
    for k in (0.0, 0.25, 0.4, 1.0, 1.5):
        e = holder_exponents(k)
        s = math.fsum(1 / x for x in e)
        res.add(f"exponent reciprocals k={k}", abs(s - 1) < 1e-12, 1e-12 - abs(s - 1))
    for kap in _in_range(HECKE_WEIGHTS, lo, hi):
        for k in (0.0, 0.25, 0.4, 1.0, 1.5):
            for h in holder_verify(kap, k):
                if out:
                    out(f"k={kap} moment={k} {h.label}: lhs={h.lhs!r} rhs={h.rhs!r} margin={h.margin:.3e}")
                res.add(f"{h.label} kappa={kap} k={k}", h.passed, h.margin)
    return res


def suite_grh(lo=None, hi=None) -> SuiteResult:
    res = SuiteResult("grh-bound")
    store = default_store()
    worst = math.inf
    cnt = ind = 0
    for k in _in_range(AFE_WEIGHTS, lo, hi):
        d = weight_data(k)
        for f0, central in zip(d.forms, d.central):
            f = store.get(k, int(max(GRH_XS)))[f0.index]
            for x in GRH_XS:
                r = grh_bound_report(f, x, "coarse", central)
                if r.indeterminate:
                    ind += 1
                    continue
                worst = min(worst, r.margin)
                cnt += 1
    res.add("lambda0 root", abs(math.exp(-LAMBDA0) - LAMBDA0 - LAMBDA0**2 / 2) < 1e-12, 0.0)
    res.add(f"GRH margins > {GRH_FLOOR}", worst > GRH_FLOOR, worst - GRH_FLOOR, cnt, f"min margin {worst:.4f}; indeterminate {ind}")
    return res


SUITES = {
    "hecke": suite_hecke,
    "petersson": suite_petersson,
    "afe": suite_afe,
    "mollifier": suite_mollifier,
    "holder": suite_holder,
    "grh-bound": suite_grh,
}


def run_suites(names: Sequence[str], lo=None, hi=None, out=None) -> list[SuiteResult]:
    results = []
    for name in names:
        if name not in SUITES:
            raise DomainError(f"unknown suite {name!r}")
        t0 = time.perf_counter()
        fn = SUITES[name]
        r = fn(lo, hi, out=out) if name == "holder" else fn(lo, hi)
        r.seconds = time.perf_counter() - t0
        results.append(r)
    return results
