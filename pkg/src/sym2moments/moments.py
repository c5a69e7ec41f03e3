"""Harmonic, twisted and mollified moments of central symmetric-square values.

Every harmonic sum runs over the forms of one weight in their fixed order
(sorted by ``lambda(2)``) and is accumulated with ``math.fsum``, so results
do not depend on how per-form work was scheduled.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence, TextIO

import numpy as np

from .cache import EigenStore, default_store
from .errors import DomainError
from .hecke import Eigenform, cusp_dim
from .mollifier import (
    DEFAULT_SUPPORT_CAP,
    MollifierParams,
    build_params,
    expand_polynomial,
    n_total,
    nj,
    pj,
    qj,
    to_lambda_basis,
)
from .petersson import harmonic_weight
from .symsq import LValueResult, lvalue, required_coverage

log = logging.getLogger(__name__)

R_FALLBACK = 4
TWIST_LS = (1, 2, 3, 5)


@dataclass(frozen=True)
class WeightData:
    """Eigenforms of one weight with their central values and harmonic weights."""

    kappa: int
    forms: tuple[Eigenform, ...]
    central: tuple[LValueResult, ...]
    at_one: tuple[LValueResult, ...]
    omegas: tuple[float, ...]

    @property
    def dim(self) -> int:
        return len(self.forms)

    @property
    def L(self) -> list[float]:
        return [r.value.real for r in self.central]

    @property
    def indeterminate(self) -> list[bool]:
        return [abs(r.value.real) <= r.abs_error for r in self.central]

    def hsum(self, values: Iterable[float]) -> float:
        """``sum_f values[f] / omega_f``."""
        return math.fsum(v / w for v, w in zip(values, self.omegas))


_DATA: dict[tuple[int, int], WeightData] = {}


def weight_data(kappa: int, store: EigenStore | None = None, precision: int = 128, coverage: int = 0) -> WeightData:
    """Build (or reuse) the per-weight data needed by every moment."""
    if kappa % 2:
        raise DomainError(f"odd weight {kappa}")
    key = (kappa, precision)
    hit = _DATA.get(key)
    if hit is not None and (not hit.forms or hit.forms[0].N >= coverage):
        return hit
    if cusp_dim(kappa) == 0:
        data = WeightData(kappa, (), (), (), ())
        _DATA[key] = data
        return data
    store = store or default_store()
    need = max(required_coverage(kappa, 0.5), required_coverage(kappa, 1.0), 64, coverage)
    forms = tuple(store.get(kappa, need, precision))
    central = tuple(lvalue(f, 0.5) for f in forms)
    at_one = tuple(lvalue(f, 1.0) for f in forms)
    omegas = tuple(harmonic_weight(f, r) for f, r in zip(forms, at_one))
    data = WeightData(kappa, forms, central, at_one, omegas)
    _DATA[key] = data
    return data


def _data(kappa: int, data: WeightData | None) -> WeightData:
    return data if data is not None else weight_data(kappa)


def _params(k: float, kappa: int, params: MollifierParams | None, M: int = 1, A: float = 1.0) -> MollifierParams:
    if params is not None:
        return params
    p = build_params(k, kappa, M=M, A=A, desk_scale=True)
    if p.r_k is None:
        p = build_params(k, kappa, M=M, A=A, desk_scale=True, r_override=R_FALLBACK)
    return p


# -- plain and twisted moments --------------------------------------------------


def harmonic_moment(kappa: int, k: float, data: WeightData | None = None) -> float:
    """``sum^h |L(1/2)|^{2k}``; indeterminate values enter with their error bound."""
    if k < 0:
        raise DomainError("k must be non-negative")
    d = _data(kappa, data)
    mags = []
    for r, ind in zip(d.central, d.indeterminate):
        mag = r.abs_error if ind else abs(r.value.real)
        mags.append(mag ** (2 * k))
    return d.hsum(mags)


def harmonic_moment_error(kappa: int, k: float, data: WeightData | None = None) -> float:
    """First-order error of :func:`harmonic_moment` from L-value errors."""
    d = _data(kappa, data)
    terms = []
    for r1, r0, w in zip(d.at_one, d.central, d.omegas):
        mag = max(abs(r0.value.real), r0.abs_error)
        dL = 2 * k * mag ** max(2 * k - 1, 0) * r0.abs_error if k else 0.0
        dw = mag ** (2 * k) * r1.abs_error / abs(r1.value.real)
        terms.append((dL + dw) / w)
    return math.fsum(terms) + 1e-15 * harmonic_moment(kappa, k, d)


def indeterminate_count(kappa: int, data: WeightData | None = None) -> int:
    return int(sum(_data(kappa, data).indeterminate))


def twist_sums(d: WeightData, ts: Sequence[int]) -> dict[int, float]:
    """``sum^h L(1/2) lambda(t^2)`` for each ``t``."""
    L = d.L
    return {t: d.hsum(l * f.lam(t * t) for l, f in zip(L, d.forms)) for t in ts}


def twisted_first_moment(kappa: int, l: int, data: WeightData | None = None) -> tuple[float, float]:
    """``(value, residual)`` with ``residual = sqrt(l) value + log l - log kappa``."""
    if l < 1:
        raise DomainError("twist must be a positive integer")
    d = _data(kappa, data)
    if d.dim == 0:
        return 0.0, 0.0
    value = d.hsum(L * f.lam(l * l) for L, f in zip(d.L, d.forms))
    return value, math.sqrt(l) * value + math.log(l) - math.log(kappa)


def twist_envelope(kappa: int, l: int) -> float:
    """Reporting envelope ``l / sqrt(kappa) + 1/kappa`` for the residual error."""
    return l / math.sqrt(kappa) + 1 / kappa


# -- mollified moments -----------------------------------------------------------


def mollified_first_moment(
    kappa: int,
    k: float,
    mode: str = "direct",
    data: WeightData | None = None,
    params: MollifierParams | None = None,
    support_cap: int = DEFAULT_SUPPORT_CAP,
) -> float:
    """``sum^h L(1/2) N(f, 2k-1)`` by direct products or by the coefficient expansion."""
    d = _data(kappa, data)
    if d.dim == 0:
        return 0.0
    p = _params(k, kappa, params)
    alpha = 2 * k - 1
    if mode == "direct":
        return d.hsum(L * n_total(f, p, alpha) for L, f in zip(d.L, d.forms))
    if mode == "expansion":
        lb = to_lambda_basis(expand_polynomial(p, alpha, support_cap))
        inner = []
        for t, c in lb.coeffs.items():
            sq = tuple((q, 2 * a) for q, a in lb.factors[t])
            inner.append(c * d.hsum(L * f.lam_fact(sq) for L, f in zip(d.L, d.forms)))
        return math.fsum(inner)
    raise DomainError(f"mode must be 'direct' or 'expansion', got {mode!r}")


def prop5_quantity(kappa: int, k: float, data: WeightData | None = None, params: MollifierParams | None = None) -> float:
    """``sum^h prod_j (N_j(f, 2k) + Q_j(f, 2k))``."""
    d = _data(kappa, data)
    p = _params(k, kappa, params)
    vals = []
    for f in d.forms:
        v = 1.0
        for j in range(1, p.J + 1):
            P = pj(f, p, j)
            v *= nj(f, p, j, 2 * k, P) + qj(f, p, j, P)
        vals.append(v)
    return d.hsum(vals)


def prop6_quantity(kappa: int, k: float, data: WeightData | None = None, params: MollifierParams | None = None) -> float:
    """``sum^h |L(1/2)|^2 N(f, 2k-2)``."""
    d = _data(kappa, data)
    p = _params(k, kappa, params)
    return d.hsum(L * L * n_total(f, p, 2 * k - 2) for L, f in zip(d.L, d.forms))


# -- Hoelder chains -------------------------------------------------------------


@dataclass(frozen=True)
class HolderCheck:
    label: str
    lhs: float
    rhs: float

    @property
    def passed(self) -> bool:
        return self.lhs <= self.rhs * (1 + 1e-10)

    @property
    def margin(self) -> float:
        """Relative slack ``(rhs - lhs)/|rhs|``."""
        return (self.rhs - self.lhs) / abs(self.rhs) if self.rhs else -math.inf * (self.lhs > 0)


def holder_exponents(k: float) -> tuple[float, ...]:
    """Hoelder exponents of the chain used at moment exponent ``k``."""
    if k == 0:
        return (4.0, 2.0, 4.0)
    if 0 < k < 0.5:
        c = k / (2 - 3 * k)
        return (2 * k / c, 2 / (1 - c), 1 / ((1 + c) / 2 - c / (2 * k)))
    if k > 0.5:
        return (2 * k, 2 * k / (2 * k - 1))
    raise DomainError("no Hoelder chain at 2k = 1")


def holder_verify(
    kappa: int, k: float, data: WeightData | None = None, params: MollifierParams | None = None
) -> list[HolderCheck]:
    """Evaluate both sides of the exact Hoelder chains and the reciprocal bound."""
    if k < 0 or 2 * k == 1:
        raise DomainError(f"Hoelder chains need k >= 0 and 2k != 1, got {k}")
    d = _data(kappa, data)
    p = _params(k, kappa, params)
    L = d.L
    absL = [abs(x) for x in L]
    N = lambda a: [n_total(f, p, a) for f in d.forms]  # noqa: E731
    n1 = N(2 * k - 1)
    lhs = d.hsum(l * n for l, n in zip(L, n1))
    checks = []
    if k == 0:
        nz = [1.0 if x != 0 else 0.0 for x in L]
        nm2, n2 = N(-2.0), N(2.0)
        rhs = (
            d.hsum(nz) ** 0.25
            * d.hsum(a * a * b for a, b in zip(absL, nm2)) ** 0.5
            * d.hsum(a**4 * b**2 for a, b in zip(n1, n2)) ** 0.25
        )
        checks.append(HolderCheck("nonvanishing-4-2-4", lhs, rhs))
    elif k < 0.5:
        e = (1 - 2 * k) / (2 - 3 * k)
        nm, npos = N(2 * k - 2), N(2 - 2 * k)
        q = 2 * (2 - 3 * k) / (1 - 2 * k)
        rhs = (
            d.hsum(a ** (2 * k) for a in absL) ** (1 / (2 * (2 - 3 * k)))
            * d.hsum(a * a * b for a, b in zip(absL, nm)) ** e
            * d.hsum(a**q * b**2 for a, b in zip(n1, npos)) ** (1 / q)
        )
        checks.append(HolderCheck("three-factor-lower", lhs, rhs))
    else:
        q = 2 * k / (2 * k - 1)
        rhs = d.hsum(a ** (2 * k) for a in absL) ** (1 / (2 * k)) * d.hsum(a**q for a in n1) ** (1 / q)
        checks.append(HolderCheck("two-factor-upper", lhs, rhs))
    alphas = sorted({2 * k - 1, 2 * k - 2, 2 - 2 * k})
    prods = [n_total(f, p, a) * n_total(f, p, -a) for f in d.forms for a in alphas]
    if prods:
        checks.append(HolderCheck("reciprocal-product", 1 - 1e-12, min(prods)))
    return checks


# -- tail measure ---------------------------------------------------------------


@dataclass(frozen=True)
class TailMeasure:
    V: float
    measure: float
    excluded: int


def tail_measure(kappa: int, V: float, data: WeightData | None = None) -> TailMeasure:
    """Harmonic measure of forms with ``log(|L(1/2)| / sqrt(log kappa)) >= V``."""
    d = _data(kappa, data)
    norm = 0.5 * math.log(math.log(kappa))
    hits, excluded = [], 0
    for r, ind in zip(d.central, d.indeterminate):
        if ind:
            excluded += 1
            hits.append(0.0)
            continue
        hits.append(1.0 if math.log(abs(r.value.real)) - norm >= V else 0.0)
    return TailMeasure(V, d.hsum(hits), excluded)


# -- reports and scans -------------------------------------------------------------


@dataclass
class MomentReport:
    kappa: int
    k: float
    dim: int
    harmonic_moment: float
    harmonic_moment_error: float
    mollified_first: float
    prop5_value: float
    prop6_value: float
    holder_margins: list[tuple[str, float, float]]
    residuals: dict[int, float]
    flags: int
    notes: list[str] = field(default_factory=list)

    @property
    def holder_min_margin(self) -> float:
        ms = [HolderCheck(*h).margin for h in self.holder_margins]
        return min(ms) if ms else math.nan

    def to_dict(self) -> dict:
        return {
            "kappa": self.kappa,
            "k": self.k,
            "dim": self.dim,
            "harmonic_moment": self.harmonic_moment,
            "harmonic_moment_error": self.harmonic_moment_error,
            "mollified_first": self.mollified_first,
            "prop5": self.prop5_value,
            "prop6": self.prop6_value,
            "holder": [{"label": a, "lhs": b, "rhs": c} for a, b, c in self.holder_margins],
            "holder_min_margin": self.holder_min_margin,
            "twisted_residuals": {str(l): v for l, v in self.residuals.items()},
            "flags": self.flags,
            "notes": list(self.notes),
        }


def moment_report(kappa: int, k: float, M: int = 1, A: float = 1.0) -> MomentReport:
    if k < 0:
        raise DomainError("k must be non-negative")
    d = weight_data(kappa)
    notes = []
    if d.dim == 0:
        return MomentReport(kappa, k, 0, 0.0, 0.0, 0.0, 0.0, 0.0, [], {}, 0, ["empty cusp space"])
    p = build_params(k, kappa, M=M, A=A, desk_scale=True)
    if p.r_k is None:
        notes.append(f"r_k undefined at k={k}; Q-factors use r_k={R_FALLBACK}")
        p = build_params(k, kappa, M=M, A=A, desk_scale=True, r_override=R_FALLBACK)
    if p.desk_scale:
        notes.append("desk-scale parameters (single window)")
    holder = [] if 2 * k == 1 else [(h.label, h.lhs, h.rhs) for h in holder_verify(kappa, k, d, p)]
    residuals = {l: twisted_first_moment(kappa, l, d)[1] for l in TWIST_LS}
    return MomentReport(
        kappa=kappa,
        k=k,
        dim=d.dim,
        harmonic_moment=harmonic_moment(kappa, k, d),
        harmonic_moment_error=harmonic_moment_error(kappa, k, d),
        mollified_first=mollified_first_moment(kappa, k, "direct", d, p),
        prop5_value=prop5_quantity(kappa, k, d, p),
        prop6_value=prop6_quantity(kappa, k, d, p),
        holder_margins=holder,
        residuals=residuals,
        flags=indeterminate_count(kappa, d),
        notes=notes,
    )


CSV_COLUMNS = ("kappa", "dim", "k", "moment", "mollified_first", "prop5", "prop6", "holder_min_margin", "flags")


@dataclass
class ScanResult:
    rows: list[MomentReport]
    slope: float
    intercept: float
    target_slope: float
    notices: list[str]
    slope_stderr: float = math.nan


def _fmt(x) -> str:
    return repr(float(x)) if isinstance(x, float) else str(x)


def write_csv(rows: Sequence[MomentReport], out: TextIO) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow(
            [
                r.kappa,
                r.dim,
                _fmt(float(r.k)),
                _fmt(r.harmonic_moment),
                _fmt(r.mollified_first),
                _fmt(r.prop5_value),
                _fmt(r.prop6_value),
                _fmt(r.holder_min_margin),
                r.flags,
            ]
        )


def _report_job(args) -> MomentReport:
    kappa, k, M, A = args
    return moment_report(kappa, k, M, A)


def fit_slope(rows: Sequence[MomentReport]) -> tuple[float, float, float]:
    """Least-squares ``(slope, intercept, slope standard error)`` of
    ``log(moment)`` against ``log log kappa``."""
    pts = [(math.log(math.log(r.kappa)), math.log(r.harmonic_moment)) for r in rows if r.harmonic_moment > 0]
    if len(pts) < 2:
        return math.nan, math.nan, math.nan
    x, y = np.array(pts).T
    (slope, intercept), res, *_ = np.polyfit(x, y, 1, full=True)
    if len(pts) > 2:
        resid = float(res[0]) if len(res) else 0.0
        stderr = math.sqrt(resid / (len(pts) - 2) / float(np.sum((x - x.mean()) ** 2)))
    else:
        stderr = math.nan
    return float(slope), float(intercept), stderr


def scaling_scan(
    weights: Sequence[int],
    k: float,
    out: TextIO | None = None,
    workers: int = 1,
    M: int = 1,
    A: float = 1.0,
    progress: Callable[[int], None] | None = None,
) -> ScanResult:
    """Moment reports across weights with the fitted growth exponent.

    Weights with an empty cusp space are skipped with a notice.
    """
    if k < 0:
        raise DomainError("k must be non-negative")
    notices = []
    todo = []
    for kappa in weights:
        if kappa % 2 or kappa < 12:
            raise DomainError(f"scan weights must be even and >= 12, got {kappa}")
        if cusp_dim(kappa) == 0:
            notices.append(f"weight {kappa}: empty cusp space, skipped")
            continue
        todo.append(kappa)
    jobs = [(kappa, k, M, A) for kappa in todo]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            rows = list(ex.map(_report_job, jobs))
    else:
        rows = []
        for job in jobs:
            rows.append(_report_job(job))
            if progress:
                progress(job[0])
    slope, intercept, stderr = fit_slope(rows)
    if out is not None:
        write_csv(rows, out)
    for n in notices:
        log.info(n)
    return ScanResult(rows, slope, intercept, k * (2 * k + 1), notices, stderr)


def scan_csv_text(result: ScanResult) -> str:
    buf = io.StringIO()
    write_csv(result.rows, buf)
    return buf.getvalue()
