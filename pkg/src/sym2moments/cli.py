"""Command-line interface.

Exit codes: 0 success, 1 verification failure, 2 usage or domain error,
3 numeric or precision failure.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

from . import __version__
from .cache import EigenStore, set_default_store
from .config import RunConfig, load_config
from .errors import BudgetError, CoverageError, DomainError, LengthError, PrecisionError
from .hecke import cusp_dim
from .moments import moment_report, scaling_scan, weight_data
from .petersson import delta_geometric, delta_spectral
from .svgplot import line_chart
from .symsq import lvalue
from .verify import SUITES, run_suites

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3
_EPS = 2.220446049250313e-16


def default_cache_dir() -> Path:
    base = os.environ.get("XDG_CACHE_HOME") or os.path.join(os.path.expanduser("~"), ".cache")
    return Path(base) / "sym2moments"


def parse_weights(text: str, need_step: bool = False) -> list[int]:
    """``a``, ``a:b`` (even weights) or ``a:b:step``."""
    parts = text.split(":")
    try:
        nums = [int(p) for p in parts]
    except ValueError:
        raise DomainError(f"bad weight range {text!r}") from None
    if len(nums) == 1:
        lo = hi = nums[0]
        step = 2
    elif len(nums) == 2:
        lo, hi = nums
        step = 2
    elif len(nums) == 3:
        lo, hi, step = nums
    else:
        raise DomainError(f"bad weight range {text!r}")
    if step <= 0 or lo > hi:
        raise DomainError(f"empty or backwards weight range {text!r}")
    ws = list(range(lo, hi + 1, step))
    if any(w % 2 or w < 12 for w in ws):
        raise DomainError(f"weights must be even and >= 12: {text!r}")
    return ws


def _pm(x: float, err: float) -> str:
    return f"{x!r} ± {err:.2e}"


def cmd_eigen(args, cfg: RunConfig) -> int:
    k = args.weight
    if k % 2:
        raise DomainError(f"odd weight {k}")
    if k < 12 or cusp_dim(k) == 0:
        print(f"weight {k}: dim=0 (exact); cusp space is empty, nothing cached")
        return EXIT_OK
    store = _store(cfg)
    forms = store.get(k, args.terms, cfg.precision_bits)
    print(f"weight {k}: dim={len(forms)} (exact); coverage N={forms[0].N}; precision {cfg.precision_bits} bits")
    if store.path(k):
        print(f"cache: {store.path(k)}")
    for f in forms:
        vals = ", ".join(
            f"lambda({n})={_pm(f.lam(n), 4 * _EPS * max(1.0, abs(f.lam(n))))}" for n in range(2, min(10, f.dense_limit) + 1)
        )
        print(f"form {f.index}: {vals}")
    return EXIT_OK


def cmd_verify(args, cfg: RunConfig) -> int:
    lo = hi = None
    if args.weights:
        ws = parse_weights(args.weights)
        lo, hi = min(ws), max(ws)
    _store(cfg)
    names = list(SUITES) if args.suite == "all" else [args.suite]
    printer = print if args.suite in ("holder", "all") else None
    results = run_suites(names, lo, hi, out=printer)
    for r in results:
        for c in r.checks:
            tag = "PASS" if c.passed else "FAIL"
            print(f"[{tag}] {r.suite}: {c.name} (n={c.count}) margin={c.margin:.3e} {c.detail}".rstrip())
        print(f"suite {r.suite}: {'PASS' if r.passed else 'FAIL'} in {r.seconds:.1f}s")
    summary = {"passed": all(r.passed for r in results), "suites": [r.to_dict() for r in results]}
    if args.json:
        Path(args.json).write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    else:
        print(json.dumps(summary, sort_keys=True))
    return EXIT_OK if summary["passed"] else EXIT_FAIL


def cmd_scan(args, cfg: RunConfig) -> int:
    if args.k < 0:
        raise DomainError("k must be >= 0")
    ws = parse_weights(args.weights)
    _store(cfg)
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        res = scaling_scan(ws, args.k, out=out, workers=cfg.workers, M=cfg.mollifier_M, A=cfg.mollifier_A)
    finally:
        if args.out:
            out.close()
    for n in res.notices:
        print(f"notice: {n}", file=sys.stderr)
    if not res.rows:
        print("notice: no weights with a non-empty cusp space; CSV has a header only", file=sys.stderr)
    slope_txt = "n/a (fewer than two rows)" if math.isnan(res.slope) else f"{res.slope:.6f} ± {res.slope_stderr:.2e} (standard error)"
    print(f"rows: {len(res.rows)} (exact)", file=sys.stderr)
    print(f"fitted slope of log(moment) vs log log kappa: {slope_txt}", file=sys.stderr)
    print(f"conjectural slope k(2k+1) = {res.target_slope!r} (exact)", file=sys.stderr)
    if args.plot:
        xs = [math.log(math.log(r.kappa)) for r in res.rows if r.harmonic_moment > 0]
        ys = [math.log(r.harmonic_moment) for r in res.rows if r.harmonic_moment > 0]
        series = [("log moment", xs, ys)]
        if xs and not math.isnan(res.intercept):
            series.append((f"slope {res.target_slope:g} reference", xs, [res.intercept + res.target_slope * x for x in xs]))
        Path(args.plot).write_text(line_chart(series, f"k = {args.k}", "log log kappa", "log moment"))
    return EXIT_OK


def cmd_delta(args, cfg: RunConfig) -> int:
    k = args.weight
    if k % 2 or k < 12:
        raise DomainError("weight must be even and >= 12")
    _store(cfg)
    g = delta_geometric(k, args.m, args.n, args.c_max)
    print(f"geometric Delta_{{{args.m},{args.n}}}(k={k}) = {_pm(g.value, g.tail_bound)} (c summed to {g.c_used})")
    if not args.no_spectral:
        d = weight_data(k, coverage=max(args.m * args.n, 64))
        s = delta_spectral(k, args.m, args.n, d.forms, d.omegas)
        err = sum(1e-12 * abs(f.lam(args.m) * f.lam(args.n) / w) for f, w in zip(d.forms, d.omegas)) + 1e-15
        print(f"spectral sum^h lambda(m)lambda(n) = {_pm(s, err)}")
    return EXIT_OK


def cmd_lvalue(args, cfg: RunConfig) -> int:
    k = args.weight
    if k % 2 or k < 12:
        raise DomainError("weight must be even and >= 12")
    s = complex(args.s.replace(" ", "")) if isinstance(args.s, str) else complex(args.s)
    if cusp_dim(k) == 0:
        print(f"weight {k}: dim=0 (exact); no L-values")
        return EXIT_OK
    from .symsq import required_coverage

    store = _store(cfg)
    forms = store.get(k, max(required_coverage(k, s), 64), cfg.precision_bits)
    for f in forms:
        r = lvalue(f, s)
        v = r.value.real if s.imag == 0 else r.value
        print(f"form {f.index}: L({s}, sym^2 f) = {v!r} ± {r.abs_error:.2e} (terms {r.terms_used})")
    return EXIT_OK


def cmd_moment(args, cfg: RunConfig) -> int:
    k = args.weight
    if k % 2 or k < 12:
        raise DomainError("weight must be even and >= 12")
    if args.k < 0:
        raise DomainError("k must be >= 0")
    _store(cfg)
    rep = moment_report(k, args.k, cfg.mollifier_M, cfg.mollifier_A)
    if cfg.output_format == "json":
        print(json.dumps(rep.to_dict(), sort_keys=True))
        return EXIT_OK
    print(f"weight {k}, k={args.k}: dim={rep.dim} (exact)")
    print(f"harmonic moment = {_pm(rep.harmonic_moment, rep.harmonic_moment_error)}")
    if rep.dim:
        rel = rep.harmonic_moment_error / max(rep.harmonic_moment, 1e-300)
        print(f"mollified first moment = {_pm(rep.mollified_first, rel * abs(rep.mollified_first) + 1e-15)}")
        print(f"prop5 quantity = {_pm(rep.prop5_value, rel * abs(rep.prop5_value))}")
        print(f"prop6 quantity = {_pm(rep.prop6_value, 3 * rel * abs(rep.prop6_value))}")
        for label, lhs, rhs in rep.holder_margins:
            print(f"holder {label}: lhs={lhs!r} rhs={rhs!r} ± {rel * max(abs(lhs), abs(rhs)):.2e}")
        for l, v in rep.residuals.items():
            print(f"twisted residual l={l}: {_pm(v, rel * 10)}")
        print(f"indeterminate central values: {rep.flags} (exact)")
    for n in rep.notes:
        print(f"note: {n}")
    return EXIT_OK


def _store(cfg: RunConfig) -> EigenStore:
    store = EigenStore(cfg.cache_dir or default_cache_dir())
    set_default_store(store)
    return store


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sym2moments", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    p.add_argument("--config", help="key=value configuration file")
    p.add_argument("--cache-dir", help="eigen data cache directory")
    p.add_argument("--precision", type=int, help="eigen precision in bits (>= 64)")
    p.add_argument("--M", type=int, dest="mollifier_M", help="mollifier parameter M")
    p.add_argument("--A", type=float, dest="mollifier_A", help="mollifier parameter A")
    p.add_argument("--support-cap", type=int, help="maximum mollifier support size")
    p.add_argument("--threads", help="worker count or 'auto'")
    p.add_argument("--format", choices=("csv", "json"), dest="output_format")
    sub = p.add_subparsers(dest="command", required=True)

    e = sub.add_parser("eigen", help="compute and cache eigenforms of one weight")
    e.add_argument("--weight", type=int, required=True)
    e.add_argument("--terms", type=int, default=1000)
    e.set_defaults(func=cmd_eigen)

    v = sub.add_parser("verify", help="run verification suites")
    v.add_argument("--suite", choices=[*SUITES, "all"], default="all")
    v.add_argument("--weights", help="restrict weights to a range a:b")
    v.add_argument("--json", help="write the JSON summary to this file instead of stdout")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("scan", help="moment scan across weights")
    s.add_argument("--weights", required=True, help="a:b:step")
    s.add_argument("--k", type=float, required=True)
    s.add_argument("--out", help="CSV output path (default stdout)")
    s.add_argument("--plot", help="SVG output path")
    s.set_defaults(func=cmd_scan)

    d = sub.add_parser("delta", help="both sides of the trace formula")
    d.add_argument("--weight", type=int, required=True)
    d.add_argument("--m", type=int, default=1)
    d.add_argument("--n", type=int, default=1)
    d.add_argument("--c-max", type=int, default=10**5)
    d.add_argument("--no-spectral", action="store_true")
    d.set_defaults(func=cmd_delta)

    lv = sub.add_parser("lvalue", help="symmetric-square L-values")
    lv.add_argument("--weight", type=int, required=True)
    lv.add_argument("--s", default="0.5", help="real or complex point, e.g. 0.5 or 0.5+1j")
    lv.set_defaults(func=cmd_lvalue)

    m = sub.add_parser("moment", help="moment report for one weight")
    m.add_argument("--weight", type=int, required=True)
    m.add_argument("--k", type=float, required=True)
    m.set_defaults(func=cmd_moment)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config)
        for attr, val in (
            ("cache_dir", args.cache_dir),
            ("precision_bits", args.precision),
            ("mollifier_M", args.mollifier_M),
            ("mollifier_A", args.mollifier_A),
            ("support_cap", args.support_cap),
            ("output_format", args.output_format),
        ):
            if val is not None:
                setattr(cfg, attr, val)
        if args.threads is not None:
            cfg.thread_count = args.threads if args.threads == "auto" else int(args.threads)
        cfg.validate()
        return args.func(args, cfg)
    except (DomainError, CoverageError, BudgetError, LengthError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (PrecisionError, ArithmeticError) as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
