"""Symmetric-square L-functions of level-one eigenforms.

Values inside the critical strip come from a two-term approximate functional
equation.  Writing ``gamma(s)`` for the archimedean factor and
``Lambda = gamma * L``,

    L(s) = sum_n b(n) n^{-s} W_s(n) + sum_n b(n) n^{s-1} W_{1-s}(n),
    W_a(y) = (1/2 pi i) int_{(c_a)} gamma(a+u)/gamma(s) * G(u) y^{-u} du/u,

where ``G`` is an even regulator (``G = 1`` by default; the gamma ratio
already decays exponentially on vertical lines).  The inverse Mellin
integrals are evaluated with the trapezoid rule on the line ``Re u = c_a``.

Error accounting in :class:`LValueResult.abs_error` adds

* the truncation tail, bounded by Rankin's trick with ``|b(n)| <= d_3(n)``:
  ``sum_{n>N} d_3(n) n^{-sigma} |W(n)| <= zeta(1+delta)^3 C(c') N^{1+delta-sigma-c'}``
  where ``|W(y)| <= C(c') y^{-c'}`` and ``C(c')`` is the L1 norm of the
  kernel on the line ``Re u = c'``;
* the quadrature error, estimated by halving the step;
* accumulated rounding.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Literal

import mpmath
import numpy as np
from scipy.special import loggamma

from .arith import prime_table
from .errors import CoverageError, DomainError
from .hecke import Eigenform

AFE_TOL = 1e-13
_RANKIN_DELTA = 0.5
_ZETA_CUBE = float(mpmath.zeta(1 + _RANKIN_DELTA)) ** 3
_STEP_FACTOR = 48.0


def _solve_lambda0() -> float:
    lo, hi = 0.0, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if math.exp(-mid) - mid - mid * mid / 2 > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


LAMBDA0 = _solve_lambda0()
"""Positive root of ``exp(-x) = x + x**2/2``."""


def log_gamma_factor(s, k: int):
    """``log gamma(s)`` for ``gamma(s) = pi^{-3s/2} G((s+1)/2) G((s+k-1)/2) G((s+k)/2)``.

    Works elementwise on numpy arrays of complex ``s``.
    """
    s = np.asarray(s, dtype=complex)
    return (
        -1.5 * s * math.log(math.pi)
        + loggamma((s + 1) / 2)
        + loggamma((s + k - 1) / 2)
        + loggamma((s + k) / 2)
    )


def mp_log_gamma_factor(s, k: int):
    s = mpmath.mpc(s)
    return (
        -1.5 * s * mpmath.log(mpmath.pi)
        + mpmath.loggamma((s + 1) / 2)
        + mpmath.loggamma((s + k - 1) / 2)
        + mpmath.loggamma((s + k) / 2)
    )


def analytic_conductor_sqrt(k: int, t: float = 0.0) -> float:
    """Square root of the analytic conductor from the three gamma shifts."""
    q = 1.0
    for mu in (1.0, k - 1.0, float(k)):
        q *= abs(complex(0.5 + mu, t) / (2 * math.pi)) + 1
    return math.sqrt(q)


# -- coefficients -----------------------------------------------------------


def symsq_coeffs(f: Eigenform, N: int) -> np.ndarray:
    """``b[n] = sum_{d^2 m = n} lambda(m^2)`` for ``1 <= n <= N`` (``b[0]`` unused)."""
    if N < 1:
        raise DomainError("need N >= 1")
    if N > f.N:
        raise CoverageError(N, f.N, "symmetric-square coefficients")
    sq = f.lam_squares(N)
    b = np.zeros(N + 1)
    for d in range(1, math.isqrt(N) + 1):
        dd = d * d
        M = N // dd
        b[dd : dd * M + 1 : dd] += sq[1 : M + 1]
    b[0] = np.nan
    return b


def local_coeffs(lp2: float, j_max: int) -> list[float]:
    """Coefficients ``b(p^j)``, ``j <= j_max``, of the local factor
    ``1 / (1 - A X + A X^2 - X^3)`` with ``A = lambda(p^2)``."""
    out = [1.0]
    for j in range(1, j_max + 1):
        v = lp2 * out[j - 1]
        if j >= 2:
            v -= lp2 * out[j - 2]
        if j >= 3:
            v += out[j - 3]
        out.append(v)
    return out


# -- approximate functional equation -------------------------------------------


@dataclass(frozen=True)
class LValueResult:
    s: complex
    value: complex
    abs_error: float
    terms_used: int


@dataclass(frozen=True)
class CompletedValue:
    """``Lambda(s)`` held in multiprecision (it overflows doubles for large k)."""

    s: complex
    value: mpmath.mpc
    abs_error: mpmath.mpf


class _MellinKernel:
    """Weights ``W_a(n)`` for one AFE term at fixed (k, s, a)."""

    def __init__(self, k: int, s: complex, a: complex, tol: float, width: float | None):
        self.k, self.s, self.a = k, s, a
        self.width = width
        self.c = max(1.0, 1.5 - a.real)
        self.h = self.c / _STEP_FACTOR
        self._lg_s = complex(log_gamma_factor(s, k))
        self.T = self._height(self.c)
        n_half = int(math.ceil(self.T / self.h))
        t = self.h * np.arange(-n_half, n_half + 1)
        u = self.c + 1j * t
        self._u = u
        self._rho = self._ratio(u) / u
        self.N, self.tail = self._length(tol)
        self.weights, self.quad_err = self._weights(self.N)

    def _ratio(self, u):
        lg = log_gamma_factor(self.a + u, self.k) - self._lg_s
        if self.width is not None:
            lg = lg + (u / self.width) ** 2
        return np.exp(lg)

    def _height(self, c: float) -> float:
        ref = abs(complex(self._ratio(np.array([c + 0j]))[0])) / c
        T = 8.0
        while True:
            v = abs(complex(self._ratio(np.array([c + 1j * T]))[0])) / abs(complex(c, T))
            if v < 1e-19 * max(ref, 1.0) or T > 1e4:
                return T
            T *= 1.25

    def _l1_norm(self, c: float) -> float:
        T = self._height(c)
        h = c / 16
        t = h * np.arange(-math.ceil(T / h), math.ceil(T / h) + 1)
        u = c + 1j * t
        return float(np.sum(np.abs(self._ratio(u) / u)) * h / (2 * math.pi)) * 1.01

    def _length(self, tol: float) -> tuple[int, float]:
        sigma = self.a.real
        best_n, best_tail = None, None
        cands = [cp for cp in np.arange(self.c, 60.0, 1.0) if sigma + cp - 1 - _RANKIN_DELTA > 0.25]
        for cp in cands:
            C = self._l1_norm(float(cp))
            expo = sigma + cp - 1 - _RANKIN_DELTA
            n = max(1, int(math.ceil((_ZETA_CUBE * C / tol) ** (1 / expo))))
            if best_n is None or n < best_n:
                best_n = n
                best_tail = _ZETA_CUBE * C * n ** (-expo)
        return best_n, best_tail

    def _weights(self, N: int) -> tuple[np.ndarray, float]:
        logn = np.log(np.arange(1, N + 1, dtype=float))
        pref = self.h / (2 * math.pi)
        full = np.empty(N, dtype=complex)
        half = np.empty(N, dtype=complex)
        chunk = max(1, 2_000_000 // len(self._u))
        for i in range(0, N, chunk):
            e = np.exp(-np.outer(logn[i : i + chunk], self._u)) * self._rho
            full[i : i + chunk] = e.sum(axis=1) * pref
            half[i : i + chunk] = e[:, ::2].sum(axis=1) * 2 * pref
        quad = float(np.max(np.abs(full - half)))
        scale = float(np.sum(np.abs(self._rho)) * pref)
        quad = max(quad, 1e-16 * scale * math.sqrt(len(self._u)))
        return full, quad


@lru_cache(maxsize=512)
def afe_kernels(k: int, s: complex, tol: float = AFE_TOL, width: float | None = None):
    """Both AFE kernels for ``(k, s)``; memoised and shared across forms."""
    s = complex(s)
    return _MellinKernel(k, s, s, tol, width), _MellinKernel(k, s, 1 - s, tol, width)


def required_coverage(k: int, s: complex, tol: float = AFE_TOL) -> int:
    k1, k2 = afe_kernels(k, complex(s), tol)
    return max(k1.N, k2.N)


def lvalue(f: Eigenform, s: complex, tol: float = AFE_TOL, width: float | None = None) -> LValueResult:
    """``L(s, sym^2 f)`` for ``0 <= Re s <= 2`` with an explicit error bound."""
    s = complex(s)
    if not 0 <= s.real <= 2:
        raise DomainError(f"lvalue supports 0 <= Re s <= 2, got {s}")
    k1, k2 = afe_kernels(f.weight, s, tol, width)
    N = max(k1.N, k2.N)
    if N > f.N:
        raise CoverageError(N, f.N, "approximate functional equation")
    b = symsq_coeffs(f, N)
    n = np.arange(1, N + 1, dtype=float)
    t1 = b[1 : k1.N + 1] * np.exp(-s * np.log(n[: k1.N])) * k1.weights
    t2 = b[1 : k2.N + 1] * np.exp(-(1 - s) * np.log(n[: k2.N])) * k2.weights
    value = complex(math.fsum(t1.real) + math.fsum(t2.real), math.fsum(t1.imag) + math.fsum(t2.imag))
    # |b(n)| <= d_3(n) <= n for the crude quadrature-error multiplier
    bsum1 = float(np.sum(np.abs(b[1 : k1.N + 1]) * n[: k1.N] ** (-s.real)))
    bsum2 = float(np.sum(np.abs(b[1 : k2.N + 1]) * n[: k2.N] ** (s.real - 1)))
    rnd = 1e-16 * (float(np.sum(np.abs(t1))) + float(np.sum(np.abs(t2)))) * 4
    err = k1.tail + k2.tail + k1.quad_err * bsum1 + k2.quad_err * bsum2 + rnd
    return LValueResult(s, value, err, k1.N + k2.N)


def lvalue_series(f: Eigenform, s: complex, primes_upto: int | None = None) -> complex:
    """Euler product over ``p <= primes_upto`` (default: full coverage); Re s > 1."""
    s = complex(s)
    if s.real <= 1:
        raise DomainError("the Euler product converges only for Re s > 1")
    P = f.N if primes_upto is None else primes_upto
    if P > f.N:
        raise CoverageError(P, f.N)
    logs = 0j
    parts = []
    for p in prime_table(P).upto(P).tolist():
        A = f.lam_prime_power(p, 2)
        X = p ** (-s)
        parts.append(-cmath.log(1 - A * X + A * X * X - X**3))
    logs = complex(math.fsum(z.real for z in parts), math.fsum(z.imag for z in parts))
    return cmath.exp(logs)


def completed_lambda(f: Eigenform, s: complex, tol: float = AFE_TOL) -> CompletedValue:
    """``Lambda(s, sym^2 f) = gamma(s) L(s)`` in multiprecision."""
    r = lvalue(f, s, tol)
    g = mpmath.exp(mp_log_gamma_factor(complex(s), f.weight))
    return CompletedValue(complex(s), g * mpmath.mpc(r.value), abs(g) * r.abs_error)


# -- GRH-conditional upper bound for log |L(1/2)| ------------------------------


@dataclass(frozen=True)
class GrhBoundReport:
    x: float
    variant: str
    lhs: float
    rhs_explicit: float
    margin: float
    indeterminate: bool
    lambda0: float = LAMBDA0


def smoothing_weight(p: float, x: float) -> float:
    """``s(p, x) = p^{-lambda0/log x} log(x/p)/log x`` for ``2 <= p < x``."""
    if not 2 <= p < x:
        raise DomainError(f"smoothing weight needs 2 <= p < x, got p={p}, x={x}")
    lx = math.log(x)
    return p ** (-LAMBDA0 / lx) * math.log(x / p) / lx


def grh_prime_sum(f: Eigenform, x: float) -> float:
    """``sum_{p <= x} lambda(p^2) p^{-1/2} s(p, x)``."""
    lx = math.log(x)
    ps = prime_table(x).upto(x).tolist()
    if ps and ps[-1] > f.N:
        raise CoverageError(ps[-1], f.N)
    terms = []
    for p in ps:
        if p >= x:
            continue
        terms.append(f.lam_prime_power(p, 2) * p ** (-0.5 - LAMBDA0 / lx) * math.log(x / p) / lx)
    return math.fsum(terms)


def eta_prime(f: Eigenform, p: int) -> float:
    """``alpha^4 + beta^4 = lambda(p^4) - lambda(p^2)``."""
    return f.lam_prime_power(p, 4) - f.lam_prime_power(p, 2)


def grh_bound_report(
    f: Eigenform,
    x: float,
    variant: Literal["simplified", "coarse"] = "coarse",
    central: LValueResult | None = None,
) -> GrhBoundReport:
    """Both sides of the GRH-conditional bound for ``log|L(1/2)|``, O-terms dropped."""
    if x < 2:
        raise DomainError(f"x must be >= 2, got {x}")
    if variant not in ("simplified", "coarse"):
        raise DomainError(f"unknown variant {variant!r}")
    k = f.weight
    central = central or lvalue(f, 0.5)
    mag = abs(central.value.real)
    indeterminate = mag <= central.abs_error
    lhs = -math.inf if indeterminate else math.log(mag)
    lx = math.log(x)
    pieces = [grh_prime_sum(f, x), 0.5 * math.log(lx), (1 + LAMBDA0) * math.log(k) / lx]
    if variant == "simplified":
        lk = math.log(k)
        pieces.append(math.fsum(eta_prime(f, p) / (2 * p) for p in prime_table(lk).upto(lk).tolist()))
    rhs = math.fsum(pieces)
    return GrhBoundReport(x, variant, lhs, rhs, rhs - lhs, indeterminate)
