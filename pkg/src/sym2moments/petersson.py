"""Both sides of the Petersson trace formula in level one.

Geometric side::

    Delta_{m,n} = delta_{m,n} + 2 pi i^k sum_{c>=1} S(m,n;c)/c J_{k-1}(4 pi sqrt(mn)/c)

The c-sum is cut at the first ``c`` where a rigorous tail majorant drops
below ``tail_target`` (never beyond ``c_max``).  With ``nu = k - 1``,
``g = gcd(m, n)``, the Weil bound ``|S| <= d(c) sqrt(gcd(m,n,c)) sqrt(c)``,
``d(c) <= 2 sqrt(c)`` and ``|J_nu(x)| <= (x/2)^nu / nu!``::

    2 pi sum_{c>C} |S|/c |J_nu| <= 4 pi sqrt(g) (2 pi sqrt(mn))^nu / nu! * C^{1-nu} / (nu-1)
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import mpmath
import numpy as np

from .errors import DomainError
from .hecke import Eigenform, eigenforms
from .symsq import LValueResult, lvalue

TAIL_TARGET = 1e-20


@dataclass(frozen=True)
class DeltaResult:
    value: float
    tail_bound: float
    c_max: int
    c_used: int


def kloosterman(m: int, n: int, c: int) -> float:
    """Real Kloosterman sum ``S(m, n; c)`` by enumeration of units mod ``c``."""
    if c < 1:
        raise DomainError("modulus must be positive")
    if c == 1:
        return 1.0
    hs = [h for h in range(1, c) if math.gcd(h, c) == 1]
    phase = np.array([(m * h + n * pow(h, -1, c)) % c for h in hs], dtype=np.float64)
    return math.fsum(np.cos(2 * math.pi * phase / c))


def _log_first_term(nu: int, x: float) -> float:
    return nu * math.log(x / 2) - math.lgamma(nu + 1)


def bessel_j(nu: int, x: float) -> float:
    """Bessel ``J_nu(x)`` for integer ``nu >= 0`` and ``x >= 0``.

    When ``(x/2)^2 <= (nu+1)/2`` the ascending series has terms shrinking by
    at least half each step, so it is summed in doubles with the leading
    power factored out in log form.  Otherwise mpmath evaluates it at a
    working precision raised to cover the cancellation.
    """
    if x < 0 or nu < 0:
        raise DomainError("bessel_j needs nu >= 0 and x >= 0")
    if x == 0:
        return 1.0 if nu == 0 else 0.0
    q = (x / 2) ** 2
    lead = _log_first_term(nu, x)
    if q <= (nu + 1) / 2:
        terms = [1.0]
        t = 1.0
        j = 0
        while abs(t) > 1e-18:
            j += 1
            t *= -q / (j * (nu + j))
            terms.append(t)
        if lead < -745:
            return 0.0
        return math.exp(lead) * math.fsum(terms)
    dps = 30 + int(x / math.log(10)) + 5
    with mpmath.workdps(dps):
        return float(mpmath.besselj(nu, x))


def delta_tail_bound(k: int, m: int, n: int, C: int) -> float:
    """Majorant for ``|2 pi sum_{c > C} S(m,n;c)/c J_{k-1}(4 pi sqrt(mn)/c)|``."""
    nu = k - 1
    g = math.gcd(m, n)
    log_b = (
        math.log(4 * math.pi * math.sqrt(g))
        + nu * math.log(2 * math.pi * math.sqrt(m * n))
        - math.lgamma(nu + 1)
        + (1 - nu) * math.log(C)
        - math.log(nu - 1)
    )
    return math.exp(log_b) if log_b > -745 else 0.0


def delta_geometric(k: int, m: int, n: int, c_max: int = 10**5, tail_target: float = TAIL_TARGET) -> DeltaResult:
    """Kloosterman–Bessel side of the trace formula with a rigorous tail."""
    if k % 2 or k < 4:
        raise DomainError(f"weight must be even and >= 4, got {k}")
    if m < 1 or n < 1 or c_max < 1:
        raise DomainError("m, n and c_max must be positive")
    sign = -1 if (k // 2) % 2 else 1
    terms = []
    c_used = c_max
    for c in range(1, c_max + 1):
        x = 4 * math.pi * math.sqrt(m * n) / c
        terms.append(kloosterman(m, n, c) / c * bessel_j(k - 1, x))
        if delta_tail_bound(k, m, n, c) <= tail_target:
            c_used = c
            break
    series = 2 * math.pi * sign * math.fsum(terms)
    tail = delta_tail_bound(k, m, n, c_used)
    # per-term relative error 1e-12 of the Bessel values
    tail += 2 * math.pi * 1e-12 * math.fsum(abs(t) for t in terms)
    return DeltaResult(float(m == n) + series, tail, c_max, c_used)


def harmonic_weight(f: Eigenform, l1: LValueResult | None = None) -> float:
    """``omega_f = (k-1)/(2 pi^2) L(1, sym^2 f)``, the inverse Petersson weight."""
    l1 = l1 or lvalue(f, 1.0)
    return (f.weight - 1) / (2 * math.pi**2) * l1.value.real


def delta_spectral(
    k: int,
    m: int,
    n: int,
    forms: Sequence[Eigenform] | None = None,
    weights: Sequence[float] | None = None,
) -> float:
    """``sum_f lambda_f(m) lambda_f(n) / omega_f`` in the fixed form order."""
    if forms is None:
        if k % 2 or (k < 12):
            return 0.0
        forms = eigenforms(k, max(m * n, 200))
    if not forms:
        return 0.0
    if weights is None:
        weights = [harmonic_weight(f) for f in forms]
    return math.fsum(f.lam(m) * f.lam(n) / w for f, w in zip(forms, weights))
