"""Primes, Mertens sums, truncated exponentials and Hecke-algebra expansions.

Indices that carry a known prime support are represented as a
``Factorization``: a tuple of ``(p, a)`` pairs with increasing primes.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, Union

import mpmath
import numpy as np

from .errors import DomainError

Factorization = tuple[tuple[int, int], ...]
IndexLike = Union[int, Factorization]

_SEGMENT = 10**7


def _simple_sieve(limit: int) -> np.ndarray:
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    flags[4::2] = False
    for p in range(3, math.isqrt(limit) + 1, 2):
        if flags[p]:
            flags[p * p :: 2 * p] = False
    return np.flatnonzero(flags).astype(np.int64)


def _segmented_sieve(limit: int) -> np.ndarray:
    base = _simple_sieve(math.isqrt(limit))
    chunks = [_simple_sieve(min(limit, _SEGMENT))]
    lo = _SEGMENT + 1
    while lo <= limit:
        hi = min(limit, lo + _SEGMENT - 1)
        flags = np.ones(hi - lo + 1, dtype=bool)
        for p in base:
            p = int(p)
            if p * p > hi:
                break
            start = max(p * p, ((lo + p - 1) // p) * p)
            flags[start - lo :: p] = False
        chunks.append(np.flatnonzero(flags).astype(np.int64) + lo)
        lo = hi + 1
    return np.concatenate(chunks)


@dataclass(frozen=True)
class PrimeTable:
    """All primes up to ``limit``, ascending."""

    limit: int
    primes: np.ndarray = field(repr=False)

    @classmethod
    def build(cls, limit: int) -> "PrimeTable":
        limit = int(limit)
        sieve = _segmented_sieve if limit > _SEGMENT else _simple_sieve
        arr = sieve(limit)
        arr.setflags(write=False)
        return cls(limit, arr)

    def __len__(self) -> int:
        return len(self.primes)

    def upto(self, x: float) -> np.ndarray:
        """Primes ``p <= x`` as a read-only view."""
        return self.primes[: bisect.bisect_right(self.primes, math.floor(x))]

    def between(self, lo: float, hi: float) -> np.ndarray:
        i = bisect.bisect_right(self.primes, math.floor(lo))
        j = bisect.bisect_right(self.primes, math.floor(hi))
        return self.primes[i:j]


_TABLE: PrimeTable = PrimeTable.build(2**16)


def prime_table(limit: float) -> PrimeTable:
    """Return a shared table covering at least ``limit``; grows by doubling."""
    global _TABLE
    limit = math.floor(limit)
    if limit > _TABLE.limit:
        _TABLE = PrimeTable.build(max(limit, 2 * _TABLE.limit))
    return _TABLE


def prime_range(lo: float, hi: float) -> list[int]:
    """Primes ``p`` with ``lo < p <= hi`` in increasing order."""
    if not 0 <= lo <= hi:
        raise DomainError(f"prime_range needs 0 <= lo <= hi, got ({lo}, {hi})")
    return [int(p) for p in prime_table(hi).between(lo, hi)]


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    table = prime_table(max(n, 2))
    i = bisect.bisect_left(table.primes, n)
    return i < len(table.primes) and int(table.primes[i]) == n


def mertens_sum(x: float) -> float:
    """Sum of ``1/p`` over primes ``p <= x``."""
    if x < 2:
        raise DomainError(f"mertens_sum needs x >= 2, got {x}")
    ps = prime_table(x).upto(x)
    return math.fsum(1.0 / ps.astype(np.float64))


def truncated_exp(ell: int, x: float) -> float:
    """Partial exponential series ``E_ell(x) = sum_{j<=ell} x**j / j!``.

    For ``x >= -1`` the terms come from the running ratio ``x/j`` and are
    summed with ``math.fsum``.  Below that the alternating terms dwarf the
    result, so the sum is carried in mpmath with enough extra digits to
    absorb the cancellation (about ``|x| / ln 10``).
    """
    if ell < 0:
        raise DomainError("truncation order must be non-negative")
    if x < -1:
        with mpmath.workdps(20 + int(-x / math.log(10)) + 1):
            t = mpmath.mpf(x)
            term = mpmath.mpf(1)
            acc = term
            for j in range(1, ell + 1):
                term = term * t / j
                acc += term
            return float(acc)
    term = 1.0
    terms = [term]
    for j in range(1, ell + 1):
        term *= x / j
        terms.append(term)
        if term == 0.0:
            break
    return math.fsum(terms)


# -- factorizations -------------------------------------------------------


def factor_small(n: int) -> Factorization:
    """Trial-division factorization for modest ``n`` (inputs, tests, CLI)."""
    if n < 1:
        raise DomainError("only positive integers have factorizations here")
    out = []
    m = n
    p = 2
    while p * p <= m:
        if m % p == 0:
            a = 0
            while m % p == 0:
                m //= p
                a += 1
            out.append((p, a))
        p += 1 if p == 2 else 2
    if m > 1:
        out.append((m, 1))
    return tuple(out)


def as_factorization(n: IndexLike) -> Factorization:
    if isinstance(n, tuple):
        return tuple((int(p), int(a)) for p, a in n if a)
    return factor_small(int(n))


def fact_value(fact: Factorization) -> int:
    v = 1
    for p, a in fact:
        v *= p**a
    return v


def big_omega(fact: Factorization) -> int:
    """Number of prime factors counted with multiplicity."""
    return sum(a for _, a in fact)


def w_weight(fact: Factorization) -> int:
    """Multiplicative ``w(n)`` with ``w(p**a) = a!``."""
    v = 1
    for _, a in fact:
        v *= math.factorial(a)
    return v


def divisor_count(n: int) -> int:
    d = 1
    for _, a in factor_small(n):
        d *= a + 1
    return d


# -- Hecke-algebra expansions ---------------------------------------------
#
# A local element is a dict {e: c} standing for sum c * lambda(p**e).  The
# product rule lambda(p^a) lambda(p^b) = sum_{i<=min(a,b)} lambda(p^{a+b-2i})
# is the prime-power case of the Hecke relation.


def hecke_mul_local(x: Mapping[int, int], y: Mapping[int, int]) -> dict[int, int]:
    out: dict[int, int] = {}
    for a, ca in x.items():
        for b, cb in y.items():
            for i in range(min(a, b) + 1):
                e = a + b - 2 * i
                out[e] = out.get(e, 0) + ca * cb
    return {e: c for e, c in out.items() if c}


@lru_cache(maxsize=None)
def _local_power(base: tuple[tuple[int, int], ...], a: int) -> tuple[tuple[int, int], ...]:
    acc: dict[int, int] = {0: 1}
    step = dict(base)
    for _ in range(a):
        acc = hecke_mul_local(acc, step)
    return tuple(sorted(acc.items()))


_SQ = ((2, 1),)
_ETA = ((4, 1), (2, -1))


def _expand(fact: Factorization, base) -> dict[int, int]:
    terms: dict[int, int] = {1: 1}
    for p, a in fact:
        local = _local_power(base, a)
        new: dict[int, int] = {}
        for t, c in terms.items():
            for e, d in local:
                # every exponent is even: lambda(p^{2m}) = lambda((p^m)^2)
                key = t * p ** (e // 2)
                new[key] = new.get(key, 0) + c * d
        terms = new
    return {t: c for t, c in terms.items() if c}


@dataclass(frozen=True)
class SquareExpansion:
    """``prod_{p^a || n} lambda(p^2)^a == sum_t terms[t] * lambda(t^2)``."""

    n: int
    factors: Factorization
    terms: dict[int, int]

    @property
    def omega(self) -> int:
        return big_omega(self.factors)

    def coefficient_sum(self) -> int:
        return sum(abs(c) for c in self.terms.values())

    def factored_terms(self) -> list[tuple[Factorization, int]]:
        return [(_refactor(t, self.factors), c) for t, c in sorted(self.terms.items())]


@dataclass(frozen=True)
class FourthPowerExpansion:
    """``eta(n) == sum_t terms[t] * lambda(t^2)`` with eta completely
    multiplicative and ``eta(p) = lambda(p^4) - lambda(p^2)``."""

    n: int
    factors: Factorization
    terms: dict[int, int]

    @property
    def omega(self) -> int:
        return big_omega(self.factors)

    def coefficient_sum(self) -> int:
        return sum(abs(c) for c in self.terms.values())

    def factored_terms(self) -> list[tuple[Factorization, int]]:
        return [(_refactor(t, self.factors), c) for t, c in sorted(self.terms.items())]


def _refactor(t: int, support: Factorization) -> Factorization:
    # divide only by the known support primes of the parent index
    out = []
    for p, _ in support:
        a = 0
        while t % p == 0:
            t //= p
            a += 1
        if a:
            out.append((p, a))
    return tuple(out)


def square_expand(n: IndexLike) -> SquareExpansion:
    """Expand ``prod lambda(p^2)^a`` over ``n = prod p^a`` in the basis ``lambda(t^2)``.

    Example:
        >>> square_expand(8).terms == {1: 1, 2: 3, 4: 2, 8: 1}
        True
    """
    fact = as_factorization(n)
    return SquareExpansion(fact_value(fact), fact, _expand(fact, _SQ))


def fourth_power_expand(n: IndexLike) -> FourthPowerExpansion:
    """Expand ``eta(n)`` in the basis ``lambda(t^2)`` with ``t | n^2``."""
    fact = as_factorization(n)
    return FourthPowerExpansion(fact_value(fact), fact, _expand(fact, _ETA))


def convolve_terms(x: Mapping[int, int], y: Mapping[int, int]) -> dict[int, int]:
    """Product of two expansions over coprime supports."""
    out: dict[int, int] = {}
    for t1, c1 in x.items():
        for t2, c2 in y.items():
            out[t1 * t2] = out.get(t1 * t2, 0) + c1 * c2
    return out


def fsum_ordered(values: Iterable[float]) -> float:
    """Correctly rounded sum; order-independent, hence reproducible."""
    return math.fsum(values)
