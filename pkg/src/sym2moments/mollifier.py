"""Mollifier built from truncated exponentials of short prime sums.

For a form ``f`` and window ``P_j = (k^{alpha_{j-1}}, k^{alpha_j}]`` put
``P_j(f) = sum_{p in P_j} lambda(p^2)/sqrt(p)`` and
``N(f, a) = prod_j E_{ell_j}(a P_j(f))``.  Expanding gives a Dirichlet
polynomial ``sum_n x_n lambda~(n)/sqrt(n)`` with
``lambda~(n) = prod_{p^e || n} lambda(p^2)^e`` and
``x_n = prod_j a^{Omega(n_j)}/w(n_j)``; :func:`to_lambda_basis` rewrites it
as a combination of single eigenvalues ``lambda(t^2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .arith import Factorization, big_omega, fact_value, prime_range, square_expand, truncated_exp, w_weight
from .errors import BudgetError, DomainError
from .hecke import Eigenform
from .symsq import eta_prime, smoothing_weight

DEFAULT_SUPPORT_CAP = 2_000_000


def r_exponent(k: float) -> int | None:
    """Even exponent ``r_k`` of the Q-factors, or ``None`` where undefined."""
    if 2 * k > 1:
        if k == 1:
            return None
        return 2 * math.ceil(k / (k - 1))
    if 2 * k < 1:
        return 2 * math.ceil((2 - 3 * k) / (1 - 2 * k)) + 2
    return None


@dataclass(frozen=True)
class MollifierParams:
    k: float
    kappa: int
    M: int
    A: float
    alphas: tuple[float, ...]
    ells: tuple[int, ...]
    J: int
    c_k: float
    r_k: int | None
    intervals: tuple[tuple[float, float], ...]
    primes: tuple[tuple[int, ...], ...] = field(repr=False)
    desk_scale: bool = False

    @property
    def length_exponent(self) -> float:
        """``sum_j alpha_j ell_j``: the support lies below ``kappa`` to this power."""
        return math.fsum(a * l for a, l in zip(self.alphas[1:], self.ells))

    def support_size(self) -> int:
        """Number of indices in the expanded polynomial (multisets per window)."""
        size = 1
        for ps, ell in zip(self.primes, self.ells):
            size *= math.comb(len(ps) + ell, ell)
        return size


def build_params(
    k: float,
    kappa: int,
    M: int = 1,
    A: float = 1.0,
    desk_scale: bool = False,
    r_override: int | None = None,
) -> MollifierParams:
    """Parameter pack for moment exponent ``k`` at weight ``kappa``.

    ``kappa < 16`` (where ``log log kappa <= 1``) is accepted only with
    ``desk_scale=True``.  When no ``alpha_j`` is below ``10**-M`` the pack has a
    single window ``(1, kappa^{alpha_1}]`` and ``desk_scale`` is set.
    """
    if k < 0:
        raise DomainError(f"moment exponent must be >= 0, got {k}")
    if M < 1 or A <= 0:
        raise DomainError("M must be a positive integer and A positive")
    if kappa < 3:
        raise DomainError("weight too small for log log")
    llk = math.log(math.log(kappa))
    if llk <= 1 and not desk_scale:
        raise DomainError(
            f"log log {kappa} = {llk:.4f} <= 1; pass desk_scale=True at small weights"
        )
    if llk <= 0:
        raise DomainError(f"log log {kappa} <= 0: no window exponents")
    base = 1 / llk**2
    small = [j for j in range(1, 200) if 20 ** (j - 1) * base <= 10.0**-M]
    flagged = desk_scale or not small
    J = 1 + max(small) if small else 1
    alphas = (0.0,) + tuple(20 ** (j - 1) * base for j in range(1, J + 1))
    ells = tuple(2 * math.ceil(math.exp(A) * a ** -0.75) for a in alphas[1:])
    intervals = tuple((kappa ** alphas[j - 1], kappa ** alphas[j]) for j in range(1, J + 1))
    primes = tuple(tuple(prime_range(lo, hi)) for lo, hi in intervals)
    c_k = 64 * max(1.0, 2 * k)
    r_k = r_override if r_override is not None else r_exponent(k)
    if r_k is not None and (r_k <= 0 or r_k % 2):
        raise DomainError("r_k must be a positive even integer")
    return MollifierParams(k, kappa, M, A, alphas, ells, J, c_k, r_k, intervals, primes, flagged)


def pj(f: Eigenform, params: MollifierParams, j: int) -> float:
    """Window prime sum ``P_j(f)`` (``j`` is 1-based)."""
    _check_j(params, j)
    return math.fsum(f.lam_prime_power(p, 2) / math.sqrt(p) for p in params.primes[j - 1])


def nj(f: Eigenform, params: MollifierParams, j: int, alpha: float, P: float | None = None) -> float:
    _check_j(params, j)
    P = pj(f, params, j) if P is None else P
    return truncated_exp(params.ells[j - 1], alpha * P)


def n_total(f: Eigenform, params: MollifierParams, alpha: float) -> float:
    """``N(f, alpha)``; positive because every ``ell_j`` is even."""
    v = 1.0
    for j in range(1, params.J + 1):
        v *= nj(f, params, j, alpha)
    return v


def qj(f: Eigenform, params: MollifierParams, j: int, P: float | None = None) -> float:
    """``(c_k P_j / ell_j)^{r_k ell_j}``."""
    _check_j(params, j)
    if params.r_k is None:
        raise DomainError(
            f"r_k undefined at k={params.k}; rebuild with r_override (4 is the natural choice at k=1)"
        )
    P = pj(f, params, j) if P is None else P
    ell = params.ells[j - 1]
    return (params.c_k * P / ell) ** (params.r_k * ell)


def _check_j(params: MollifierParams, j: int) -> None:
    if not 1 <= j <= params.J:
        raise DomainError(f"window index {j} outside 1..{params.J}")


# -- expansion -----------------------------------------------------------


@dataclass(frozen=True)
class DirichletPolynomial:
    """``terms[n] = x_n / sqrt(n)`` with the factorization of each index."""

    terms: dict[int, float]
    factors: dict[int, Factorization] = field(repr=False)
    x: dict[int, float] = field(repr=False)


@dataclass(frozen=True)
class LambdaBasisPolynomial:
    """``sum_t coeffs[t] lambda(t^2)``."""

    coeffs: dict[int, float]
    factors: dict[int, Factorization] = field(repr=False)

    def evaluate(self, f: Eigenform) -> float:
        return math.fsum(c * f.lam_fact(tuple((p, 2 * a) for p, a in self.factors[t])) for t, c in self.coeffs.items())


def _multisets(primes: Sequence[int], cap: int) -> Iterator[Factorization]:
    """Factorizations over ``primes`` with total exponent at most ``cap``."""

    def rec(i: int, left: int, acc: list) -> Iterator[Factorization]:
        if i == len(primes):
            yield tuple(acc)
            return
        for e in range(left + 1):
            if e:
                acc.append((primes[i], e))
            yield from rec(i + 1, left - e, acc)
            if e:
                acc.pop()

    yield from rec(0, cap, [])


def expand_polynomial(
    params: MollifierParams, alpha: float, support_cap: int = DEFAULT_SUPPORT_CAP
) -> DirichletPolynomial:
    """Dirichlet polynomial of ``N(., alpha)`` by depth-first products over windows."""
    size = params.support_size()
    if size > support_cap:
        raise BudgetError(size, support_cap)
    partial: list[tuple[Factorization, float]] = [((), 1.0)]
    for ps, ell in zip(params.primes, params.ells):
        local = [(fa, alpha ** big_omega(fa) / w_weight(fa)) for fa in _multisets(ps, ell)]
        partial = [(f1 + f2, x1 * x2) for f1, x1 in partial for f2, x2 in local]
    terms, factors, xs = {}, {}, {}
    for fa, x in partial:
        n = fact_value(fa)
        factors[n] = fa
        xs[n] = x
        terms[n] = x / math.sqrt(n)
    return DirichletPolynomial(terms, factors, xs)


def to_lambda_basis(poly: DirichletPolynomial) -> LambdaBasisPolynomial:
    """Contract every ``lambda~(n)`` through its square expansion."""
    acc: dict[int, list[float]] = {}
    tfacts: dict[int, Factorization] = {}
    for n, coef in poly.terms.items():
        for tf, c in square_expand(poly.factors[n]).factored_terms():
            t = fact_value(tf)
            tfacts[t] = tf
            acc.setdefault(t, []).append(coef * c)
    return LambdaBasisPolynomial({t: math.fsum(v) for t, v in acc.items()}, tfacts)


def evaluate_polynomial(poly: DirichletPolynomial, f: Eigenform) -> float:
    """``sum_n x_n lambda~(n)/sqrt(n)`` evaluated directly."""
    p2 = {}

    def lt(fa):
        v = 1.0
        for p, e in fa:
            if p not in p2:
                p2[p] = f.lam_prime_power(p, 2)
            v *= p2[p] ** e
        return v

    return math.fsum(c * lt(poly.factors[n]) for n, c in poly.terms.items())


# -- classification -----------------------------------------------------------


@dataclass(frozen=True)
class Thresholds:
    s_small: float = 1e3
    s_large: float = 200.0
    p_decay: float = 10.0
    t_small: float = 1e3


@dataclass(frozen=True)
class Classification:
    s_index: int
    in_T: bool
    p_index: int | None
    M: dict[tuple[int, int], float]
    P: dict[int, float]
    ambiguous_levels: tuple[int, ...]


def m_sum(f: Eigenform, params: MollifierParams, l: int, j: int) -> float:
    """``M_{l,j}(f) = sum_{p in P_l} lambda(p^2)/sqrt(p) s(p, kappa^{alpha_j})``."""
    x = params.kappa ** params.alphas[j]
    return math.fsum(f.lam_prime_power(p, 2) / math.sqrt(p) * smoothing_weight(p, x) for p in params.primes[l - 1] if p < x)


def p_block(f: Eigenform, m: int) -> float:
    """``P_m(f) = sum_{2^m < p <= 2^{m+1}} (lambda(p^4) - lambda(p^2))/(2p)``."""
    return math.fsum(eta_prime(f, p) / (2 * p) for p in prime_range(2**m, 2 ** (m + 1)))


def classify(f: Eigenform, params: MollifierParams, thresholds: Thresholds = Thresholds()) -> Classification:
    """Assign ``f`` to exactly one level set ``S(j)``, test ``T`` and find ``P(m)``.

    The level is the last ``j`` such that every ``|M_{m,l}| <= ell_m/s_small``
    for ``m <= j``; levels where the value lies between the two thresholds
    are listed in ``ambiguous_levels``.
    """
    J = params.J
    M = {(l, j): m_sum(f, params, l, j) for l in range(1, J + 1) for j in range(l, J + 1)}
    s_index = J
    ambiguous = []
    for m in range(1, J + 1):
        vals = [abs(M[(m, l)]) for l in range(m, J + 1)]
        ell = params.ells[m - 1]
        if any(v > ell / thresholds.s_small for v in vals):
            s_index = m - 1
            if not any(v > ell / thresholds.s_large for v in vals) and m > 1:
                ambiguous.append(m)
            break
    in_T = abs(pj(f, params, 1)) <= params.ells[0] / thresholds.t_small
    mmax = int(math.floor(math.log(math.log(params.kappa)) / math.log(2)))
    P = {m: p_block(f, m) for m in range(0, mmax + 1)}
    p_index = None
    for m in range(mmax, -1, -1):
        if abs(P[m]) > 2 ** (-m / thresholds.p_decay):
            p_index = m
            break
    return Classification(s_index, in_T, p_index, M, P, tuple(ambiguous))
