"""Level-one cusp forms: exact q-expansions, Hecke matrices and eigenforms.

The basis is built exactly from E4, E6 and the discriminant form and put in
Victor–Miller echelon shape.  Eigenvalues of T_2 come from the exact integer
characteristic polynomial, isolated rigorously with ball arithmetic; each
eigenform's coordinates are then fixed-point integers, so the normalised
eigenvalues ``lambda_f(n) = a_f(n) / n**((k-1)/2)`` are computed from exact
integer combinations of basis coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import flint
import mpmath
import numpy as np

from .arith import Factorization, factor_small, prime_table
from .errors import CoverageError, DomainError, EmptySpaceError, LengthError, PrecisionError

DENSE_LIMIT = 5000
"""Eigenvalue tables are stored densely up to this index and at primes beyond."""

MAX_ATTEMPTS = 4


def cusp_dim(k: int) -> int:
    """Dimension of the space of level-one cusp forms of weight ``k``."""
    if k % 2:
        raise DomainError(f"odd weight {k} has no level-one forms")
    if k < 12:
        return 0
    return k // 12 - (1 if k % 12 == 2 else 0)


def _sigma_table(N: int, power: int) -> list[int]:
    s = [0] * (N + 1)
    for d in range(1, N + 1):
        dk = d**power
        for m in range(d, N + 1, d):
            s[m] += dk
    return s


def _eisenstein(N: int) -> tuple[flint.fmpz_poly, flint.fmpz_poly]:
    s3 = _sigma_table(N, 3)
    s5 = _sigma_table(N, 5)
    e4 = flint.fmpz_poly([1] + [240 * v for v in s3[1:]])
    e6 = flint.fmpz_poly([1] + [-504 * v for v in s5[1:]])
    return e4, e6


@dataclass(frozen=True)
class QExpansionBasis:
    """Exact echelonised cusp-form basis truncated at ``q**N``.

    ``terms[i][n]`` is the ``q**n`` coefficient of the i-th form (0-based
    rows; row ``i`` starts ``q**(i+1) + O(q**(dim+1))``).
    """

    weight: int
    dim: int
    N: int
    terms: tuple[tuple[int, ...], ...] = field(repr=False)
    polys: tuple = field(repr=False, compare=False, default=())


def victor_miller_basis(k: int, N: int) -> QExpansionBasis:
    """Echelonised integer basis of weight-``k`` cusp forms to ``N`` terms."""
    if k % 2 or k < 12:
        raise EmptySpaceError(f"no cusp forms of weight {k} (need even k >= 12)")
    d = cusp_dim(k)
    if d and N < d + 1:
        raise LengthError(d + 1, N)
    if d == 0:
        return QExpansionBasis(k, 0, N, ())
    L = N + 1
    e4, e6 = _eisenstein(N)
    delta = (e4.pow_trunc(3, L) - e6.mul_low(e6, L)) / 1728
    rows = []
    dpow = flint.fmpz_poly([1])
    for j in range(1, d + 1):
        dpow = dpow.mul_low(delta, L)
        r = k - 12 * j
        a, b = (r // 4, 0) if r % 4 == 0 else ((r - 6) // 4, 1)
        g = dpow.mul_low(e4.pow_trunc(a, L), L) if a else dpow
        if b:
            g = g.mul_low(e6, L)
        rows.append(g)
    # the raw matrix is unitriangular: clear entries above the diagonal
    for i in range(d - 2, -1, -1):
        for j in range(i + 1, d):
            c = rows[i][j + 1]
            if c:
                rows[i] = rows[i] - c * rows[j]
    terms = tuple(tuple(int(c) for c in _padded(g, L)) for g in rows)
    return QExpansionBasis(k, d, N, terms, tuple(rows))


def _padded(g: flint.fmpz_poly, L: int) -> list:
    c = g.coeffs()
    return c + [0] * (L - len(c))


def hecke_matrix(basis: QExpansionBasis, n: int) -> list[list[int]]:
    """Exact matrix of ``T_n``: entry ``[i][j]`` is the ``q**(j+1)``
    coefficient of ``T_n`` applied to basis row ``i``."""
    d = basis.dim
    need = n * (d + 1)
    if basis.N < need:
        raise LengthError(need, basis.N)
    km1 = basis.weight - 1
    out = []
    for row in basis.terms:
        r = []
        for j in range(1, d + 1):
            g = math.gcd(n, j)
            r.append(sum(e**km1 * row[n * j // (e * e)] for e in range(1, g + 1) if g % e == 0))
        out.append(r)
    return out


# -- eigenforms ------------------------------------------------------------


def _arb_to_mpf(x: flint.arb) -> mpmath.mpf:
    man, exp = x.mid().man_exp()
    return mpmath.mpf((int(man), int(exp)))


def _fixed(x: flint.arb, shift: int) -> int:
    man, exp = x.mid().man_exp()
    e = int(exp) + shift
    man = int(man)
    return man << e if e >= 0 else (man + (1 << (-e - 1))) >> -e


@dataclass(frozen=True, eq=False)
class Eigenform:
    """A normalised Hecke eigenform with Deligne-normalised eigenvalues.

    ``dense[n]`` holds ``lambda(n)`` for ``1 <= n <= len(dense)-1``;
    ``prime_vals[i]`` holds ``lambda(primes[i])`` for every prime up to ``N``.
    """

    weight: int
    index: int
    basis_coords: tuple
    precision: int
    N: int
    dense: np.ndarray = field(repr=False)
    primes: np.ndarray = field(repr=False)
    prime_vals: np.ndarray = field(repr=False)
    error_bound: float = 0.0

    @cached_property
    def _pmap(self) -> dict[int, float]:
        return dict(zip(self.primes.tolist(), self.prime_vals.tolist()))

    @property
    def dense_limit(self) -> int:
        return len(self.dense) - 1

    def lam_prime(self, p: int) -> float:
        if p <= self.dense_limit:
            return float(self.dense[p])
        try:
            return self._pmap[p]
        except KeyError:
            raise CoverageError(p, self.N) from None

    def lam_prime_power(self, p: int, e: int) -> float:
        """``lambda(p**e)`` by the three-term prime-power recursion."""
        if e == 0:
            return 1.0
        if p**e <= self.dense_limit:
            return float(self.dense[p**e])
        lp = self.lam_prime(p)
        prev, cur = 1.0, lp
        for _ in range(e - 1):
            prev, cur = cur, lp * cur - prev
        return cur

    def lam_fact(self, fact: Factorization) -> float:
        v = 1.0
        for p, e in fact:
            v *= self.lam_prime_power(p, e)
        return v

    def lam(self, n: int) -> float:
        """``lambda_f(n)``; multiplicative extension beyond the dense table."""
        if n < 1:
            raise DomainError("lambda is defined for positive integers")
        if n <= self.dense_limit:
            return float(self.dense[n])
        fact = _factor_covered(n, self.N)
        return self.lam_fact(fact)

    def lam_squares(self, M: int) -> np.ndarray:
        """Array ``out[m] = lambda(m**2)`` for ``0 < m <= M`` (``out[0]`` unused)."""
        if M > self.N:
            raise CoverageError(M, self.N, "lambda(m^2)")
        out = np.ones(M + 1)
        out[0] = np.nan
        for p in prime_table(M).upto(M).tolist():
            pe, e = p, 1
            while pe <= M:
                val = self.lam_prime_power(p, 2 * e)
                for m in range(pe, M + 1, pe):
                    if (m // pe) % p:
                        out[m] *= val
                pe *= p
                e += 1
        return out


def _factor_covered(n: int, coverage: int) -> Factorization:
    out = []
    m = n
    for p in prime_table(min(math.isqrt(n), coverage) + 1).upto(min(math.isqrt(n), coverage)).tolist():
        if p * p > m:
            break
        if m % p == 0:
            a = 0
            while m % p == 0:
                m //= p
                a += 1
            out.append((p, a))
    if m > 1:
        if m > coverage:
            raise CoverageError(m, coverage)
        out.append((m, 1))
    return tuple(out)


def _eigen_attempt(M, charpoly, bits: int):
    d = len(M)
    flint.ctx.prec = bits
    roots = charpoly.complex_roots()
    if len(roots) != d or any(mult != 1 for _, mult in roots):
        return None
    lams = []
    for r, _ in roots:
        if not r.imag.contains(0):
            return None
        lams.append(r.real)
    coords = []
    for lam in lams:
        if d == 1:
            coords.append([flint.arb(1)])
            continue
        B = flint.arb_mat(d - 1, d - 1)
        rhs = flint.arb_mat(d - 1, 1)
        for jj in range(1, d):
            for ii in range(1, d):
                B[jj - 1, ii - 1] = M[ii][jj] - (lam if ii == jj else 0)
            rhs[jj - 1, 0] = -M[0][jj]
        try:
            sol = B.solve(rhs)
        except ZeroDivisionError:
            return None
        v = [flint.arb(1)] + [sol[i, 0] for i in range(d - 1)]
        coords.append(v)
    return lams, coords


def eigenforms(k: int, N: int, precision: int = 128) -> list[Eigenform]:
    """All normalised Hecke eigenforms of weight ``k`` with coverage ``N``.

    Forms are sorted by ``lambda(2)``.  Raises ``PrecisionError`` when the
    eigenvalues of ``T_2`` cannot be separated after repeated precision
    doubling, or when the fixed-point tables miss the accuracy target.
    """
    if k % 2 or k < 12:
        raise EmptySpaceError(f"no cusp forms of weight {k} (need even k >= 12)")
    if precision < 64:
        raise DomainError("precision must be at least 64 bits")
    d = cusp_dim(k)
    if d == 0:
        return []
    N = max(N, 2 * (d + 1), 2)
    basis = victor_miller_basis(k, N)
    T2 = hecke_matrix(basis, 2)
    charpoly = flint.fmpz_mat(T2).charpoly()

    half = (k - 1) / 2
    # bits lost to cancellation in sum_i v_i g_i(n) relative to n^{(k-1)/2}
    nmax = min(N, 20 * d + 20)
    loss = 0
    for n in range(1, nmax + 1):
        tot = sum(abs(row[n]) for row in basis.terms)
        loss = max(loss, tot.bit_length() - int(half * math.log2(n)))
    shift = precision + max(loss, 0) + 16
    coord_bits = max(T2[i][j].bit_length() for i in range(d) for j in range(d)) * d

    bits = shift + coord_bits + 64
    for _attempt in range(MAX_ATTEMPTS):
        res = _eigen_attempt(T2, charpoly, bits)
        if res is not None:
            lams, coords = res
            scale_ok = all(
                (c.rad() * (1 << shift)) < 1 for v in coords for c in v[1:]
            )
            if scale_ok:
                break
        bits *= 2
    else:
        raise PrecisionError(f"eigenvalues of T_2 at weight {k} not separated at {bits // 2} bits")

    dense_n = min(N, DENSE_LIMIT)
    primes = prime_table(N).upto(N)
    big_primes = primes[primes > dense_n]
    forms = []
    for idx, v in enumerate(coords):
        V = [_fixed(c, shift) for c in v]
        A = flint.fmpz_poly(0)
        for Vi, g in zip(V, basis.polys):
            A += Vi * g
        ca = A.coeffs()
        ca = ca + [0] * (N + 1 - len(ca))

        def norm(n: int) -> float:
            # true division of Python ints is correctly rounded
            return (int(ca[n]) / ((1 << shift) * n ** ((k - 2) // 2))) / math.sqrt(n)

        dense = np.empty(dense_n + 1)
        dense[0] = np.nan
        for n in range(1, dense_n + 1):
            dense[n] = norm(n)
        pv = np.array([norm(int(p)) for p in big_primes], dtype=np.float64)
        coords_mp = tuple(_arb_to_mpf(c) for c in v)
        forms.append(
            Eigenform(
                weight=k,
                index=idx,
                basis_coords=coords_mp,
                precision=precision,
                N=N,
                dense=dense,
                primes=big_primes.copy(),
                prime_vals=pv,
                error_bound=2.0 ** (-precision),
            )
        )
    forms.sort(key=lambda f: f.lam(2))
    return [_reindex(f, i) for i, f in enumerate(forms)]


def _reindex(f: Eigenform, i: int) -> Eigenform:
    if f.index == i:
        return f
    return Eigenform(f.weight, i, f.basis_coords, f.precision, f.N, f.dense, f.primes, f.prime_vals, f.error_bound)


def lam(f: Eigenform, n: int) -> float:
    """Functional alias of :meth:`Eigenform.lam`."""
    return f.lam(n)


def hecke_residual(f: Eigenform, m: int, n: int) -> float:
    """``|lambda(m) lambda(n) - sum_{d | (m,n)} lambda(mn/d^2)|``."""
    g = math.gcd(m, n)
    rhs = math.fsum(f.lam(m * n // (d * d)) for d in range(1, g + 1) if g % d == 0)
    return abs(f.lam(m) * f.lam(n) - rhs)


def trace_check(forms: Sequence[Eigenform], k: int) -> tuple[float, int]:
    """``(sum_f lambda_f(2), exact trace(T_2))`` for cross-checking."""
    d = cusp_dim(k)
    if d == 0:
        return 0.0, 0
    basis = victor_miller_basis(k, 2 * (d + 1))
    T2 = hecke_matrix(basis, 2)
    return math.fsum(f.lam(2) for f in forms), sum(T2[i][i] for i in range(d))


__all__ = [
    "QExpansionBasis",
    "Eigenform",
    "cusp_dim",
    "victor_miller_basis",
    "hecke_matrix",
    "eigenforms",
    "lam",
    "hecke_residual",
    "trace_check",
    "factor_small",
]
