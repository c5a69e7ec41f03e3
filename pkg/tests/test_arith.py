import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sym2moments.arith import (
    big_omega,
    divisor_count,
    factor_small,
    fourth_power_expand,
    is_prime,
    mertens_sum,
    prime_range,
    square_expand,
    truncated_exp,
    w_weight,
)
from sym2moments.errors import DomainError


def naive_primes(n):
    return [p for p in range(2, n + 1) if all(p % d for d in range(2, int(p**0.5) + 1))]


def test_prime_range_small():
    assert prime_range(1, 10) == [2, 3, 5, 7]
    assert prime_range(10, 11) == [11]
    assert prime_range(11, 11) == []


def test_prime_count_million():
    assert len(prime_range(1, 10**6)) == 78498


def test_prime_range_matches_trial_division():
    assert prime_range(0, 3000) == naive_primes(3000)


def test_prime_range_rejects_bad_interval():
    with pytest.raises(DomainError):
        prime_range(10, 5)


def test_mertens_values():
    assert mertens_sum(2) == 0.5
    assert mertens_sum(10) == pytest.approx(1 / 2 + 1 / 3 + 1 / 5 + 1 / 7, abs=1e-15)
    assert abs(mertens_sum(10**6) - (math.log(math.log(10**6)) + 0.26149)) < 0.01
    with pytest.raises(DomainError):
        mertens_sum(1.5)


def test_truncated_exp_examples():
    assert truncated_exp(0, 5) == 1.0
    assert truncated_exp(1, 2) == 3.0
    assert truncated_exp(2, 1) == 2.5
    assert abs(truncated_exp(200, 3) - math.exp(3)) < 1e-12


def test_square_expand_examples():
    p = 7
    e1 = square_expand(p)
    assert e1.terms == {p: 1}
    assert 1 not in e1.terms
    assert square_expand(p * p).terms == {1: 1, p: 1, p * p: 1}
    e3 = square_expand(p**3)
    assert e3.terms == {1: 1, p: 3, p**2: 2, p**3: 1}
    assert e3.coefficient_sum() == 7
    assert square_expand(8).terms == {1: 1, 2: 3, 4: 2, 8: 1}


def test_fourth_power_expand_examples():
    p = 5
    assert fourth_power_expand(1).terms == {1: 1}
    assert fourth_power_expand(p).terms == {p * p: 1, p: -1}
    e2 = fourth_power_expand(p * p)
    assert e2.terms == {p**4: 1, p**3: -1, 1: 2}
    assert e2.coefficient_sum() == 4


def test_small_helpers():
    assert factor_small(360) == ((2, 3), (3, 2), (5, 1))
    assert big_omega(factor_small(360)) == 6
    assert w_weight(factor_small(12)) == math.factorial(2) * math.factorial(1)
    assert divisor_count(360) == 24
    assert is_prime(7919) and not is_prime(7917) and not is_prime(1)


small_n = st.integers(min_value=1, max_value=5000)


@settings(max_examples=200, deadline=None)
@given(small_n)
def test_square_expand_bounds(n):
    e = square_expand(n)
    om = big_omega(factor_small(n))
    assert all(c >= 0 for c in e.terms.values())
    assert sum(e.terms.values()) <= 3**om
    assert all(n % t == 0 for t in e.terms)


@settings(max_examples=200, deadline=None)
@given(small_n)
def test_fourth_power_bound(n):
    e = fourth_power_expand(n)
    assert e.coefficient_sum() <= 8 ** big_omega(factor_small(n))
    assert all((n * n) % t == 0 for t in e.terms)


@settings(max_examples=100, deadline=None)
@given(small_n, small_n)
def test_square_expand_multiplicative(m, n):
    if math.gcd(m, n) != 1:
        return
    a, b, ab = square_expand(m).terms, square_expand(n).terms, square_expand(m * n).terms
    prod = {}
    for s, x in a.items():
        for t, y in b.items():
            prod[s * t] = prod.get(s * t, 0) + x * y
    assert prod == ab


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 40), st.floats(-10, 10))
def test_truncated_exp_remainder(ell, x):
    # Lagrange remainder: |e^x - E_ell(x)| <= |x|^{ell+1}/(ell+1)! * e^{|x|}
    bound = abs(x) ** (ell + 1) / math.factorial(ell + 1) * math.exp(abs(x))
    assert abs(math.exp(x) - truncated_exp(ell, x)) <= bound + 1e-12 * math.exp(abs(x))


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 30).map(lambda j: 2 * j), st.floats(-50, 50))
def test_truncated_exp_even_positive(ell, x):
    assert truncated_exp(ell, x) > 0


def test_mertens_constant_fit_is_stable():
    fits = [mertens_sum(x) - math.log(math.log(x)) for x in (1e4, 1e5, 1e6)]
    assert max(fits) - min(fits) < 2e-3
    assert abs(sum(fits) / 3 - 0.26149) < 0.01
