import dataclasses
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sym2moments.arith import truncated_exp
from sym2moments.cache import default_store
from sym2moments.errors import BudgetError, DomainError
from sym2moments.mollifier import (
    Thresholds,
    build_params,
    classify,
    evaluate_polynomial,
    expand_polynomial,
    n_total,
    nj,
    pj,
    qj,
    r_exponent,
    to_lambda_basis,
)


def delta():
    return default_store().get(12, 5000)[0]


def toy(primes, ells=None, k=0.25):
    p = build_params(k, 12, desk_scale=True)
    return dataclasses.replace(p, primes=(tuple(primes),), ells=ells or p.ells)


def test_ck_rk_examples():
    p = build_params(2, 10**6)
    assert (p.c_k, p.r_k) == (256, 4)
    p = build_params(0.25, 10**6)
    assert (p.c_k, p.r_k) == (64, 8)
    assert r_exponent(1) is None
    assert r_exponent(0.5) is None
    assert build_params(1, 100, r_override=4).r_k == 4


def test_first_window_exponent():
    p = build_params(1.5, 10**8)
    assert p.alphas[0] == 0
    assert p.alphas[1] == pytest.approx(1 / math.log(math.log(1e8)) ** 2, rel=1e-15)
    assert p.alphas[1] == pytest.approx(0.1178, abs=1e-4)
    assert all(ell % 2 == 0 for ell in p.ells)


def test_small_weight_needs_desk_scale():
    with pytest.raises(DomainError):
        build_params(0.5, 12)
    p = build_params(0.5, 12, desk_scale=True)
    assert p.desk_scale and p.J == 1
    with pytest.raises(DomainError):
        build_params(-1, 100)


def test_prime_sums():
    f = delta()
    assert pj(f, toy([]), 1) == 0.0
    assert pj(f, toy([7]), 1) == pytest.approx(f.lam(49) / math.sqrt(7), abs=1e-15)
    four = sum(f.lam(p * p) / math.sqrt(p) for p in (2, 3, 5, 7))
    assert pj(f, toy([2, 3, 5, 7]), 1) == pytest.approx(four, abs=1e-14)
    with pytest.raises(DomainError):
        pj(f, toy([2]), 2)


def test_window_factor_limits():
    f = delta()
    p = toy([2, 3, 5, 7])
    assert nj(f, p, 1, 0.0) == 1.0
    assert n_total(f, p, 0.0) == 1.0
    P = pj(f, p, 1)
    big = dataclasses.replace(p, ells=(200,))
    assert nj(f, big, 1, 1.3) == pytest.approx(math.exp(1.3 * P), rel=1e-14)


def test_q_factor():
    f = delta()
    p = toy([2, 3])
    ell = p.ells[0]
    assert qj(f, p, 1, P=0.0) == 0.0
    assert qj(f, p, 1, P=ell / p.c_k) == pytest.approx(1.0)
    assert qj(f, p, 1, P=0.37) == qj(f, p, 1, P=-0.37)
    with pytest.raises(DomainError):
        qj(f, build_params(1, 12, desk_scale=True), 1)


def test_empty_expansion_is_one():
    poly = expand_polynomial(toy([]), 1.7)
    assert poly.terms == {1: 1.0}


def test_single_prime_expansion():
    p, a = 5, 0.8
    params = toy([p], ells=(2,))
    poly = expand_polynomial(params, a)
    assert set(poly.terms) == {1, p, p * p}
    assert poly.terms[1] == 1.0
    assert poly.terms[p] == pytest.approx(a / math.sqrt(p), rel=1e-15)
    assert poly.terms[p * p] == pytest.approx(a * a / (2 * p), rel=1e-15)
    lb = to_lambda_basis(poly)
    assert lb.coeffs[1] == pytest.approx(1 + a * a / (2 * p), rel=1e-15)
    assert lb.coeffs[p] == pytest.approx(a / math.sqrt(p) + a * a / (2 * p), rel=1e-15)
    assert lb.coeffs[p * p] == pytest.approx(a * a / (2 * p), rel=1e-15)


def test_expansion_fidelity_weight12():
    f = delta()
    params = build_params(0.25, 12, desk_scale=True)
    for a in (-0.5, -1.5, 1.0):
        poly = expand_polynomial(params, a)
        direct = n_total(f, params, a)
        assert evaluate_polynomial(poly, f) == pytest.approx(direct, abs=1e-12)
        assert to_lambda_basis(poly).evaluate(f) == pytest.approx(direct, abs=1e-12)


def test_support_budget():
    params = build_params(0.25, 200, desk_scale=True)
    with pytest.raises(BudgetError):
        expand_polynomial(params, 1.0, support_cap=10)


def test_classify_partition_weight12():
    f = delta()
    params = build_params(0.25, 12, desk_scale=True)
    c = classify(f, params)
    assert 0 <= c.s_index <= params.J
    assert set(c.M) == {(l, j) for l in range(1, params.J + 1) for j in range(l, params.J + 1)}
    assert c.p_index is None or c.p_index in c.P


def test_classify_degenerate_and_override():
    f = delta()
    empty = toy([])
    c = classify(f, empty)
    assert c.s_index == empty.J and c.in_T
    assert all(v == 0 for v in c.M.values())
    forced = classify(f, build_params(0.25, 12, desk_scale=True), Thresholds(s_small=1e12))
    assert forced.s_index == 0


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 30).map(lambda j: 2 * j), st.floats(-40, 40))
def test_mirror_product_at_least_one(ell, x):
    assert truncated_exp(ell, x) * truncated_exp(ell, -x) >= 1 - 1e-12
