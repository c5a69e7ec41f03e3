import math

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from frozen import GRH_MARGIN_K12_X1E3
from sym2moments.cache import default_store
from sym2moments.errors import CoverageError, DomainError
from sym2moments.symsq import (
    LAMBDA0,
    completed_lambda,
    grh_bound_report,
    local_coeffs,
    lvalue,
    lvalue_series,
    smoothing_weight,
    symsq_coeffs,
)

# Independent AFE oracle for k=12 at s=1/2: regulator exp((w/4)^2), mpmath
# quadrature on Re w = 2, 100 terms (kernel below 1e-19 at the cut).
DELTA_CENTRAL_ORACLE = 0.5055493752227135


def delta():
    return default_store().get(12, 20000)[0]


def test_symsq_coefficients_small():
    f = delta()
    b = symsq_coeffs(f, 200)
    assert b[1] == 1.0
    for p in (2, 3, 5, 7, 11, 13):
        assert b[p] == pytest.approx(f.lam(p * p), abs=1e-14)
        assert b[p * p] == pytest.approx(f.lam(p**4) + 1, abs=1e-13)


def test_coefficients_match_dirichlet_convolution():
    # zeta(2s) * sum lambda(n^2) n^-s, convolved naively
    f = delta()
    N = 300
    b = symsq_coeffs(f, N)
    for n in range(1, N + 1):
        conv = sum(f.lam(m * m) for m in range(1, n + 1) if n % m == 0 and math.isqrt(n // m) ** 2 == n // m)
        assert b[n] == pytest.approx(conv, abs=1e-12)


def test_local_coefficients_match_table():
    f = delta()
    b = symsq_coeffs(f, 2**12)
    loc = local_coeffs(f.lam(4), 12)
    for j in range(13):
        assert loc[j] == pytest.approx(b[2**j], abs=1e-12)


def test_coverage_error():
    f = default_store().get(12, 2000)[0]
    with pytest.raises(CoverageError):
        symsq_coeffs(f, 10**6)


def test_central_value_against_oracle():
    r = lvalue(delta(), 0.5)
    assert abs(r.value - DELTA_CENTRAL_ORACLE) < 1e-6
    assert abs(r.value.imag) < 1e-12
    assert r.abs_error < 1e-10


def test_s2_against_euler_product():
    f = default_store().get(12, 10**5)[0]
    a = lvalue(f, 2.0).value
    assert abs(a - lvalue_series(f, 2.0, 10**5)) < 1e-8
    assert abs(completed_lambda(f, 2.0).value) > 0


@pytest.mark.parametrize("k", [12, 24, 40])
def test_functional_equation(k):
    for f in default_store().get(k, 4000):
        x, y = completed_lambda(f, 0.3), completed_lambda(f, 0.7)
        assert abs(x.value - y.value) <= x.abs_error + y.abs_error + 1e-12 * abs(x.value)


@pytest.mark.parametrize("t", [0.3, 1.0])
def test_critical_line_reality(t):
    f = delta()
    z = completed_lambda(f, complex(0.5, t))
    w = completed_lambda(f, complex(0.5, -t))
    tol = z.abs_error + 1e-12 * abs(z.value)
    assert abs(z.value.imag) < tol
    assert abs(z.value - mpmath.conj(w.value)) < 2 * tol


def test_lvalue_domain():
    with pytest.raises(DomainError):
        lvalue(delta(), 2.5)


def test_lambda0_by_bisection():
    lo, hi = 0.0, 1.0
    for _ in range(100):
        mid = (lo + hi) / 2
        if math.exp(-mid) - mid - mid * mid / 2 > 0:
            lo = mid
        else:
            hi = mid
    assert abs(LAMBDA0 - lo) < 1e-8
    assert str(LAMBDA0).startswith("0.4912")


def test_smoothing_weight():
    lam = LAMBDA0
    assert smoothing_weight(2, 4) == pytest.approx(2 ** (-lam / math.log(4)) * math.log(2) / math.log(4), abs=1e-15)
    assert smoothing_weight(2, 4) == pytest.approx(0.3911, abs=1e-4)
    x = 1e6
    assert smoothing_weight(x * (1 - 1e-4), x) < 1e-3
    with pytest.raises(DomainError):
        smoothing_weight(5, 5)


@settings(max_examples=200, deadline=None)
@given(st.floats(2, 1e6), st.floats(1e-6, 1))
def test_smoothing_weight_in_unit_interval(p, frac):
    x = p / (1 - frac) if frac < 1 else 2 * p
    if not p < x:
        return
    assert 0 <= smoothing_weight(p, x) < 1


def test_grh_report_frozen_margin():
    f = default_store().get(12, 10**5)[0]
    r = grh_bound_report(f, 1e3)
    assert not r.indeterminate
    assert r.margin == pytest.approx(GRH_MARGIN_K12_X1E3, abs=1e-9)
    assert r.lambda0 == LAMBDA0
    with pytest.raises(DomainError):
        grh_bound_report(f, 1.5)
    s = grh_bound_report(f, 1e3, "simplified")
    assert math.isfinite(s.margin)
