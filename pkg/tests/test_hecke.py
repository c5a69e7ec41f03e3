import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import tau_oracle
from sym2moments.cache import default_store
from sym2moments.errors import CoverageError, DomainError, EmptySpaceError, LengthError
from sym2moments.hecke import cusp_dim, eigenforms, hecke_matrix, hecke_residual, trace_check, victor_miller_basis

TAU = tau_oracle(400)


def dim_oracle(k):
    # count (a, b) with 4a + 6b = k, minus the Eisenstein series
    if k % 2 or k < 0:
        return 0
    return max(0, sum(1 for b in range(k // 6 + 1) if (k - 6 * b) % 4 == 0) - 1)


@pytest.mark.parametrize("k", range(12, 122, 2))
def test_cusp_dim_matches_monomial_count(k):
    assert cusp_dim(k) == dim_oracle(k)


def test_cusp_dim_examples():
    assert (cusp_dim(12), cusp_dim(14), cusp_dim(24)) == (1, 0, 2)


def test_basis_weight12_is_delta():
    b = victor_miller_basis(12, 4)
    assert b.dim == 1
    assert list(b.terms[0][1:5]) == [1, -24, 252, -1472]
    b = victor_miller_basis(12, 400)
    assert list(b.terms[0]) == TAU


def test_basis_weight16_is_delta_times_e4():
    b = victor_miller_basis(16, 2)
    assert list(b.terms[0][1:3]) == [1, 216]


def test_basis_weight24_is_echelon():
    b = victor_miller_basis(24, 3)
    assert b.dim == 2
    assert b.terms[0][1:3] == (1, 0)
    assert b.terms[1][1:3] == (0, 1)


def test_basis_errors():
    with pytest.raises(EmptySpaceError):
        victor_miller_basis(13, 10)
    with pytest.raises(EmptySpaceError):
        victor_miller_basis(10, 10)
    with pytest.raises(LengthError):
        victor_miller_basis(24, 2)
    assert victor_miller_basis(14, 10).dim == 0


def test_hecke_matrix_weight12():
    b = victor_miller_basis(12, 20)
    assert hecke_matrix(b, 2) == [[-24]]
    assert hecke_matrix(b, 3) == [[252]]
    assert hecke_matrix(b, 1) == [[1]]
    b24 = victor_miller_basis(24, 20)
    assert hecke_matrix(b24, 1) == [[1, 0], [0, 1]]
    with pytest.raises(LengthError):
        hecke_matrix(victor_miller_basis(24, 5), 2)


def test_delta_eigenvalues_match_tau():
    (f,) = eigenforms(12, 400)
    for n in range(1, 401):
        assert f.lam(n) == pytest.approx(TAU[n] / n**5.5, abs=1e-14)
    assert f.lam(2) == pytest.approx(-0.5303300858899106, abs=1e-15)
    assert f.lam(4) == -0.71875
    assert f.lam(4) == pytest.approx(f.lam(2) ** 2 - 1, abs=1e-15)
    assert f.lam(1) == 1.0
    assert f.lam(6) == pytest.approx(f.lam(2) * f.lam(3), abs=1e-15)


def test_trace_identity_weight24():
    forms = eigenforms(24, 100)
    assert len(forms) == 2
    total, exact = trace_check(forms, 24)
    assert total == pytest.approx(exact / 2**11.5, abs=1e-13)
    assert [f.lam(2) for f in forms] == sorted(f.lam(2) for f in forms)


@pytest.mark.parametrize("k", [16, 18, 20, 22, 26])
def test_dim_one_weights_match_basis(k):
    b = victor_miller_basis(k, 300)
    (f,) = eigenforms(k, 300)
    for n in range(1, 301):
        assert f.lam(n) == pytest.approx(b.terms[0][n] / n ** ((k - 1) / 2), abs=1e-13)


def test_empty_weight_has_no_forms():
    assert eigenforms(14, 100) == []


def test_lambda_domain_and_coverage():
    (f,) = eigenforms(12, 100)
    with pytest.raises(DomainError):
        f.lam(0)
    with pytest.raises(CoverageError):
        f.lam(101 * 103)
    with pytest.raises(CoverageError):
        f.lam_squares(101)


def test_lam_squares_matches_lam():
    (f,) = eigenforms(12, 300)
    sq = f.lam_squares(17)
    for m in range(1, 18):
        assert sq[m] == pytest.approx(f.lam(m * m), abs=1e-13)


def test_precision_is_recorded():
    forms = eigenforms(36, 200, precision=256)
    assert all(f.precision >= 256 for f in forms)
    assert all(f.error_bound < 1e-30 for f in forms)


def test_cache_round_trip(tmp_path):
    from sym2moments.cache import EigenStore

    s1 = EigenStore(tmp_path)
    forms = s1.get(28, 300)
    assert (tmp_path / "weight_0028.json").exists()
    again = EigenStore(tmp_path).get(28, 300)
    for a, b in zip(forms, again):
        assert np.array_equal(a.dense, b.dense, equal_nan=True)
        assert np.array_equal(a.prime_vals, b.prime_vals)


WEIGHTS = st.sampled_from([12, 16, 20, 24, 28, 32, 36])
PAIRS = st.tuples(st.integers(1, 60), st.integers(1, 60))


@settings(max_examples=150, deadline=None)
@given(WEIGHTS, PAIRS)
def test_hecke_relation(k, mn):
    m, n = mn
    for f in default_store().get(k, 3600):
        assert hecke_residual(f, m, n) < 1e-11


@settings(max_examples=50, deadline=None)
@given(WEIGHTS, st.integers(2, 3000))
def test_deligne_bound(k, p):
    if not all(p % d for d in range(2, int(p**0.5) + 1)):
        return
    for f in default_store().get(k, 3600):
        assert abs(f.lam(p)) <= 2 + 1e-12
