import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import linalg

from fgnlab.errors import IllConditioned, NotContractive, ValidationError
from fgnlab.fgn_model import autocovariance, b_vector, spectral_minimum, spectral_params
from fgnlab.toeplitz import (
    NeumannConfig,
    SymmetricToeplitz,
    dense_matvec,
    eigen_extremes,
    levinson_solve,
    matvec,
    neumann_quadratic_form,
)


def identity(k):
    row = np.zeros(k)
    row[0] = 1.0
    return SymmetricToeplitz(row)


def test_rejects_bad_rows():
    for row in ([], [0.0, 1.0], [1.0, np.inf]):
        with pytest.raises(ValidationError):
            SymmetricToeplitz(row)


def test_first_row_is_read_only():
    T = SymmetricToeplitz.fgn(0.8, 4)
    with pytest.raises(ValueError):
        T.first_row[0] = 2.0


# matvec


@pytest.mark.parametrize("k", [1, 5, 600, 2048])
def test_matvec_identity(k):
    v = np.random.default_rng(0).standard_normal(k)
    np.testing.assert_allclose(matvec(identity(k), v), v, atol=1e-12)


def test_matvec_row_sums():
    T = SymmetricToeplitz.fgn(0.8, 4)
    out = matvec(T, np.ones(4))
    assert out[0] == pytest.approx(1 + sum(autocovariance(0.8, t) for t in (1, 2, 3)), rel=1e-14)


def test_matvec_fast_path_matches_dense():
    k = 1024
    T = SymmetricToeplitz.fgn(0.8, k)
    V = np.random.default_rng(1).standard_normal((k, 100))
    fast = matvec(T, V)
    dense = T.dense() @ V
    err = np.linalg.norm(fast - dense, axis=0) / np.linalg.norm(dense, axis=0)
    assert err.max() < 1e-10


@given(st.integers(1, 40), st.integers(0, 2**32 - 1))
@settings(max_examples=50, deadline=None)
def test_matvec_crossover_irrelevant(k, seed):
    rng = np.random.default_rng(seed)
    row = np.concatenate([[k + 1.0], rng.uniform(-1, 1, k - 1)])
    T = SymmetricToeplitz(row)
    v = rng.standard_normal(k)
    np.testing.assert_allclose(matvec(T, v, crossover=0), dense_matvec(T, v), rtol=1e-10, atol=1e-10 * k)


def test_matvec_dimension_mismatch():
    with pytest.raises(ValidationError):
        matvec(SymmetricToeplitz.fgn(0.8, 4), np.ones(5))


# Levinson


def test_levinson_identity():
    rhs = np.arange(1.0, 8.0)
    np.testing.assert_allclose(levinson_solve(identity(7), rhs), rhs)


def test_levinson_two_by_two():
    b1 = autocovariance(0.8, 1)
    x = levinson_solve(SymmetricToeplitz([1.0, b1]), np.array([1.0, 0.0]))
    np.testing.assert_allclose(x, np.array([1.0, -b1]) / (1 - b1**2), rtol=1e-14)


@pytest.mark.parametrize("h", [0.6, 0.8, 0.95])
@pytest.mark.parametrize("k", [1, 2, 3, 64, 500])
def test_levinson_matches_dense_solver(h, k):
    T = SymmetricToeplitz.fgn(h, k)
    rhs = np.random.default_rng(k).standard_normal(k)
    x = levinson_solve(T, rhs)
    np.testing.assert_allclose(x, linalg.solve(T.dense(), rhs, assume_a="pos"), rtol=1e-8, atol=1e-10)
    assert np.max(np.abs(T.dense() @ x - rhs)) / np.max(np.abs(rhs)) <= 1e-10


@pytest.mark.parametrize("k", [1024, 4096])
def test_levinson_residual_large(k):
    T = SymmetricToeplitz.fgn(0.8, k)
    rhs = np.random.default_rng(2).standard_normal(k)
    x = levinson_solve(T, rhs)
    assert np.max(np.abs(matvec(T, x) - rhs)) / np.max(np.abs(rhs)) <= 1e-8


def test_levinson_multiple_rhs():
    T = SymmetricToeplitz.fgn(0.8, 30)
    R = np.random.default_rng(3).standard_normal((30, 4))
    np.testing.assert_allclose(T.dense() @ levinson_solve(T, R), R, atol=1e-10)


@pytest.mark.parametrize("row", [[1.0, 1.0], [1.0, 1.0, 1.0], [1.0, 0.9, 0.2]])
def test_levinson_flags_singular_or_indefinite(row):
    with pytest.raises(IllConditioned):
        levinson_solve(SymmetricToeplitz(row), np.ones(len(row)))


def test_gohberg_semencul_inverse():
    T = SymmetricToeplitz.fgn(0.85, 300)
    V = np.random.default_rng(4).standard_normal((300, 3))
    np.testing.assert_allclose(T.inverse.apply(V), linalg.solve(T.dense(), V), rtol=1e-8, atol=1e-10)


# eigen extremes


def test_eigen_identity():
    ext = eigen_extremes(identity(16))
    assert ext.lambda_min == pytest.approx(1.0)
    assert ext.lambda_max == pytest.approx(1.0)


@pytest.mark.parametrize("h", [0.6, 0.8, 0.9])
@pytest.mark.parametrize("k", [2, 3, 16, 64, 256])
def test_eigen_matches_eigvalsh(h, k):
    T = SymmetricToeplitz.fgn(h, k)
    ref = linalg.eigvalsh(T.dense())
    ext = eigen_extremes(T)
    assert ext.lambda_min == pytest.approx(ref[0], rel=1e-8)
    assert ext.lambda_max == pytest.approx(ref[-1], rel=1e-7)
    assert ext.residual_min <= 1e-8 and ext.residual_max <= 1e-8


@pytest.fixture(scope="module")
def eig_sweep():
    return {k: eigen_extremes(SymmetricToeplitz.fgn(0.8, k)) for k in [2**j for j in range(4, 12)]}


def test_eigen_interlacing(eig_sweep):
    ks = sorted(eig_sweep)
    lo = [eig_sweep[k].lambda_min for k in ks]
    hi = [eig_sweep[k].lambda_max for k in ks]
    assert all(np.diff(lo) <= 1e-12)
    assert all(np.diff(hi) >= -1e-12)


def test_lambda_max_growth(eig_sweep):
    ks = np.array([k for k in sorted(eig_sweep) if 64 <= k <= 2048], float)
    lam = [eig_sweep[int(k)].lambda_max for k in ks]
    slope = np.polyfit(np.log(ks), np.log(lam), 1)[0]
    assert slope == pytest.approx(0.6, abs=0.05)


def test_lambda_min_above_spectral_floor(eig_sweep):
    fmin = spectral_minimum(spectral_params(0.8))
    for ext in eig_sweep.values():
        assert ext.lambda_min >= fmin
        assert ext.lambda_min >= 0.5 * fmin


# Neumann series


def test_neumann_identity_one_term():
    B = np.array([1.0, 2.0, -1.0])
    res = neumann_quadratic_form(identity(3), B)
    assert res.value == pytest.approx(6.0)
    assert res.terms_used == 1


@pytest.mark.parametrize("cfg", [NeumannConfig(), NeumannConfig(m_scale=1.0, hurst=0.8)], ids=["optimal", "ck"])
def test_neumann_matches_levinson(cfg):
    T = SymmetricToeplitz.fgn(0.8, 256)
    B = b_vector(0.8, 8, 256)
    res = neumann_quadratic_form(T, B, cfg)
    ref = B @ levinson_solve(T, B)
    assert res.value == pytest.approx(ref, rel=1e-6)
    assert 0 < res.term_decay_rate < 1


def test_neumann_not_contractive():
    T = SymmetricToeplitz.fgn(0.8, 256)
    # c = 1/(m k^{2H-1}) with m tiny overshoots 2/lambda_max
    with pytest.raises(NotContractive):
        neumann_quadratic_form(T, b_vector(0.8, 4, 256), NeumannConfig(m_scale=0.01, hurst=0.8))


def test_neumann_config_validation():
    with pytest.raises(ValidationError):
        NeumannConfig(m_scale=1.0)
    with pytest.raises(ValidationError):
        NeumannConfig(m_scale=-1.0, hurst=0.8)


@pytest.mark.parametrize("k", [8, 64, 512])
def test_qform_bounded_by_lambda_min(k):
    T = SymmetricToeplitz.fgn(0.85, k)
    B = b_vector(0.85, 4, k)
    q = B @ levinson_solve(T, B)
    assert 0 < q <= (B @ B) / eigen_extremes(T).lambda_min * (1 + 1e-10)
