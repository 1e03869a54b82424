import io
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fgnlab._io import read_csv
from fgnlab.errors import ValidationError
from fgnlab.mittag_leffler import (
    MlfIndex,
    ks_critical_value,
    ks_distance,
    moment,
    reference_cdf,
    sample,
    stable_inverse_power,
)
from fgnlab.sampler import RngSeed


@pytest.mark.parametrize("alpha", [0.0, -0.1, 1.01])
def test_index_validation(alpha):
    with pytest.raises(ValidationError):
        MlfIndex(alpha)


def test_index_from_hurst():
    assert MlfIndex.from_hurst(0.8).alpha == pytest.approx(0.2)


@pytest.mark.parametrize("p", [1, 2, 5])
def test_moment_degenerate(p):
    assert moment(1.0, p) == pytest.approx(1.0)


@pytest.mark.parametrize("alpha", [0.05, 0.2, 0.5, 0.9])
def test_moment_mean_one(alpha):
    assert moment(alpha, 1) == pytest.approx(1.0, rel=1e-14)


@pytest.mark.parametrize("alpha", [0.1, 0.2, 0.5, 0.77])
@pytest.mark.parametrize("p", [2, 3, 6])
def test_moment_high_precision(alpha, p):
    a = mpmath.mpf(alpha)
    ref = mpmath.factorial(p) * mpmath.gamma(1 + a) ** p / mpmath.gamma(1 + p * a)
    assert moment(alpha, p) == pytest.approx(float(ref), rel=1e-12)


def test_moment_half_second():
    assert moment(0.5, 2) == pytest.approx(math.pi / 2, rel=1e-14)


@given(st.floats(0.01, 0.99))
@settings(max_examples=100, deadline=None)
def test_moment_positive_variance(alpha):
    assert moment(alpha, 2) > moment(alpha, 1) ** 2


def test_stable_law_laplace_transform():
    # S^{-alpha} from Kanter's formula; E[exp(-s S)] = exp(-s^alpha)
    alpha, n = 0.5, 200000
    rng = np.random.default_rng(0)
    u = math.pi * (1 - rng.random(n))
    e = rng.standard_exponential(n)
    S = stable_inverse_power(alpha, u, e) ** (-1 / alpha)
    for s in (0.5, 1.0, 2.0):
        vals = np.exp(-s * S)
        assert abs(vals.mean() - math.exp(-(s**alpha))) < 4 * vals.std() / math.sqrt(n)


@pytest.fixture(scope="module", params=[0.15, 0.2, 0.25, 0.5])
def big_sample(request):
    return sample(request.param, 10**6, RngSeed(0))


@pytest.mark.parametrize("p", [1, 2, 3])
def test_sample_moments(big_sample, p):
    est = np.mean(big_sample.values**p)
    assert abs(est - moment(big_sample.alpha, p)) < 4 * big_sample.standard_error(p)


def test_sample_positive(big_sample):
    assert np.all(big_sample.values > 0)


def test_half_second_moment():
    smp = sample(0.5, 10**6, RngSeed(1))
    assert np.mean(smp.values**2) == pytest.approx(math.pi / 2, abs=0.01)


def test_near_degenerate():
    assert sample(0.999, 10**5, RngSeed(2)).values.std() < 0.1
    assert np.all(sample(1.0, 10, RngSeed(2)).values == 1.0)


def test_sample_count_validated():
    with pytest.raises(ValidationError):
        sample(0.5, 0, RngSeed(0))


def test_scaled_mean():
    y = 2.5 * sample(0.2, 10**5, RngSeed(3)).values
    assert abs(y.mean() - 2.5) < 4 * y.std() / math.sqrt(y.size)


# Kolmogorov-Smirnov


def test_ks_identical_and_shuffled():
    x = np.random.default_rng(0).standard_normal(500)
    assert ks_distance(x, x) == 0.0
    assert ks_distance(x, np.random.default_rng(1).permutation(x)) == 0.0


def test_ks_independent_samples_below_threshold():
    a = sample(0.5, 10**5, RngSeed(10)).values
    b = sample(0.5, 10**5, RngSeed(11)).values
    crit = ks_critical_value(10**5, 10**5)
    assert crit == pytest.approx(1.95 * math.sqrt(2 / 10**5), rel=0.01)
    assert ks_distance(a, b) < crit


def test_ks_matches_scipy():
    from scipy import stats

    rng = np.random.default_rng(3)
    a, b = rng.standard_normal(300), rng.standard_normal(450) + 0.2
    assert ks_distance(a, b) == pytest.approx(stats.ks_2samp(a, b).statistic, abs=1e-15)
    assert ks_distance(a, stats.norm.cdf) == pytest.approx(stats.kstest(a, "norm").statistic, abs=1e-12)


def test_ks_empty():
    with pytest.raises(ValidationError):
        ks_distance([], [1.0])


@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=50),
       st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=50))
@settings(max_examples=100, deadline=None)
def test_ks_range_and_symmetry(a, b):
    d = ks_distance(a, b)
    assert 0.0 <= d <= 1.0
    assert d == ks_distance(b, a)


def test_reference_cdf_table():
    ref = reference_cdf(0.2, 10**5, RngSeed(4), grid_size=501)
    assert np.all(np.diff(ref.cdf) >= 0) and ref.cdf[-1] == 1.0
    assert ref.dkw_epsilon == pytest.approx(math.sqrt(math.log(2e3) / 2e5))
    other = sample(0.2, 10**4, RngSeed(5)).values
    assert ks_distance(other, ref) < ks_critical_value(10**4, 10**5) + 2 / 501
    buf = io.StringIO()
    ref.to_csv(buf)
    buf.seek(0)
    meta, header, rows = read_csv(buf)
    assert header == ["y", "F(y)"]
    assert set(meta) >= {"alpha", "count", "seed", "dkw_epsilon"}
    assert len(rows) == 501
