import math

import numpy as np
import pytest
from scipy import linalg

from fgnlab.conditional import (
    G0,
    ConditionalLaw,
    DnTable,
    build_dn_table,
    cllt_check,
    conditional_mean_vanishing,
    conditional_params,
    estimate_dn,
    quadratic_form,
    quadratic_form_decay,
    regime_label,
)
from fgnlab.errors import MissingDn, NoStabilization, ValidationError
from fgnlab.fgn_model import autocovariance, b_vector, partial_sum_variance
from fgnlab.sampler import RngSeed, sample_circulant_batch
from fgnlab.toeplitz import SymmetricToeplitz, eigen_extremes

from conftest import dense_cov


def dense_conditional(h, n, future):
    """Schur complement of the full (n + k) covariance, no Toeplitz structure used."""
    k = future.size
    C = dense_cov(h, n + k)
    cross = C[:n, n:].sum(axis=0)
    var = C[:n, :n].sum()
    w = linalg.solve(C[n:, n:], cross, assume_a="pos")
    return cross @ linalg.solve(C[n:, n:], future, assume_a="pos"), var - cross @ w


def test_one_by_one_example():
    b1 = autocovariance(0.8, 1)
    g = conditional_params(0.8, 1, [1.7])
    assert g.mu == pytest.approx(b1 * 1.7, rel=1e-14)
    assert g.sigma2 == pytest.approx(1 - b1**2, rel=1e-14)
    assert g.sigma2 == pytest.approx(0.734036, abs=1e-6)


@pytest.mark.parametrize("n", [1, 3, 10])
def test_brownian_trivial(n):
    g = conditional_params(0.5, n, np.arange(5.0))
    assert g.mu == 0.0
    assert g.sigma2 == n


@pytest.mark.parametrize("h,n,k", [(0.8, 8, 64), (0.85, 1, 10), (0.6, 16, 100), (0.95, 4, 200)])
def test_matches_dense_schur_complement(h, n, k):
    future = sample_circulant_batch(h, k, RngSeed(9), 1)[0]
    g = conditional_params(h, n, future)
    mu, s2 = dense_conditional(h, n, future)
    assert g.mu == pytest.approx(mu, rel=1e-8, abs=1e-10)
    assert g.sigma2 == pytest.approx(s2, rel=1e-8)


@pytest.mark.parametrize("h", [0.8, 0.85])
@pytest.mark.parametrize("n", [1, 4, 16])
@pytest.mark.parametrize("k", [2**j for j in range(5, 13)])
def test_variance_identity(h, n, k):
    law = ConditionalLaw(h, n, k)
    assert law.sigma2 + law.qform == pytest.approx(n ** (2 * h), rel=1e-8)
    assert 0 < law.sigma2 <= partial_sum_variance(h, n)


@pytest.mark.parametrize("h", [0.6, 0.8, 0.85, 0.95])
@pytest.mark.parametrize("n", [1, 4, 16])
def test_sigma2_nonincreasing_in_k(h, n):
    s = [ConditionalLaw(h, n, 2**j).sigma2 for j in range(4, 13)]
    assert np.all(np.diff(s) <= 1e-12 * s[0])


def test_future_length_checked():
    with pytest.raises(ValidationError):
        ConditionalLaw(0.8, 2, 5).mean(np.zeros(4))


# quadratic form table


def test_brownian_qform_zero():
    t = quadratic_form_decay(0.5, 3, [8, 16, 32])
    assert np.all(t.column("qform") == 0)


@pytest.mark.parametrize("k", [8, 64, 512])
def test_qform_below_eigen_bound(k):
    t = quadratic_form_decay(0.85, 4, [k], with_bound=True)
    assert t.column("qform")[0] <= t.column("bound")[0] * (1 + 1e-10)


def test_regime_labels():
    assert quadratic_form_decay(0.6, 4, [32, 64]).meta["regime"] == regime_label(0.6)
    assert "outside" in regime_label(0.75)
    assert "outside" not in regime_label(0.76)


@pytest.fixture(scope="module")
def decay_085():
    return quadratic_form_decay(0.85, 4, [2**j for j in range(5, 13)])


def test_qform_grows_with_k(decay_085):
    # more conditioning explains more variance: the quadratic form can only grow
    q = decay_085.column("qform")
    assert np.all(np.diff(q) >= 0)


@pytest.mark.xfail(strict=True, reason="B^T Sigma^-1 B is nondecreasing in k; it cannot decay (see ledger)")
def test_qform_decays_to_half(decay_085):
    q = decay_085.column("qform")
    assert np.all(np.diff(q) < 0) and q[-1] < q[0] / 2


@pytest.mark.xfail(strict=True, reason="fitted exponent of a nondecreasing sequence is positive (see ledger)")
def test_fitted_exponent_negative(decay_085):
    slope, se = decay_085.meta["fitted_exponent"], decay_085.meta["exponent_stderr"]
    assert slope + 1.96 * se < 0


# d_n


def test_estimate_dn_unit():
    e = estimate_dn(0.85, 1)
    assert 0 < e.dn2 < 1
    assert e.stabilized
    assert e.dn2 == pytest.approx(0.5655, abs=5e-4)
    k = e.k_used
    assert abs(ConditionalLaw(0.85, 1, 2 * k).sigma2 - e.dn2) <= 1e-3 * e.dn2


def test_estimate_dn_brownian():
    e = estimate_dn(0.5, 10)
    assert e.dn2 == 10 and e.k_used == 16


def test_estimate_dn_cap():
    with pytest.raises(NoStabilization):
        estimate_dn(0.85, 64, rel_tol=1e-9, k_cap=256)
    e = estimate_dn(0.85, 64, rel_tol=1e-9, k_cap=256, allow_unstabilized=True)
    assert not e.stabilized and e.k_used == 256


@pytest.fixture(scope="module")
def dn_085():
    return build_dn_table(0.85, [2**j for j in range(4, 11)])


def test_dn_below_unconditional(dn_085):
    for n, e in dn_085.entries.items():
        assert e.dn2 <= n ** (2 * 0.85)


def test_dn_slow_variation_top_octave(dn_085):
    l = dn_085.to_table().column("l_n")
    assert abs(l[-1] / l[-2] - 1) < 0.05


def test_dn_table_interpolation_and_plateau(dn_085):
    assert dn_085.l_n(16) == pytest.approx(dn_085.entries[16].dn2 / 16**1.7)
    assert dn_085.l_n(10**6) == dn_085.l_n(1024)
    lo, hi = sorted([dn_085.l_n(16), dn_085.l_n(32)])
    assert lo <= dn_085.l_n(23) <= hi
    with pytest.raises(MissingDn):
        dn_085.l_n(3)
    with pytest.raises(MissingDn):
        DnTable(0.85, {})


# Monte Carlo over futures


def test_mean_vanishing_brownian():
    t = conditional_mean_vanishing(0.5, 4, [16, 32], 100, RngSeed(0))
    assert np.all(t.column("mean_abs_ratio") == 0)


@pytest.fixture(scope="module")
def vanish_085():
    return conditional_mean_vanishing(0.85, 4, [64, 256, 1024, 4096], 1000, RngSeed(1))


def test_mu_variance_matches_qform(vanish_085):
    for r in vanish_085.records():
        assert abs(r["mu_var"] - r["qform"]) < 3 * r["mu_var_se"]
        # mean of mu is zero within 4 standard errors
        assert abs(r["mu_mean"]) < 4 * math.sqrt(r["qform"] / 1000)


@pytest.mark.xfail(strict=True, reason="Var(mu) = qform grows with k, so E|mu|/sigma grows too (see ledger)")
def test_mean_abs_ratio_decreases(vanish_085):
    m = vanish_085.column("mean_abs_ratio")
    assert m[-1] < m[0]


def test_mean_abs_ratio_matches_gaussian_value(vanish_085):
    # mu ~ N(0, qform) exactly, so E|mu|/sigma = sqrt(2 qform / pi) / sigma
    for r in vanish_085.records():
        law = ConditionalLaw(0.85, 4, r["k"])
        expect = math.sqrt(2 * law.qform / math.pi / law.sigma2)
        assert abs(r["mean_abs_ratio"] - expect) < 4 * r["ratio_se"]


def test_cllt_targets():
    t = cllt_check(0.85, [4], (0, 1), k=256, reps=50, seed=RngSeed(0))
    assert t.column("target")[0] == pytest.approx(G0)
    t = cllt_check(0.85, [4], (0, 1), kappa=1.0, k=256, reps=50, seed=RngSeed(0))
    assert t.column("target")[0] == pytest.approx(0.241971, abs=1e-6)


@pytest.mark.parametrize("shift", [-3.0, 0.5, 10.0])
def test_cllt_translation_invariance(shift):
    kw = dict(k=512, reps=200, seed=RngSeed(4))
    dn = build_dn_table(0.85, [8, 32])
    base = cllt_check(0.85, [8, 32], (0.0, 1.0), dn_table=dn, **kw)
    moved = cllt_check(0.85, [8, 32], (shift, 1.0 + shift), q_n=lambda n, d: -shift, dn_table=dn, **kw)
    np.testing.assert_allclose(moved.column("mean_dnP"), base.column("mean_dnP"), rtol=1e-12)


def test_cllt_rejects_bad_interval():
    with pytest.raises(ValidationError):
        cllt_check(0.85, [4], (1, 0))
