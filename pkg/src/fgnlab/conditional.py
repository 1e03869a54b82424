"""Gaussian law of the partial sum ``S_n`` given ``k`` future increments.

For the future block ``X_[2] = (X_{n+1}, ..., X_{n+k})`` with covariance
``Sigma_22`` and cross-covariance vector ``B`` (see :func:`fgn_model.b_vector`),

    S_n | X_[2] ~ N(mu, sigma^2),  mu = B^T Sigma_22^{-1} X_[2],
                                   sigma^2 = n^{2H} - B^T Sigma_22^{-1} B.

The quadratic form ``B^T Sigma_22^{-1} B`` is also ``Var(mu)``.  Conditioning
on a longer future can only shrink ``sigma^2``, so ``sigma^2(n, k)`` is
nonincreasing in ``k`` and its limit ``d_n^2`` exists.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import special

from . import _mc
from ._io import Table
from .errors import MissingDn, NoStabilization, ValidationError
from .fgn_model import HurstParam, b_vector, partial_sum_variance
from .sampler import RngSeed, sample_circulant_batch
from .toeplitz import SymmetricToeplitz, eigen_extremes, levinson_solve

__all__ = [
    "ConditionalGaussian",
    "ConditionalLaw",
    "DnEstimate",
    "DnTable",
    "conditional_params",
    "quadratic_form",
    "quadratic_form_decay",
    "estimate_dn",
    "build_dn_table",
    "conditional_mean_vanishing",
    "cllt_check",
    "regime_label",
    "G0",
]

G0 = 1.0 / math.sqrt(2.0 * math.pi)
DEFAULT_K_CAP = 2**14
OUTSIDE_REGIME = "outside theorem regime H <= 3/4"


def regime_label(h) -> str:
    return "theorem regime H > 3/4" if HurstParam.coerce(h).cllt_regime else OUTSIDE_REGIME


def normal_density(x):
    return np.exp(-0.5 * np.square(x)) * G0


@dataclass(frozen=True)
class ConditionalGaussian:
    mu: float
    sigma2: float
    n: int
    k: int

    @property
    def sigma(self) -> float:
        return math.sqrt(self.sigma2)

    def interval_probability(self, lo: float, hi: float) -> float:
        return float(_interval_probability(self.mu, self.sigma, lo, hi))


def _interval_probability(mu, sigma, lo, hi):
    zl = (lo - mu) / sigma
    zh = (hi - mu) / sigma
    # use the upper tail when both ends sit above the mean, for accuracy
    upper = np.minimum(zl, zh) > 0
    direct = special.ndtr(zh) - special.ndtr(zl)
    mirrored = special.ndtr(-zl) - special.ndtr(-zh)
    return np.where(upper, mirrored, direct)


class ConditionalLaw:
    """Precomputed ``Sigma_22^{-1} B`` for fixed ``(h, n, k)``.

    The weight vector is obtained with one Levinson solve; conditional means
    for any number of futures then cost one dot product each.
    """

    def __init__(self, h, n: int, k: int):
        self.h = HurstParam.coerce(h)
        if n < 1 or k < 1:
            raise ValidationError("conditional law needs n >= 1 and k >= 1")
        self.n, self.k = int(n), int(k)
        self.B = b_vector(self.h, self.n, self.k)
        self.total_variance = partial_sum_variance(self.h, self.n)

    @cached_property
    def matrix(self) -> SymmetricToeplitz:
        return SymmetricToeplitz.fgn(self.h, self.k)

    @cached_property
    def weights(self) -> np.ndarray:
        if self.h.brownian:
            return np.zeros(self.k)
        return levinson_solve(self.matrix, self.B)

    @cached_property
    def qform(self) -> float:
        return float(self.B @ self.weights)

    @property
    def sigma2(self) -> float:
        return self.total_variance - self.qform

    def mean(self, future) -> np.ndarray:
        """Conditional mean for one future (1-D) or many (rows of a 2-D array)."""
        x = np.asarray(future, dtype=float)
        if x.shape[-1] != self.k:
            raise ValidationError(f"future must have length k={self.k}, got {x.shape[-1]}")
        return x @ self.weights

    def params(self, future) -> ConditionalGaussian:
        return ConditionalGaussian(float(self.mean(future)), self.sigma2, self.n, self.k)


def conditional_params(h, n: int, future) -> ConditionalGaussian:
    """Law of ``S_n`` given the realised future ``(X_{n+1}, ..., X_{n+k})``."""
    future = np.asarray(future, dtype=float)
    if future.ndim != 1 or future.size < 1:
        raise ValidationError("future must be a nonempty 1-D sequence")
    return ConditionalLaw(h, n, future.size).params(future)


def quadratic_form(h, n: int, k: int) -> float:
    """``B^T Sigma_22^{-1} B`` (explained variance of ``S_n`` by ``k`` future steps)."""
    return ConditionalLaw(h, n, k).qform


def _loglog_fit(x, y):
    """Least-squares slope of log y on log x with its standard error."""
    lx, ly = np.log(x), np.log(y)
    if lx.size < 3:
        slope = float(np.polyfit(lx, ly, 1)[0]) if lx.size == 2 else math.nan
        return slope, math.nan
    (slope, icpt), cov = np.polyfit(lx, ly, 1, cov="unscaled")
    resid = ly - (slope * lx + icpt)
    s2 = float(resid @ resid) / (lx.size - 2)
    return float(slope), math.sqrt(s2 * cov[0, 0])


def quadratic_form_decay(h, n: int, k_grid, *, with_bound: bool = False) -> Table:
    """Tabulate ``B^T Sigma_22^{-1} B`` and ``sigma^2(n, k)`` over ``k_grid``.

    Metadata carries the fitted log-log exponent of the quadratic form with its
    standard error.  ``with_bound`` adds ``||B||^2 / lambda_min(k)``.
    """
    hp = HurstParam.coerce(h)
    ks = sorted(int(k) for k in k_grid)
    if not ks or ks[0] < 1:
        raise ValidationError("k_grid must contain positive integers")
    cols = ["k", "qform", "sigma2"] + (["bound"] if with_bound else [])
    table = Table(cols, meta={"h": hp.h, "n": n, "regime": regime_label(hp)})
    for k in ks:
        law = ConditionalLaw(hp, n, k)
        row = [k, law.qform, law.sigma2]
        if with_bound:
            lam = eigen_extremes(law.matrix).lambda_min
            row.append(float(law.B @ law.B) / lam)
        table.append(row)
    q = table.column("qform")
    if np.all(q > 0) and len(ks) >= 2:
        slope, se = _loglog_fit(np.array(ks, float), q)
    else:
        slope, se = math.nan, math.nan
    table.meta["fitted_exponent"] = slope
    table.meta["exponent_stderr"] = se
    return table


# --------------------------------------------------------------------------
# d_n^2 = lim_k sigma^2(n, k)


@dataclass(frozen=True)
class DnEstimate:
    dn2: float
    k_used: int
    stabilized: bool
    history: tuple = field(default=(), repr=False)


def estimate_dn(h, n: int, rel_tol: float = 1e-3, *, k_start: int = 16,
                k_cap: int = DEFAULT_K_CAP, allow_unstabilized: bool = False) -> DnEstimate:
    """Double ``k`` until ``sigma^2(n, k)`` and ``sigma^2(n, 2k)`` agree to ``rel_tol``.

    Returns ``sigma^2`` at the first ``k`` that passes.  If ``2k`` would exceed
    ``k_cap`` first, raises :class:`NoStabilization`, or with
    ``allow_unstabilized`` returns ``sigma^2(n, k_cap)`` flagged unstabilized
    (an upper bound for ``d_n^2``).
    """
    hp = HurstParam.coerce(h)
    if n < 1:
        raise ValidationError("n must be >= 1")
    if not rel_tol > 0 or k_start < 1 or k_cap < k_start:
        raise ValidationError("need rel_tol > 0 and 1 <= k_start <= k_cap")
    k = int(k_start)
    prev = ConditionalLaw(hp, n, k).sigma2
    history = [(k, prev)]
    while 2 * k <= k_cap:
        cur = ConditionalLaw(hp, n, 2 * k).sigma2
        history.append((2 * k, cur))
        if abs(cur - prev) <= rel_tol * prev:
            return DnEstimate(prev, k, True, tuple(history))
        k *= 2
        prev = cur
    if allow_unstabilized:
        return DnEstimate(prev, k, False, tuple(history))
    raise NoStabilization(f"sigma^2(n={n}, k) still moving at k={k} (cap {k_cap}, rel_tol {rel_tol:g})")


class DnTable:
    """Measured ``d_n^2`` on a set of ``n`` with geometric interpolation.

    ``L(n) = d_n^2 / n^{2H}`` is interpolated linearly in ``log n`` between
    measured points and held at its last measured (plateau) value beyond.
    """

    def __init__(self, h, estimates: dict):
        self.h = HurstParam.coerce(h)
        if not estimates:
            raise MissingDn("empty d_n table")
        self.entries = dict(sorted((int(n), e) for n, e in estimates.items()))
        self._n = np.array(list(self.entries), dtype=float)
        self._l = np.array([e.dn2 / n ** (2 * self.h.h) for n, e in self.entries.items()])

    def l_n(self, n) -> np.ndarray:
        n = np.asarray(n, dtype=float)
        if np.any(n < self._n[0]):
            raise MissingDn(f"d_n requested below the smallest measured n={int(self._n[0])}")
        return np.interp(np.log(n), np.log(self._n), self._l)

    @property
    def plateau(self) -> float:
        """``L`` at the largest stabilized entry (largest entry if none is)."""
        stable = [n for n, e in self.entries.items() if e.stabilized]
        last = stable[-1] if stable else list(self.entries)[-1]
        return float(self._l[list(self.entries).index(last)])

    def dn2(self, n) -> np.ndarray:
        n = np.asarray(n, dtype=float)
        return self.l_n(n) * n ** (2 * self.h.h)

    def dn(self, n) -> np.ndarray:
        return np.sqrt(self.dn2(n))

    def to_table(self) -> Table:
        t = Table(["n", "dn2", "k_used", "l_n", "stabilized"], meta={"h": self.h.h, "plateau_L": self.plateau})
        for (n, e), l in zip(self.entries.items(), self._l):
            t.append([n, e.dn2, e.k_used, l, e.stabilized])
        return t


def build_dn_table(h, n_values, rel_tol: float = 1e-3, *, k_cap: int = DEFAULT_K_CAP,
                   allow_unstabilized: bool = True) -> DnTable:
    hp = HurstParam.coerce(h)
    est = {int(n): estimate_dn(hp, int(n), rel_tol, k_cap=k_cap, allow_unstabilized=allow_unstabilized)
           for n in n_values}
    return DnTable(hp, est)


# --------------------------------------------------------------------------
# Monte Carlo over futures


def _future_chunk(start, count, h, k, seed):
    return sample_circulant_batch(h, k, seed, count, start)


def sample_futures(h, k: int, reps: int, seed: RngSeed, workers: int = 1) -> np.ndarray:
    """``reps`` exact length-``k`` fGn futures (rows); prefixes are exact shorter futures."""
    hp = HurstParam.coerce(h)
    chunk = _mc.chunk_size_for(k)
    return _mc.run_chunks(_future_chunk, reps, chunk, workers, args=(hp.h, int(k), seed))


def conditional_mean_vanishing(h, n: int, k_grid, reps: int, seed: RngSeed, *,
                               workers: int = 1) -> Table:
    """Monte Carlo summary of ``|mu(n, k)| / sigma(n, k)`` over independent futures.

    The same futures (truncated) serve every ``k``.  Besides the ratios the
    table reports the sample variance of ``mu`` next to its exact value, the
    quadratic form, with the normal-theory standard error of a sample variance.
    """
    hp = HurstParam.coerce(h)
    if reps < 100:
        raise ValidationError("conditional_mean_vanishing needs reps >= 100")
    ks = sorted(int(k) for k in k_grid)
    futures = sample_futures(hp, ks[-1], reps, seed, workers)
    table = Table(["k", "mean_abs_ratio", "ratio_se", "max_abs_ratio", "mu_mean", "mu_var", "qform", "mu_var_se"],
                  meta={"h": hp.h, "n": n, "reps": reps, "seed": seed.seed, "stream": seed.stream,
                        "regime": regime_label(hp)})
    for k in ks:
        law = ConditionalLaw(hp, n, k)
        mu = law.mean(futures[:, :k])
        ratio = np.abs(mu) / math.sqrt(law.sigma2)
        q = law.qform
        table.append([k, float(ratio.mean()), float(ratio.std(ddof=1) / math.sqrt(reps)),
                      float(ratio.max()), float(mu.mean()), float(mu.var(ddof=1)), q,
                      q * math.sqrt(2.0 / (reps - 1))])
    return table


def cllt_check(h, n_grid, interval=(0.0, 1.0), kappa: float = 0.0, *, k: int = 2**12, reps: int = 1000,
               seed: RngSeed = RngSeed(0), q_n=None, dn_table: DnTable | None = None,
               workers: int = 1) -> Table:
    """Average of ``d_n P(S_n in (q_n + a, q_n + b) | future)`` over sampled futures.

    ``q_n`` defaults to ``kappa * d_n``; a callable ``q_n(n, d_n)`` overrides
    it.  The target column is ``(b - a) g(kappa)``.  Each conditional
    probability is exact (a difference of normal CDFs); only the futures are
    random, and they are shared across ``n``.
    """
    hp = HurstParam.coerce(h)
    a, b = map(float, interval)
    if not a < b:
        raise ValidationError("interval must satisfy a < b")
    if reps < 1:
        raise ValidationError("reps must be positive")
    ns = sorted(int(n) for n in n_grid)
    if dn_table is None:
        dn_table = build_dn_table(hp, ns)
    futures = sample_futures(hp, k, reps, seed, workers)
    target = (b - a) * float(normal_density(kappa))
    table = Table(["n", "mean_dnP", "sd_dnP", "se_dnP", "target", "abs_error", "rel_error", "dn2", "sigma2", "q_n"],
                  meta={"h": hp.h, "a": a, "b": b, "kappa": kappa, "k": k, "reps": reps, "seed": seed.seed,
                        "stream": seed.stream, "regime": regime_label(hp)})
    for n in ns:
        law = ConditionalLaw(hp, n, k)
        dn = float(dn_table.dn(n))
        q = float(q_n(n, dn)) if q_n is not None else kappa * dn
        vals = dn * _interval_probability(law.mean(futures), math.sqrt(law.sigma2), q + a, q + b)
        mean = float(vals.mean())
        table.append([n, mean, float(vals.std(ddof=1)), float(vals.std(ddof=1) / math.sqrt(reps)), target,
                      abs(mean - target), abs(mean - target) / target, dn * dn, law.sigma2, q])
    return table
