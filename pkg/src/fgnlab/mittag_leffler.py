"""Mean-one Mittag-Leffler law: moments, exact sampling and KS distances.

``Y = Gamma(1 + alpha) * S^{-alpha}`` where ``S`` is positive alpha-stable
with Laplace transform ``exp(-s^alpha)``.  Then
``E[Y^p] = p! Gamma(1 + alpha)^p / Gamma(1 + p alpha)``, so ``E[Y] = 1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from . import _io
from .errors import ValidationError
from .sampler import RngSeed

__all__ = [
    "MlfIndex",
    "MlfSample",
    "ReferenceCdf",
    "moment",
    "sample",
    "stable_inverse_power",
    "ks_distance",
    "ks_critical_value",
    "reference_cdf",
]


@dataclass(frozen=True)
class MlfIndex:
    alpha: float

    def __post_init__(self):
        a = float(self.alpha)
        if not 0.0 < a <= 1.0:
            raise ValidationError(f"Mittag-Leffler index must lie in (0, 1], got {self.alpha!r}")
        object.__setattr__(self, "alpha", a)

    @classmethod
    def from_hurst(cls, h) -> "MlfIndex":
        from .fgn_model import HurstParam

        return cls(HurstParam.coerce(h).alpha)

    @classmethod
    def coerce(cls, alpha) -> "MlfIndex":
        return alpha if isinstance(alpha, cls) else cls(alpha)


@dataclass(frozen=True)
class MlfSample:
    alpha: MlfIndex
    values: np.ndarray = field(repr=False)
    seed: RngSeed

    @property
    def count(self) -> int:
        return self.values.size

    def standard_error(self, p: int = 1) -> float:
        y = self.values**p
        return float(y.std(ddof=1) / math.sqrt(y.size))


def moment(alpha, p: int) -> float:
    """``E[Y^p] = p! Gamma(1+alpha)^p / Gamma(1+p alpha)``."""
    a = MlfIndex.coerce(alpha).alpha
    if p < 1 or int(p) != p:
        raise ValidationError("moment order must be a positive integer")
    logm = special.gammaln(p + 1.0) + p * special.gammaln(1.0 + a) - special.gammaln(1.0 + p * a)
    return float(np.exp(logm))


def stable_inverse_power(alpha: float, u, e):
    """``S^{-alpha}`` for Kanter's representation of a positive stable ``S``.

    ``u`` is uniform on (0, pi) and ``e`` unit exponential.  Written directly
    for the negative power to stay finite for small alpha.
    """
    a = alpha
    return (np.sin(u) / np.sin(a * u) ** a) * (e / np.sin((1.0 - a) * u)) ** (1.0 - a)


def sample(alpha, count: int, seed: RngSeed) -> MlfSample:
    """Draw ``count`` mean-one Mittag-Leffler variates."""
    idx = MlfIndex.coerce(alpha)
    if count < 1:
        raise ValidationError("count must be >= 1")
    a = idx.alpha
    if a == 1.0:
        return MlfSample(idx, np.ones(count), seed)
    rng = seed.generator()
    # open interval: 0 would give sin(u) = 0
    u = math.pi * (1.0 - rng.random(count))
    e = rng.standard_exponential(count)
    y = math.gamma(1.0 + a) * stable_inverse_power(a, u, e)
    return MlfSample(idx, y, seed)


# --------------------------------------------------------------------------
# Kolmogorov-Smirnov


@dataclass(frozen=True)
class ReferenceCdf:
    """Empirical CDF table with its Dvoretzky-Kiefer-Wolfowitz error band."""

    alpha: float
    y: np.ndarray = field(repr=False)
    cdf: np.ndarray = field(repr=False)
    count: int
    seed: RngSeed
    dkw_epsilon: float

    def __call__(self, x):
        return np.interp(x, self.y, self.cdf, left=0.0, right=1.0)

    def to_csv(self, path_or_buf) -> None:
        meta = {"alpha": self.alpha, "count": self.count, "seed": self.seed.seed,
                "stream": self.seed.stream, "dkw_epsilon": self.dkw_epsilon}
        _io.write_csv(path_or_buf, ["y", "F(y)"], zip(self.y, self.cdf), comments=meta)


def reference_cdf(alpha, count: int = 10**6, seed: RngSeed = RngSeed(0), *,
                  grid_size: int = 2001, confidence: float = 1e-3) -> ReferenceCdf:
    """Empirical CDF of ``count`` draws, tabulated at ``grid_size`` quantiles."""
    smp = sample(alpha, count, seed)
    vals = np.sort(smp.values)
    probs = np.linspace(0.0, 1.0, grid_size)
    pos = np.minimum((probs * count).astype(int), count - 1)
    y = vals[pos]
    cdf = np.searchsorted(vals, y, side="right") / count
    eps = math.sqrt(math.log(2.0 / confidence) / (2.0 * count))
    return ReferenceCdf(smp.alpha.alpha, y, cdf, count, seed, eps)


def ks_distance(sample_a, sample_b_or_cdf) -> float:
    """Sup distance between the empirical CDF of ``sample_a`` and a sample or CDF.

    ``sample_b_or_cdf`` may be another sample (two-sample statistic), a
    :class:`ReferenceCdf`, or any callable CDF.
    """
    a = np.sort(np.asarray(sample_a, dtype=float).ravel())
    if a.size == 0:
        raise ValidationError("ks_distance needs a nonempty sample")
    if callable(sample_b_or_cdf):
        F = np.clip(np.asarray(sample_b_or_cdf(a), dtype=float), 0.0, 1.0)
        n = a.size
        # evaluate at each jump: just before and at the point
        upper = np.searchsorted(a, a, side="right") / n
        lower = np.searchsorted(a, a, side="left") / n
        return float(max(np.max(np.abs(upper - F)), np.max(np.abs(F - lower))))
    b = np.sort(np.asarray(sample_b_or_cdf, dtype=float).ravel())
    if b.size == 0:
        raise ValidationError("ks_distance needs a nonempty sample")
    pts = np.concatenate([a, b])
    fa = np.searchsorted(a, pts, side="right") / a.size
    fb = np.searchsorted(b, pts, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


def ks_critical_value(n_a: int, n_b: int, significance: float = 1e-3) -> float:
    """Asymptotic two-sample KS threshold ``c(s) sqrt((n_a + n_b) / (n_a n_b))``."""
    c = math.sqrt(-0.5 * math.log(significance / 2.0))
    return c * math.sqrt((n_a + n_b) / (n_a * n_b))
