"""Covariance structure of discrete-time fractional Gaussian noise.

The increments ``X_j = B^H(j) - B^H(j-1)`` of fractional Brownian motion form a
stationary Gaussian sequence with unit variance and autocovariance

    b(t) = ((t+1)^{2H} - 2 t^{2H} + |t-1|^{2H}) / 2.

Everything here is a pure function of the Hurst exponent.  Second differences
of ``u -> u^{2H}`` lose digits quickly when the arguments are large, so far
from the origin they are evaluated through an even-order binomial series whose
terms are all positive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import integrate, special

from .errors import ValidationError

__all__ = [
    "HurstParam",
    "CovarianceSeq",
    "SpectralDensityParams",
    "autocovariance",
    "covariance_seq",
    "b_vector",
    "partial_sum_variance",
    "partial_sum_variance_bruteforce",
    "spectral_params",
    "spectral_density",
    "spectral_minimum",
    "analytic_spectral_constant",
]

# Ratio (half-width / centre) below which the series form is used.
_SERIES_RATIO = 0.25
_SERIES_TERMS = 16


@dataclass(frozen=True)
class HurstParam:
    """Validated Hurst exponent.

    Admits ``0.5 <= h < 1``.  The boundary value 0.5 (independent increments)
    is accepted as a reference case; it has ``brownian`` set and every
    long-memory quantity degenerates to its trivial value.
    """

    h: float

    def __post_init__(self):
        h = float(self.h)
        if not (0.5 <= h < 1.0) or math.isnan(h):
            raise ValidationError(f"Hurst exponent must satisfy 1/2 <= h < 1, got {self.h!r}")
        object.__setattr__(self, "h", h)

    @property
    def cllt_regime(self) -> bool:
        return self.h > 0.75

    @property
    def brownian(self) -> bool:
        return self.h == 0.5

    @property
    def alpha(self) -> float:
        """Mittag-Leffler index ``1 - h`` attached to this exponent."""
        return 1.0 - self.h

    @classmethod
    def coerce(cls, h) -> "HurstParam":
        return h if isinstance(h, cls) else cls(h)


def _hurst(h) -> float:
    return HurstParam.coerce(h).h


@lru_cache(maxsize=64)
def _even_binomials(two_h: float) -> np.ndarray:
    j = 2 * np.arange(1, _SERIES_TERMS + 1)
    return special.binom(two_h, j)


def _mixed_difference_series(u, m, H):
    """Series for ``((u+m+1/2)^{2H} - (u+m-1/2)^{2H} - (u-m+1/2)^{2H} + (u-m-1/2)^{2H}) / 2``.

    Only even orders survive; valid for ``m + 1/2 < u``.
    """
    coef = _even_binomials(2.0 * H)
    u = np.asarray(u, dtype=float)
    m = np.asarray(m, dtype=float)
    hi = (m + 0.5) / u
    lo = (m - 0.5) / u
    total = np.zeros(np.broadcast(u, m).shape)
    hi_pow = np.ones_like(total)
    lo_pow = np.ones_like(total)
    for c in coef:
        hi_pow = hi_pow * hi * hi
        lo_pow = lo_pow * lo * lo
        total = total + c * (hi_pow - lo_pow)
    return u ** (2.0 * H) * total


def autocovariance(h, t):
    """Autocovariance ``b(t)`` of unit-variance fGn at lag ``t >= 0``.

    Accepts scalars or arrays; returns a float for scalar input.
    """
    H = _hurst(h)
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0) or np.any(np.isnan(t_arr)):
        raise ValidationError("autocovariance lag must be nonnegative")
    out = np.empty(t_arr.shape)
    far = t_arr >= 1.0 / _SERIES_RATIO
    near = ~far
    tn = t_arr[near]
    two_h = 2.0 * H
    out[near] = 0.5 * ((tn + 1.0) ** two_h - 2.0 * tn**two_h + np.abs(tn - 1.0) ** two_h)
    if np.any(far):
        out[far] = _mixed_difference_series(t_arr[far], 0.5, H)
    if out.ndim == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class CovarianceSeq:
    """Autocovariances ``b(0), ..., b(t_max)``."""

    h: HurstParam
    values: np.ndarray = field(repr=False)

    @property
    def t_max(self) -> int:
        return len(self.values) - 1

    def to_csv(self, path_or_buf) -> None:
        from ._io import write_csv

        rows = ((t, v) for t, v in enumerate(self.values))
        write_csv(path_or_buf, ["t", "b_t"], rows)


def covariance_seq(h, t_max: int) -> CovarianceSeq:
    if t_max < 0:
        raise ValidationError("t_max must be nonnegative")
    hp = HurstParam.coerce(h)
    vals = autocovariance(hp, np.arange(t_max + 1))
    vals.setflags(write=False)
    return CovarianceSeq(hp, vals)


def _first_difference(u, H):
    # u^{2H} - (u-1)^{2H} for u >= 1
    u = np.asarray(u, dtype=float)
    with np.errstate(divide="ignore"):
        d = -(u ** (2.0 * H)) * np.expm1(2.0 * H * np.log1p(-1.0 / u))
    return np.where(u == 1.0, 1.0, d)


def b_vector(h, n: int, k: int) -> np.ndarray:
    """Cross-covariance vector ``B(s) = sum_{i=s}^{n+s-1} b(i)``, ``s = 1..k``.

    ``B`` is the covariance between ``S_n`` and the future increments
    ``X_{n+s}``.  Uses the telescoped form
    ``((n+s)^{2H} - (n+s-1)^{2H} - s^{2H} + (s-1)^{2H}) / 2``.
    """
    H = _hurst(h)
    if n < 1 or k < 1:
        raise ValidationError("b_vector needs n >= 1 and k >= 1")
    if H == 0.5:
        return np.zeros(k)
    s = np.arange(1, k + 1, dtype=float)
    centre = s + (n - 1) / 2.0
    half = n / 2.0
    out = np.empty(k)
    far = (half + 0.5) <= _SERIES_RATIO * centre
    near = ~far
    sn = s[near]
    out[near] = 0.5 * (_first_difference(n + sn, H) - _first_difference(sn, H))
    if np.any(far):
        out[far] = _mixed_difference_series(centre[far], half, H)
    return out


def partial_sum_variance(h, n: int) -> float:
    """``Var(S_n) = n^{2H}`` (self-similarity of fBm)."""
    if n < 1:
        raise ValidationError("n must be >= 1")
    return float(n) ** (2.0 * _hurst(h))


def partial_sum_variance_bruteforce(h, n: int) -> float:
    """``e Sigma_11 e^T`` by direct summation; O(n) using lag multiplicities."""
    if n < 1:
        raise ValidationError("n must be >= 1")
    b = autocovariance(h, np.arange(n))
    weights = np.concatenate(([n], 2.0 * np.arange(n - 1, 0, -1)))
    return math.fsum(weights * b)


# --------------------------------------------------------------------------
# spectral density


@dataclass(frozen=True)
class SpectralDensityParams:
    h: HurstParam
    mode_truncation: int = 200
    normalization_c: float = 1.0


def _spectral_shape(lam, H, M):
    lam = np.asarray(lam, dtype=float)
    m = np.arange(-M, M + 1, dtype=float)
    expo = -(1.0 + 2.0 * H)
    alias = np.sum(np.abs(lam[..., None] + m) ** expo, axis=-1)
    # tail |m| > M replaced by the integral over [M+1/2, inf)
    tail = ((M + 0.5 + lam) ** (-2.0 * H) + (M + 0.5 - lam) ** (-2.0 * H)) / (2.0 * H)
    return (1.0 - np.cos(2.0 * np.pi * lam)) * (alias + tail)


def analytic_spectral_constant(h) -> float:
    """Closed-form normalisation ``2 Gamma(2H+1) sin(pi H) / (2 pi)^{2H+1}``."""
    H = _hurst(h)
    return 2.0 * math.gamma(2.0 * H + 1.0) * math.sin(math.pi * H) / (2.0 * math.pi) ** (2.0 * H + 1.0)


def spectral_params(h, mode_truncation: int = 200) -> SpectralDensityParams:
    """Build spectral parameters with ``C`` fixed by ``int f = b(0) = 1``."""
    hp = HurstParam.coerce(h)
    if mode_truncation < 1:
        raise ValidationError("mode_truncation must be positive")
    M = int(mode_truncation)

    # the m = 0 alias term behaves like lambda^{1-2H} at the origin
    sing = 1.0 - 2.0 * hp.h

    def regular_part(x):
        if x == 0.0:
            return 2.0 * math.pi**2
        return float(_spectral_shape(np.array([x]), hp.h, M)[0]) / x**sing

    mass, _ = integrate.quad(regular_part, 0.0, 0.5, weight="alg", wvar=(sing, 0.0), limit=400)
    return SpectralDensityParams(hp, M, 1.0 / (2.0 * mass))


def spectral_density(params: SpectralDensityParams, lam):
    """Spectral density ``f(lambda)`` on ``0 < |lambda| < 1/2``."""
    lam_arr = np.asarray(lam, dtype=float)
    if np.any(lam_arr == 0.0):
        raise ValidationError("spectral density has a pole at lambda = 0")
    if np.any(np.abs(lam_arr) >= 0.5):
        raise ValidationError("lambda must lie in (-1/2, 1/2)")
    out = params.normalization_c * _spectral_shape(np.atleast_1d(lam_arr), params.h.h, params.mode_truncation)
    if lam_arr.ndim == 0:
        return float(out[0])
    return out.reshape(lam_arr.shape)


def spectral_minimum(params: SpectralDensityParams, grid_size: int = 4096) -> float:
    """Minimum of ``f`` over a uniform grid on ``(0, 1/2)`` (an essinf proxy)."""
    lam = (np.arange(1, grid_size + 1) - 0.5) / (2.0 * grid_size)
    lam = np.append(lam, 0.5 - 1e-12)
    return float(np.min(spectral_density(params, lam)))
