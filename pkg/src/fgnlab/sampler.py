"""Exact samplers for fractional Gaussian noise and its partial sums.

Two exact methods are provided: a Cholesky factor of the n x n covariance
(small n) and the circulant embedding of Davies and Harte (any n, O(n log n)).
Random draws are keyed by :class:`RngSeed`: replication ``r`` of a batch uses
stream ``seed.stream + r`` so batches can be split across workers without
changing a single number.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numba
import numpy as np
from scipy import linalg
from scipy.fft import irfft, rfft

from . import _io
from .errors import CholeskyFailure, EmbeddingNotPSD, ValidationError
from .fgn_model import HurstParam, autocovariance

__all__ = [
    "RngSeed",
    "FgnPath",
    "sample_cholesky",
    "sample_circulant",
    "sample_cholesky_batch",
    "sample_circulant_batch",
    "partial_sums",
    "circulant_eigenvalues",
    "CHOLESKY_CAP",
    "COMPENSATED_THRESHOLD",
]

CHOLESKY_CAP = 4096
COMPENSATED_THRESHOLD = 2**12
EMBEDDING_TOL = -1e-9
_U64 = 2**64


@dataclass(frozen=True)
class RngSeed:
    """Counter-style seed: ``(seed, stream)`` fixes every draw."""

    seed: int
    stream: int = 0

    def __post_init__(self):
        for name in ("seed", "stream"):
            val = getattr(self, name)
            if not isinstance(val, (int, np.integer)) or not 0 <= int(val) < _U64:
                raise ValidationError(f"{name} must be an unsigned 64-bit integer, got {val!r}")

    def generator(self, offset: int = 0, purpose: int = 0) -> np.random.Generator:
        """Generator for stream ``stream + offset``; ``purpose`` separates independent uses."""
        key = (int(self.stream) + offset,) if purpose == 0 else (int(self.stream) + offset, purpose)
        ss = np.random.SeedSequence(int(self.seed), spawn_key=key)
        return np.random.Generator(np.random.Philox(ss))

    def spawn(self, offset: int) -> "RngSeed":
        return RngSeed(self.seed, int(self.stream) + offset)


@dataclass(frozen=True)
class FgnPath:
    h: HurstParam
    increments: np.ndarray = field(repr=False)
    partial_sums: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.increments.shape != self.partial_sums.shape:
            raise ValidationError("increments and partial_sums must have equal length")

    @property
    def n(self) -> int:
        return self.increments.size

    def to_csv(self, path_or_buf) -> None:
        rows = zip(range(1, self.n + 1), self.increments, self.partial_sums)
        _io.write_csv(path_or_buf, ["index", "X", "S"], rows, comments={"h": self.h.h, "n": self.n})

    def to_binary(self, path) -> None:
        _io.write_fgn_binary(path, self.h.h, self.increments)

    @classmethod
    def from_binary(cls, path) -> "FgnPath":
        h, x = _io.read_fgn_binary(path)
        return cls(HurstParam(h), x, partial_sums(x))


# --------------------------------------------------------------------------
# partial sums


@numba.njit(cache=True)
def _kahan_prefix(x):
    out = np.empty_like(x)
    for r in range(x.shape[0]):
        s = 0.0
        comp = 0.0
        for j in range(x.shape[1]):
            y = x[r, j] - comp
            t = s + y
            comp = (t - s) - y
            s = t
            out[r, j] = s
    return out


def partial_sums(increments) -> np.ndarray:
    """Prefix sums along the last axis; compensated above 2^12 terms."""
    x = np.asarray(increments, dtype=float)
    if x.size == 0 or x.shape[-1] == 0:
        raise ValidationError("partial_sums needs a nonempty sequence")
    if x.shape[-1] <= COMPENSATED_THRESHOLD:
        return np.cumsum(x, axis=-1)
    flat = np.ascontiguousarray(x.reshape(-1, x.shape[-1]))
    return _kahan_prefix(flat).reshape(x.shape)


# --------------------------------------------------------------------------
# Cholesky


@lru_cache(maxsize=16)
def _cholesky_factor(h: float, n: int) -> np.ndarray:
    cov = linalg.toeplitz(autocovariance(h, np.arange(n)))
    try:
        return linalg.cholesky(cov, lower=True, check_finite=False)
    except linalg.LinAlgError as exc:
        raise CholeskyFailure(f"covariance not positive definite for h={h}, n={n}") from exc


def _check_n(n, cap=None):
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValidationError(f"path length must be a positive integer, got {n!r}")
    if cap is not None and n > cap:
        raise ValidationError(f"Cholesky sampler is capped at n={cap}, got {n}")


def sample_cholesky_batch(h, n: int, seed: RngSeed, reps: int, start: int = 0) -> np.ndarray:
    """``reps`` independent fGn vectors (rows); row ``r`` uses stream ``start + r``."""
    hp = HurstParam.coerce(h)
    _check_n(n, CHOLESKY_CAP)
    L = _cholesky_factor(hp.h, int(n))
    z = np.stack([seed.generator(start + r).standard_normal(n) for r in range(reps)])
    return z @ L.T


def sample_cholesky(h, n: int, seed: RngSeed) -> FgnPath:
    x = sample_cholesky_batch(h, n, seed, 1)[0]
    return FgnPath(HurstParam.coerce(h), x, partial_sums(x))


# --------------------------------------------------------------------------
# circulant embedding


@lru_cache(maxsize=16)
def _embedding(h: float, n: int):
    b = autocovariance(h, np.arange(n + 1))
    row = np.concatenate([b, b[n - 1:0:-1]])
    eig = rfft(row).real
    if eig.min() < EMBEDDING_TOL:
        raise EmbeddingNotPSD(f"circulant eigenvalue {eig.min():.3e} < {EMBEDDING_TOL:g} (h={h}, n={n})")
    eig = np.clip(eig, 0.0, None)
    # weights turning 2n standard normals into the Hermitian spectrum
    m = 2 * n
    scale = np.sqrt(eig * m / 2.0)
    scale[0] = np.sqrt(eig[0] * m)
    scale[-1] = np.sqrt(eig[-1] * m)
    scale.setflags(write=False)
    return scale


def circulant_eigenvalues(h, n: int) -> np.ndarray:
    """Eigenvalues of the size-2n circulant embedding (unclipped)."""
    hp = HurstParam.coerce(h)
    _check_n(n)
    b = autocovariance(hp.h, np.arange(n + 1))
    return rfft(np.concatenate([b, b[n - 1:0:-1]])).real


def _circulant_map(scale, z):
    """Linear map from ``(..., 2n)`` standard normals to ``(..., n)`` fGn draws."""
    m = z.shape[-1]
    n = m // 2
    spec = np.empty(z.shape[:-1] + (n + 1,), dtype=complex)
    spec[..., 0] = z[..., 0]
    spec[..., n] = z[..., 1]
    spec[..., 1:n] = z[..., 2:m:2] + 1j * z[..., 3:m:2]
    spec *= scale
    return irfft(spec, n=m, axis=-1)[..., :n]


def sample_circulant_batch(h, n: int, seed: RngSeed, reps: int, start: int = 0) -> np.ndarray:
    """``reps`` exact fGn vectors by circulant embedding; row ``r`` uses stream ``start + r``."""
    hp = HurstParam.coerce(h)
    _check_n(n)
    scale = _embedding(hp.h, int(n))
    z = np.stack([seed.generator(start + r).standard_normal(2 * n) for r in range(reps)])
    return _circulant_map(scale, z)


def sample_circulant(h, n: int, seed: RngSeed) -> FgnPath:
    x = sample_circulant_batch(h, n, seed, 1)[0]
    return FgnPath(HurstParam.coerce(h), x, partial_sums(x))
