"""Symmetric positive definite Toeplitz linear algebra.

Matrices are held by their first row.  Solves go through the Levinson
recursion (O(k^2) time, O(k) memory); repeated solves against one matrix can
use the Gohberg-Semencul representation of the inverse, which costs a few
FFTs per application once a single Levinson solve has been done.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numba
import numpy as np
from scipy import linalg
from scipy.fft import irfft, next_fast_len, rfft
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, eigsh

from .errors import (
    IllConditioned,
    MaxTermsExceeded,
    NoConvergence,
    NotContractive,
    ValidationError,
)

__all__ = [
    "SymmetricToeplitz",
    "NeumannConfig",
    "NeumannResult",
    "EigenExtremes",
    "matvec",
    "dense_matvec",
    "levinson_solve",
    "neumann_quadratic_form",
    "eigen_extremes",
    "ILL_CONDITIONED_THRESHOLD",
    "FFT_CROSSOVER",
]

ILL_CONDITIONED_THRESHOLD = 1e-13
FFT_CROSSOVER = 512


class SymmetricToeplitz:
    """k x k symmetric Toeplitz matrix ``T[i, j] = first_row[|i - j|]``."""

    def __init__(self, first_row):
        row = np.array(first_row, dtype=float).ravel()
        if row.size == 0:
            raise ValidationError("first_row must be nonempty")
        if not row[0] > 0:
            raise ValidationError("first_row[0] must be positive")
        if not np.all(np.isfinite(row)):
            raise ValidationError("first_row must be finite")
        row.setflags(write=False)
        self._row = row

    @classmethod
    def fgn(cls, h, k: int) -> "SymmetricToeplitz":
        """Covariance matrix of ``k`` consecutive fGn increments."""
        from .fgn_model import autocovariance

        if k < 1:
            raise ValidationError("k must be >= 1")
        return cls(autocovariance(h, np.arange(k)))

    @property
    def first_row(self) -> np.ndarray:
        return self._row

    @property
    def dim(self) -> int:
        return self._row.size

    def __repr__(self):
        return f"SymmetricToeplitz(dim={self.dim})"

    def dense(self) -> np.ndarray:
        return linalg.toeplitz(self._row)

    @cached_property
    def _circulant_spectrum(self):
        k = self.dim
        size = next_fast_len(2 * k, real=True)
        col = np.zeros(size)
        col[:k] = self._row
        col[size - k + 1:] = self._row[:0:-1]
        return size, rfft(col)

    def matvec(self, v) -> np.ndarray:
        return matvec(self, v)

    def solve(self, rhs) -> np.ndarray:
        return levinson_solve(self, rhs)

    @cached_property
    def inverse(self) -> "ToeplitzInverse":
        return ToeplitzInverse(self)


def dense_matvec(T: SymmetricToeplitz, v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    if v.shape[0] != T.dim:
        raise ValidationError(f"dimension mismatch: matrix {T.dim}, vector {v.shape[0]}")
    return T.dense() @ v


def matvec(T: SymmetricToeplitz, v, *, crossover: int = FFT_CROSSOVER) -> np.ndarray:
    """``T @ v``; columns of a 2-D ``v`` are multiplied independently.

    Above ``crossover`` the product is formed by circulant embedding and FFT.
    """
    v = np.asarray(v, dtype=float)
    if v.ndim not in (1, 2) or v.shape[0] != T.dim:
        raise ValidationError(f"dimension mismatch: matrix {T.dim}, vector shape {v.shape}")
    if T.dim <= crossover:
        return T.dense() @ v
    size, spec = T._circulant_spectrum
    if v.ndim == 2:
        spec = spec[:, None]
    prod = irfft(spec * rfft(v, n=size, axis=0), n=size, axis=0)
    return prod[: T.dim]


# --------------------------------------------------------------------------
# Levinson recursion


@numba.njit(cache=True)
def _levinson_core(r, b, threshold):
    # r: normalised first row (r[0] == 1), b: rhs.  Golub & Van Loan 4.7.2.
    n = r.size
    x = np.zeros(n)
    y = np.zeros(n)
    z = np.empty(n)
    x[0] = b[0]
    if n == 1:
        return x, 1.0, -1
    y[0] = -r[1]
    alpha = -r[1]
    beta = 1.0
    min_beta = 1.0
    for k in range(1, n):
        beta = (1.0 - alpha * alpha) * beta
        if beta < min_beta:
            min_beta = beta
        if not beta > threshold:
            return x, beta, k
        acc = 0.0
        for i in range(k):
            acc += r[i + 1] * x[k - 1 - i]
        mu = (b[k] - acc) / beta
        for i in range(k):
            x[i] += mu * y[k - 1 - i]
        x[k] = mu
        if k < n - 1:
            acc = 0.0
            for i in range(k):
                acc += r[i + 1] * y[k - 1 - i]
            alpha = (-r[k + 1] - acc) / beta
            for i in range(k):
                z[i] = y[i] + alpha * y[k - 1 - i]
            for i in range(k):
                y[i] = z[i]
            y[k] = alpha
    return x, min_beta, -1


def levinson_solve(T: SymmetricToeplitz, rhs, *, threshold: float = ILL_CONDITIONED_THRESHOLD) -> np.ndarray:
    """Solve ``T x = rhs`` by the Levinson recursion.

    Raises :class:`IllConditioned` as soon as a normalised prediction-error
    variance drops to ``threshold`` or below, which also catches matrices
    that are not positive definite.
    """
    rhs = np.asarray(rhs, dtype=float)
    if rhs.ndim == 2:
        return np.column_stack([levinson_solve(T, col, threshold=threshold) for col in rhs.T])
    if rhs.shape != (T.dim,):
        raise ValidationError(f"dimension mismatch: matrix {T.dim}, rhs shape {rhs.shape}")
    r0 = T.first_row[0]
    x, beta, step = _levinson_core(T.first_row / r0, rhs / r0, threshold)
    if step >= 0:
        raise IllConditioned(
            f"Levinson prediction-error variance {beta:.3e} <= {threshold:.0e} at order {step}"
        )
    return x


class ToeplitzInverse:
    """Gohberg-Semencul form of ``T^{-1}``, applied with FFT convolutions.

    With ``u = T^{-1} e_1``,
    ``T^{-1} = (L(u) L(u)^T - L(w) L(w)^T) / u_0`` where ``L(.)`` is the lower
    triangular Toeplitz matrix with the given first column and
    ``w = (0, u_{k-1}, ..., u_1)``.
    """

    def __init__(self, T: SymmetricToeplitz):
        k = T.dim
        e1 = np.zeros(k)
        e1[0] = 1.0
        u = levinson_solve(T, e1)
        w = np.zeros(k)
        w[1:] = u[:0:-1]
        self.dim = k
        self._scale = 1.0 / u[0]
        self._size = next_fast_len(2 * k, real=True)
        self._fu = rfft(u, n=self._size)
        self._fw = rfft(w, n=self._size)

    def _lower(self, fcol, v):
        spec = fcol if v.ndim == 1 else fcol[:, None]
        return irfft(spec * rfft(v, n=self._size, axis=0), n=self._size, axis=0)[: self.dim]

    def _upper(self, fcol, v):
        return self._lower(fcol, v[::-1])[::-1]

    def __matmul__(self, v):
        return self.apply(v)

    def apply(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if v.shape[0] != self.dim:
            raise ValidationError("dimension mismatch")
        first = self._lower(self._fu, self._upper(self._fu, v))
        second = self._lower(self._fw, self._upper(self._fw, v))
        return self._scale * (first - second)


# --------------------------------------------------------------------------
# eigenvalue extremes


@dataclass(frozen=True)
class EigenExtremes:
    lambda_min: float
    lambda_max: float
    residual_min: float
    residual_max: float
    iterations_max: int


def _power_iteration(T, tol, maxiter):
    v = np.ones(T.dim) / math.sqrt(T.dim)
    theta = 0.0
    for it in range(1, maxiter + 1):
        w = matvec(T, v)
        theta = float(v @ w)
        resid = np.linalg.norm(w - theta * v)
        if resid <= tol * abs(theta):
            return theta, resid / abs(theta), it
        v = w / np.linalg.norm(w)
    raise NoConvergence(f"power iteration did not reach tol={tol:g} in {maxiter} steps")


def _smallest_by_shift_invert(T, tol, maxiter):
    # Lanczos on T^{-1} (shift 0); each application is one Gohberg-Semencul solve.
    k = T.dim
    if k <= 2:
        vals, vecs = np.linalg.eigh(T.dense())
        return float(vals[0]), vecs[:, 0]
    inv = T.inverse
    op = LinearOperator((k, k), matvec=inv.apply, dtype=float)
    # a start vector with no symmetry: eigenvectors of a symmetric Toeplitz
    # matrix are symmetric or skew, and a symmetric start would miss half
    v0 = np.random.default_rng(k).standard_normal(k)
    try:
        vals, vecs = eigsh(op, k=1, which="LA", tol=tol * 1e-2, maxiter=maxiter, v0=v0,
                           ncv=min(k - 1, 64))
    except ArpackNoConvergence as exc:
        raise NoConvergence(f"shift-invert Lanczos failed for k={k}") from exc
    return 1.0 / float(vals[0]), vecs[:, 0]


def eigen_extremes(T: SymmetricToeplitz, tol: float = 1e-8, maxiter: int = 20000) -> EigenExtremes:
    """Largest and smallest eigenvalue of ``T``.

    The largest comes from power iteration; the smallest from shift-invert
    Lanczos at shift 0 using Levinson-based solves.  Both are certified by the
    relative Rayleigh-quotient residual ``||T v - lambda v|| / lambda <= tol``.
    """
    if tol <= 0:
        raise ValidationError("tol must be positive")
    if T.dim == 1:
        val = float(T.first_row[0])
        return EigenExtremes(val, val, 0.0, 0.0, 0)
    lam_max, res_max, iters = _power_iteration(T, tol, maxiter)
    lam_min, vec = _smallest_by_shift_invert(T, tol, maxiter)
    vec = vec / np.linalg.norm(vec)
    lam_min = float(vec @ matvec(T, vec))
    res_min = float(np.linalg.norm(matvec(T, vec) - lam_min * vec)) / lam_min
    if res_min > tol:
        raise NoConvergence(f"smallest eigenvalue residual {res_min:.2e} exceeds tol={tol:g}")
    return EigenExtremes(lam_min, lam_max, res_min, res_max, iters)


# --------------------------------------------------------------------------
# Neumann series for B^T T^{-1} B


@dataclass(frozen=True)
class NeumannConfig:
    """Settings for the Neumann-series quadratic form.

    With ``m_scale`` unset the scaling is ``c = 1 / lambda_max``.  Setting it
    selects ``c(k) = 1 / (m k^{2H-1})``, which needs ``hurst``.
    """

    m_scale: float | None = None
    max_terms: int = 200_000
    rel_tol: float = 1e-10
    hurst: float | None = None

    def __post_init__(self):
        if self.m_scale is not None:
            if not self.m_scale > 0:
                raise ValidationError("m_scale must be positive")
            if self.hurst is None:
                raise ValidationError("the c(k) = 1/(m k^(2H-1)) form needs hurst")
        if self.max_terms < 1 or not self.rel_tol > 0:
            raise ValidationError("max_terms and rel_tol must be positive")

    def scaling(self, k: int, lambda_max: float) -> float:
        if self.m_scale is None:
            return 1.0 / lambda_max
        return 1.0 / (self.m_scale * k ** (2.0 * self.hurst - 1.0))


@dataclass(frozen=True)
class NeumannResult:
    value: float
    terms_used: int
    term_decay_rate: float
    c: float
    spectral_radius: float


def neumann_quadratic_form(T: SymmetricToeplitz, B, cfg: NeumannConfig = NeumannConfig(),
                           extremes: EigenExtremes | None = None) -> NeumannResult:
    """``B^T T^{-1} B = c sum_l B^T (I - c T)^l B`` summed until the tail is negligible.

    Iterates ``V <- V - c T V`` from ``V = B``.  Stops once the certified tail
    bound ``c ||B|| ||V|| rho / (1 - rho)`` is at most ``rel_tol`` times the
    running sum, with ``rho = ||I - c T||_2``.
    """
    B = np.asarray(B, dtype=float)
    if B.shape != (T.dim,):
        raise ValidationError("B must match the matrix dimension")
    ext = extremes if extremes is not None else eigen_extremes(T)
    c = cfg.scaling(T.dim, ext.lambda_max)
    rho = max(abs(1.0 - c * ext.lambda_min), abs(1.0 - c * ext.lambda_max))
    if rho >= 1.0:
        raise NotContractive(f"||I - c T||_2 = {rho:.6f} >= 1 (c = {c:.3e})")
    norm_b = float(np.linalg.norm(B))
    if norm_b == 0.0:
        return NeumannResult(0.0, 1, 0.0, c, rho)
    V = B.copy()
    total = 0.0
    terms = []
    for l in range(cfg.max_terms):
        t = float(B @ V)
        terms.append(t)
        total += t
        V = V - c * matvec(T, V)
        tail = norm_b * float(np.linalg.norm(V)) / (1.0 - rho)
        if tail <= cfg.rel_tol * abs(total):
            return NeumannResult(c * total, l + 1, _decay_rate(terms), c, rho)
    raise MaxTermsExceeded(f"Neumann series not converged after {cfg.max_terms} terms")


def _decay_rate(terms) -> float:
    """Geometric ratio fitted to the second half of the nonzero term magnitudes."""
    mags = np.abs(np.asarray(terms))
    mags = mags[mags > 0]
    if mags.size < 4:
        return 0.0
    tail = mags[mags.size // 2:]
    slope = np.polyfit(np.arange(tail.size), np.log(tail), 1)[0]
    return float(math.exp(slope))
