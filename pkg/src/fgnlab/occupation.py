"""Occupation times of fGn partial sums and their Mittag-Leffler comparison.

The smoothed functional averages ``v(l_n([a - x, b - x]) / a_n)`` over paths
and over a translation ``x`` uniform on ``(-eps, eps)``; its reference value is
``E[v((b - a) Y)]`` with ``Y`` mean-one Mittag-Leffler of index ``1 - H``.
The return sequence is ``a_N = sum_{n=1}^N g(0) / d_n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import special

from . import _mc
from ._io import Table
from .conditional import G0, DnTable, regime_label
from .errors import MissingDn, ValidationError
from .fgn_model import HurstParam
from .mittag_leffler import MlfIndex, ks_distance
from .mittag_leffler import sample as mlf_sample
from .sampler import RngSeed, partial_sums, sample_circulant_batch

__all__ = [
    "TEST_FUNCTIONS",
    "OccupationConfig",
    "ReturnSequence",
    "PowerLawDn",
    "OccupationSample",
    "occupation_time",
    "expected_occupation",
    "return_sequence",
    "simulate_occupation",
    "smoothed_functional",
    "mlf_reference",
    "darling_kac_ratio",
    "compare_to_mlf",
    "test_function",
]

TEST_FUNCTIONS = ("const1", "expneg", "capM", "bump")


def test_function(v_id: str, cap_m: float = 10.0):
    """Bounded continuous test function by registry name."""
    if v_id == "const1":
        return lambda t: np.ones_like(np.asarray(t, dtype=float))
    if v_id == "expneg":
        return lambda t: np.exp(-np.asarray(t, dtype=float))
    if v_id == "capM":
        return lambda t: np.minimum(np.asarray(t, dtype=float), cap_m)
    if v_id == "bump":
        return lambda t: 1.0 / (1.0 + np.square(np.asarray(t, dtype=float)))
    raise ValidationError(f"unknown test function {v_id!r}; choose from {TEST_FUNCTIONS}")


test_function.__test__ = False  # not a pytest test


@dataclass(frozen=True)
class OccupationConfig:
    h: HurstParam
    n: int
    interval: tuple = (0.0, 1.0)
    epsilon: float | None = None
    reps: int = 1000
    test_fn: str = "expneg"
    cap_m: float = 10.0
    seed: RngSeed = RngSeed(0)
    phi_theta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "h", HurstParam.coerce(self.h))
        a, b = map(float, self.interval)
        if not a < b:
            raise ValidationError("interval must satisfy a < b")
        object.__setattr__(self, "interval", (a, b))
        if self.epsilon is None:
            object.__setattr__(self, "epsilon", (b - a) / 2.0)
        if not self.epsilon > 0:
            raise ValidationError("epsilon must be positive")
        if self.reps < 100:
            raise ValidationError("reps must be >= 100")
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise ValidationError("n must be a positive integer")
        if not self.cap_m > 0:
            raise ValidationError("cap_m must be positive")
        test_function(self.test_fn, self.cap_m)

    @property
    def width(self) -> float:
        return self.interval[1] - self.interval[0]

    def with_n(self, n: int) -> "OccupationConfig":
        return replace(self, n=int(n))


def occupation_time(partial_sums, interval, offset: float = 0.0):
    """``#{i : S_i + offset in (a, b)}`` (open interval), along the last axis."""
    a, b = interval
    shifted = np.asarray(partial_sums, dtype=float) + offset
    inside = (shifted > a) & (shifted < b)
    counts = inside.sum(axis=-1)
    return int(counts) if np.ndim(counts) == 0 else counts


def expected_occupation(h, n: int, interval) -> float:
    """Exact ``E[l_n((a, b))] = sum_i P(S_i in (a, b))`` with ``S_i ~ N(0, i^{2H})``."""
    H = HurstParam.coerce(h).h
    a, b = interval
    sd = np.arange(1, n + 1, dtype=float) ** H
    return float(np.sum(special.ndtr(b / sd) - special.ndtr(a / sd)))


# --------------------------------------------------------------------------
# return sequence


class PowerLawDn:
    """``d_n^2 = L n^{2H}`` with constant ``L`` (``L = 1`` is the unconditioned scale)."""

    def __init__(self, h, L: float = 1.0):
        self.h = HurstParam.coerce(h)
        self.L = float(L)

    @property
    def plateau(self) -> float:
        return self.L

    def dn(self, n):
        return np.sqrt(self.L) * np.asarray(n, dtype=float) ** self.h.h


@dataclass(frozen=True)
class ReturnSequence:
    h: HurstParam
    values: np.ndarray = field(repr=False)
    plateau: float

    @property
    def N(self) -> int:
        return self.values.size

    def __getitem__(self, n: int) -> float:
        """``a_n`` for ``1 <= n <= N``."""
        if not 1 <= n <= self.N:
            raise MissingDn(f"a_n requested for n={n}, sequence covers 1..{self.N}")
        return float(self.values[n - 1])

    def proxy(self, n) -> np.ndarray:
        """``g(0) n^{1-H} / ((1 - H) sqrt(L))``, the power-law approximation."""
        H = self.h.h
        return G0 * np.asarray(n, dtype=float) ** (1.0 - H) / ((1.0 - H) * math.sqrt(self.plateau))

    def growth_exponent(self, n_lo: int, n_hi: int) -> float:
        ns = np.unique(np.geomspace(n_lo, n_hi, 16).astype(int))
        return float(np.polyfit(np.log(ns), np.log(self.values[ns - 1]), 1)[0])


def return_sequence(h, N: int, dn_table) -> ReturnSequence:
    """``a_m = sum_{n=1}^m g(0) / d_n`` for ``m = 1..N``.

    ``dn_table`` is a :class:`DnTable` (measured, interpolated, plateau beyond
    its range) or a :class:`PowerLawDn`.  The ``n = 0`` term is omitted since
    ``d_0 = 0``.
    """
    hp = HurstParam.coerce(h)
    if dn_table is None:
        raise MissingDn("return_sequence needs a d_n source")
    if N < 1:
        raise ValidationError("N must be >= 1")
    n = np.arange(1, N + 1)
    terms = G0 / dn_table.dn(n)
    values = np.cumsum(terms)
    values.setflags(write=False)
    return ReturnSequence(hp, values, dn_table.plateau)


# --------------------------------------------------------------------------
# Monte Carlo


@dataclass(frozen=True)
class OccupationSample:
    """Per-replication draws: smoothed and unsmoothed counts, shift, first increment."""

    counts: np.ndarray = field(repr=False)
    counts_unsmoothed: np.ndarray = field(repr=False)
    offsets: np.ndarray = field(repr=False)
    first_increment: np.ndarray = field(repr=False)


def _occupation_chunk(start, count, h, n, a, b, eps, seed):
    x = sample_circulant_batch(h, n, seed, count, start)
    s = partial_sums(x)
    offsets = np.array([seed.generator(start + r, purpose=1).uniform(-eps, eps) for r in range(count)])
    out = np.empty((count, 4))
    out[:, 0] = occupation_time(s, (a, b), offsets[:, None])
    out[:, 1] = occupation_time(s, (a, b))
    out[:, 2] = offsets
    out[:, 3] = x[:, 0]
    return out


def simulate_occupation(cfg: OccupationConfig, workers: int = 1) -> OccupationSample:
    a, b = cfg.interval
    chunk = _mc.chunk_size_for(cfg.n)
    arr = _mc.run_chunks(_occupation_chunk, cfg.reps, chunk, workers,
                         args=(cfg.h.h, int(cfg.n), a, b, cfg.epsilon, cfg.seed))
    return OccupationSample(arr[:, 0].astype(np.int64), arr[:, 1].astype(np.int64), arr[:, 2], arr[:, 3])


def _phi_weights(cfg, occ):
    if cfg.phi_theta == 0.0:
        return None
    th = cfg.phi_theta
    return np.exp(th * occ.first_increment - 0.5 * th * th)


def _estimate(values, weights):
    if weights is not None:
        values = values * weights
    mean = float(np.mean(values))
    se = float(np.std(values, ddof=1) / math.sqrt(values.size)) if values.size > 1 else math.nan
    return mean, se


def smoothed_functional(cfg: OccupationConfig, return_seq: ReturnSequence, *, workers: int = 1,
                        occ: OccupationSample | None = None):
    """Monte Carlo estimate of the smoothed functional; returns ``(lhs, standard_error)``.

    One path and one uniform shift per replication.  With ``phi_theta != 0``
    each replication is weighted by the density ``exp(theta X_1 - theta^2/2)``.
    """
    occ = occ if occ is not None else simulate_occupation(cfg, workers)
    v = test_function(cfg.test_fn, cfg.cap_m)
    vals = v(occ.counts / return_seq[cfg.n])
    return _estimate(vals, _phi_weights(cfg, occ))


def mlf_reference(h, width: float, v_id: str, cap_m: float = 10.0, count: int = 10**6,
                  seed: RngSeed = RngSeed(0, 2**32)):
    """``E[v(width * Y)]`` by Monte Carlo; returns ``(mean, se, scaled_sample)``."""
    idx = MlfIndex.from_hurst(h)
    y = width * mlf_sample(idx, count, seed).values
    mean, se = _estimate(test_function(v_id, cap_m)(y), None)
    return mean, se, y


def darling_kac_ratio(cfg: OccupationConfig, return_seq: ReturnSequence, *, workers: int = 1,
                      occ: OccupationSample | None = None):
    """``E[l_n((a, b))] / ((b - a) a_n)`` from unsmoothed counts.

    Returns ``(ratio, standard_error, exact_ratio)`` where the last uses the
    exact expectation of the occupation time.
    """
    occ = occ if occ is not None else simulate_occupation(cfg, workers)
    denom = cfg.width * return_seq[cfg.n]
    mean, se = _estimate(occ.counts_unsmoothed.astype(float), None)
    exact = expected_occupation(cfg.h, cfg.n, cfg.interval)
    return mean / denom, se / denom, exact / denom


def compare_to_mlf(cfg: OccupationConfig, return_seq: ReturnSequence, n_grid=None,
                   v_ids=("expneg", "capM", "bump", "const1"), *, mlf_count: int = 10**6,
                   workers: int = 1) -> Table:
    """Smoothed functional against its Mittag-Leffler reference over an ``n`` grid.

    The leading columns follow the report layout ``h, n, a, b, epsilon, reps,
    v_id, lhs, lhs_se, rhs, rhs_se, ks, seed``; trailing columns add the
    difference, the combined standard error, the KS distance of the unsmoothed
    occupation times and ``a_n``.
    """
    if n_grid is None:
        n_grid = [2**j for j in range(10, 17)]
    ns = sorted(int(n) for n in n_grid)
    if cfg.reps < 1000:
        raise ValidationError("compare_to_mlf needs reps >= 1000")
    a, b = cfg.interval
    table = Table(["h", "n", "a", "b", "epsilon", "reps", "v_id", "lhs", "lhs_se", "rhs", "rhs_se", "ks", "seed",
                   "diff", "combined_se", "ks_unsmoothed", "a_n"],
                  meta={"regime": regime_label(cfg.h), "phi_theta": cfg.phi_theta, "mlf_count": mlf_count,
                        "stream": cfg.seed.stream, "plateau_L": return_seq.plateau})
    refs = {}
    for v_id in v_ids:
        mean, se, y = mlf_reference(cfg.h, cfg.width, v_id, cfg.cap_m, mlf_count)
        refs[v_id] = (mean, se)
    y_ref = y
    for n in ns:
        c = cfg.with_n(n)
        occ = simulate_occupation(c, workers)
        an = return_seq[n]
        ks = ks_distance(occ.counts / an, y_ref)
        ks0 = ks_distance(occ.counts_unsmoothed / an, y_ref)
        for v_id in v_ids:
            lhs, lhs_se = smoothed_functional(replace(c, test_fn=v_id), return_seq, occ=occ)
            rhs, rhs_se = refs[v_id]
            comb = math.hypot(lhs_se, rhs_se) if not math.isnan(lhs_se) else rhs_se
            table.append([c.h.h, n, a, b, c.epsilon, c.reps, v_id, lhs, lhs_se, rhs, rhs_se, ks, c.seed.seed,
                          abs(lhs - rhs), comb, ks0, an])
    return table
