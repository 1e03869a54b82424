# Exact fGn paths: Cholesky and circulant embedding
#
# Both samplers produce draws from exactly N(0, Sigma_n).  Cholesky costs
# O(n^2) memory; the circulant embedding needs two FFTs of length 2n.

import time

import numpy as np
from scipy import stats

from fgnlab.fgn_model import autocovariance
from fgnlab.sampler import RngSeed, circulant_eigenvalues, partial_sums, sample_cholesky_batch, sample_circulant_batch

H = 0.8

# The embedding is valid when every circulant eigenvalue is nonnegative
for n in (64, 4096, 2**16):
    print(f"n={n:<6d} smallest circulant eigenvalue {circulant_eigenvalues(H, n).min():.3e}")

# Lag autocovariances from 10^4 circulant paths of length 64
x = sample_circulant_batch(H, 64, RngSeed(0), 10**4)
print("\nlag  b(t)      estimate  z")
for t in range(9):
    prod = (x[:, : 64 - t] * x[:, t:]).mean(axis=1)
    se = prod.std(ddof=1) / np.sqrt(prod.size)
    print(f"{t:<4d} {autocovariance(H, t):.5f}   {prod.mean():.5f}   {(prod.mean() - autocovariance(H, t)) / se:+.2f}")

# Same law for S_n from either sampler
y = sample_cholesky_batch(H, 64, RngSeed(0, 2**32), 10**4)
print("\nKS p-value for S_64, circulant vs Cholesky:",
      round(stats.ks_2samp(x.sum(axis=1), y.sum(axis=1)).pvalue, 4))

# Self-similarity: Var(S_n) / n^{2H} stays at 1
for n in (16, 128, 1024):
    s = sample_circulant_batch(H, n, RngSeed(1), 10**4).sum(axis=1)
    print(f"n={n:<5d} Var(S_n)/n^2H = {s.var() / n ** (2 * H):.4f}")

t0 = time.perf_counter()
paths = sample_circulant_batch(H, 2**16, RngSeed(2), 64)
S = partial_sums(paths)
print(f"\n64 paths of length 2^16 in {time.perf_counter() - t0:.2f}s; |S_n| / n^H:",
      np.round(np.abs(S[:5, -1]) / 2**(16 * H), 3))
