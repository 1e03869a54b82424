# Three ways to evaluate B^T Sigma_22^{-1} B
#
# Sigma_22 is the k x k covariance of k consecutive fGn increments, a
# symmetric positive definite Toeplitz matrix.  We compare the Levinson
# recursion, the Neumann series c sum_l B^T (I - c Sigma)^l B, and a dense solve.

import time

import numpy as np
from scipy import linalg

from fgnlab.fgn_model import b_vector, spectral_minimum, spectral_params
from fgnlab.toeplitz import NeumannConfig, SymmetricToeplitz, eigen_extremes, levinson_solve, neumann_quadratic_form

H, n = 0.8, 4

print("k      Levinson          dense             Neumann c=1/lmax  terms   Neumann c(k)     terms")
for k in (64, 256, 512):
    T = SymmetricToeplitz.fgn(H, k)
    B = b_vector(H, n, k)
    ext = eigen_extremes(T)
    lev = B @ levinson_solve(T, B)
    dense = B @ linalg.solve(T.dense(), B, assume_a="pos")
    opt = neumann_quadratic_form(T, B, NeumannConfig(), ext)
    ck = neumann_quadratic_form(T, B, NeumannConfig(m_scale=1.0, hurst=H), ext)
    print(f"{k:<6d} {lev:.12f}  {dense:.12f}  {opt.value:.12f}  {opt.terms_used:<6d}  "
          f"{ck.value:.12f}  {ck.terms_used}")

# Eigenvalue extremes: lambda_max grows like k^{2H-1}, lambda_min decreases
# toward the minimum of the spectral density and stays away from zero.
fmin = spectral_minimum(spectral_params(H))
ks = [2**j for j in range(6, 12)]
lmax, lmin = [], []
for k in ks:
    t0 = time.perf_counter()
    e = eigen_extremes(SymmetricToeplitz.fgn(H, k))
    lmax.append(e.lambda_max)
    lmin.append(e.lambda_min)
    print(f"k={k:<5d} lambda_min={e.lambda_min:.6f} lambda_max={e.lambda_max:9.4f} ({time.perf_counter() - t0:.2f}s)")
print("fitted slope of log lambda_max:", round(np.polyfit(np.log(ks), np.log(lmax), 1)[0], 4), "vs 2H-1 =", round(2 * H - 1, 4))
print("spectral floor:", round(fmin, 6))

# Levinson at a size where dense algebra would be wasteful
k = 16384
T = SymmetricToeplitz.fgn(H, k)
rhs = np.random.default_rng(0).standard_normal(k)
t0 = time.perf_counter()
x = levinson_solve(T, rhs)
print(f"\nLevinson k={k}: {time.perf_counter() - t0:.2f}s, relative residual "
      f"{np.max(np.abs(T.matvec(x) - rhs)) / np.max(np.abs(rhs)):.1e}")
