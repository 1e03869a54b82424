# The law of S_n given the future
#
# S_n | (X_{n+1}, ..., X_{n+k}) is normal with
#   mean     mu = B^T Sigma_22^{-1} X_future
#   variance sigma^2 = n^{2H} - B^T Sigma_22^{-1} B.
# Adding future observations can only explain more variance, so sigma^2
# falls with k and the quadratic form rises.  Its limit defines d_n^2.

import math

import numpy as np

from fgnlab.conditional import (
    G0,
    build_dn_table,
    cllt_check,
    conditional_mean_vanishing,
    quadratic_form_decay,
)
from fgnlab.sampler import RngSeed

for h in (0.85, 0.6):
    tab = quadratic_form_decay(h, 4, [2**j for j in range(5, 13)])
    print(f"H={h} ({tab.meta['regime']}), n=4")
    for k, q, s2 in tab.rows:
        print(f"  k={k:<5d} qform={q:.6f}  sigma2={s2:.6f}")
    print(f"  fitted exponent of qform: {tab.meta['fitted_exponent']:+.4f} +- {tab.meta['exponent_stderr']:.4f}")

# d_n^2 by doubling k until sigma^2 moves less than 1e-3 (relative)
dn = build_dn_table(0.85, [1, 4, 16, 64, 256])
print("\nn     d_n^2        k_used  L(n)=d_n^2/n^2H  stabilised")
for row in dn.to_table().rows:
    print(f"{row[0]:<5d} {row[1]:<12.5f} {row[2]:<7d} {row[3]:.5f}          {row[4]}")

# The conditional mean over sampled futures.  Var(mu) equals the quadratic
# form exactly, so E|mu|/sigma tracks sqrt(2 qform / (pi sigma^2)).
van = conditional_mean_vanishing(0.85, 4, [64, 1024, 4096], 1000, RngSeed(1))
print("\nk      E|mu|/sigma   Var(mu)   qform   gaussian value")
for r in van.records():
    s2 = 4**1.7 - r["qform"]
    print(f"{r['k']:<6d} {r['mean_abs_ratio']:.4f}        {r['mu_var']:.3f}    {r['qform']:.3f}   "
          f"{math.sqrt(2 * r['qform'] / math.pi / s2):.4f}")

# Conditional local limit: d_n P(S_n in (0, 1) | future), averaged over futures
res = cllt_check(0.85, [64, 1024], (0, 1), k=4096, reps=1000, seed=RngSeed(7), dn_table=dn)
print(f"\ntarget g(0) = {G0:.4f}")
for r in res.records():
    print(f"n={r['n']:<5d} mean d_n P = {r['mean_dnP']:.4f} +- {r['se_dnP']:.4f}  rel error {r['rel_error']:.3f}")
# The average is E[d_n phi(mu / sigma) / sigma] over mu ~ N(0, qform), close to
# d_n / sqrt(n^{2H}) * g(0) = sqrt(L) g(0) rather than g(0).
print("sqrt(L) g(0) =", round(math.sqrt(dn.plateau) * G0, 4))
