# The mean-one Mittag-Leffler law
#
# Y = Gamma(1 + a) S^{-a} with S positive a-stable (Laplace transform
# exp(-s^a)) has moments E[Y^p] = p! Gamma(1+a)^p / Gamma(1+p a).
# With a = 1 - H it is the reference law for occupation times.

import numpy as np

from fgnlab.mittag_leffler import ks_critical_value, ks_distance, moment, reference_cdf, sample
from fgnlab.sampler import RngSeed

for a in (0.15, 0.2, 0.5):
    smp = sample(a, 10**6, RngSeed(0))
    print(f"alpha={a}")
    for p in (1, 2, 3):
        est = np.mean(smp.values**p)
        print(f"  p={p}: exact {moment(a, p):.5f}  sample {est:.5f}  z {(est - moment(a, p)) / smp.standard_error(p):+.2f}")

# alpha near 1 collapses to the point mass at 1
print("\nstd of Y at alpha=0.999:", round(sample(0.999, 10**5, RngSeed(1)).values.std(), 4))

# A reference CDF table and a KS distance against it
ref = reference_cdf(0.2, 10**6, RngSeed(2))
other = sample(0.2, 10**4, RngSeed(3)).values
print(f"\nDKW band of the table: {ref.dkw_epsilon:.5f}")
print(f"KS(new sample, table) = {ks_distance(other, ref):.4f}; 1e-3 threshold {ks_critical_value(10**4, 10**6):.4f}")
print("quantiles of Y (alpha=0.2):", np.round(np.interp([0.1, 0.5, 0.9, 0.99], ref.cdf, ref.y), 4))
