"""
How large can a periodic bump get before the floor is at risk?
==============================================================

The oscillation of a periodic height field is controlled by its curvature:

    max |f - mean f|  <=  C_S ||Lap f||_2   on the unit torus.

The sharp C_S is built from the lattice sum of |k|^-4, so we start there.
"""
import math

import numpy as np
from scipy.special import zeta

from fsiplate import fields, lattice

# Truncated lattice sums come with a rigorous tail bound, so each radius
# gives an interval that must contain the exact value.
print("radius   partial sum     upper bound")
for radius in (1, 4, 16, 64, 256, 2000):
    s = lattice.epstein_sum(2.0, radius)
    print(f"{radius:6d}   {s.lower:.10f}  {s.upper:.10f}")

# The closed form 4 zeta(2) beta(2) involves Catalan's constant.
exact = 4 * zeta(2.0) * lattice.catalan()
print(f"\nclosed form: {exact:.10f}")

c_s = lattice.converged_sobolev_constant()
print(f"C_S = {c_s:.8f},  1/C_S^2 = {1 / c_s**2:.4f}")

# The extremal function is the Green's function of Lap^2 evaluated at a
# point; a spectrally truncated version gets close to equality.
n = 64
k1, k2 = fields.wavenumbers(n, 2)
k2sum = (k1**2 + k2**2).astype(float)
k2sum[0, 0] = np.inf
green = fields.PeriodicField.from_spectrum(k2sum**-2)
ratio = fields.linf_deviation(green) / fields.l2_norm(fields.laplacian(green))
print(f"\nnear-extremal field on a {n}x{n} grid: ratio / C_S = {ratio / c_s:.5f}")

# Random smooth fields sit well inside the bound.
rng = np.random.default_rng(1)
ratios = []
for _ in range(200):
    f = fields.random_bandlimited(32, 6, rng)
    ratios.append(fields.linf_deviation(f) / fields.l2_norm(fields.laplacian(f)))
print(f"200 random fields: largest ratio / C_S = {max(ratios) / c_s:.3f}")

# In one dimension the same argument gives 1/sqrt(720).
print(f"\n1D constant: {lattice.converged_sobolev_constant_1d():.8f} vs {1 / math.sqrt(720):.8f}")
