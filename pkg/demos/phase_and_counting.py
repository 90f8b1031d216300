"""
Phase function, perturbation integral and counting function
===========================================================

"""

import numpy as np
from rieszbounds import PeriodicSpectrum, NodeSet, roots_of_unity
from rieszbounds import analytic

Z = PeriodicSpectrum(roots_of_unity(1))

# closed-form periodic Poisson sum against a long truncated sum
t = np.linspace(-0.5, 0.5, 5)
print(analytic.poisson_kernel_periodic(t, 0.3))
print(analytic.poisson_kernel_direct(t, 0.3))

# the phase function returns to zero after one period
ph = analytic.phase_alpha(Z, 1.0)
print("alpha(P) =", ph.end_value, " max |alpha| =", np.abs(ph.samples).max())

# the perturbation integral stays below L times the kernel maximum
mu = np.random.default_rng(1).uniform(-0.2, 0.2, 8)
for y in (0.2, 1.0, 3.0):
    print(f"y={y}: tau={analytic.tau_sup(8, mu, y):.4f} "
          f"bound={analytic.tau_kernel_bound(np.abs(mu).max(), y):.4f}")

# Poisson extension of 2 pi (x - N(x)) tracks -alpha up to a constant
spec = PeriodicSpectrum(NodeSet([0.1, 0.45, 0.8]))
grid, residual = analytic.counting_diagnostic(spec, y=1.0, window=16.0)
print("counting residual:", residual)

# nu_y is nonpositive and small against its separation bound
_, nu = analytic.nu_profile(spec, 0.3)
print("max |nu| =", np.abs(nu).max(), " bound =", analytic.nu_bound(spec.separation, 0.3))
