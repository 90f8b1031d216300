"""
Generating-function weights, extrema and the A2 estimate
========================================================

"""

import math

import numpy as np
from rieszbounds import PeriodicSpectrum, NodeSet, exact_bounds
from rieszbounds import analytic, bounds

rng = np.random.default_rng(4)
spec = PeriodicSpectrum(NodeSet(rng.random(6)))
K = spec.period
delta = spec.separation

# on this line each factor of the weight has q = 1/3
y = K * math.log(3) / (2 * math.pi)
w = analytic.periodic_weight(spec, y)
m, M = analytic.weight_extrema(w)
print(f"K={K} delta={delta:.3f} y={y:.3f} m/M={m / M:.4f}")
print("A2 lower estimate:", analytic.a2_constant(w))

log_A = exact_bounds(spec.base).log_A
print("log exact A      :", log_A)
print("log sine-type    :", bounds.log_sine_type_bound(delta, y, m, M))
print("log periodic     :", bounds.log_periodic_bound(delta, K))

# a two-valued weight: the estimate approaches 25/16
s = np.where(np.arange(4096) < 2048, 1.0, 4.0)
print("step weight A2   :", analytic.a2_constant(analytic.WeightGrid(1.0, s)), 25 / 16)
