"""
Exact Riesz bounds from a Vandermonde matrix
============================================

"""

import numpy as np
from rieszbounds import NodeSet, counterexample_family, exact_bounds, gram_bounds, roots_of_unity

# equispaced nodes give the DFT matrix, an orthogonal system up to scaling
for d in (1, 8, 64):
    eb = exact_bounds(roots_of_unity(d))
    print(f"roots of unity d={d:3d}: A={eb.A:.15f} B={eb.B:.15f}")

# two nodes a quarter turn apart: the Gram matrix is 2x2 and easy by hand
eb = exact_bounds(NodeSet([0.0, 0.25]))
print("{0, 1/4}:", eb.A, (2 - np.sqrt(2)) / 2, eb.B, (2 + np.sqrt(2)) / 2)

# the SVD and the Gram eigenvalues are computed independently
theta = NodeSet(np.random.default_rng(0).random(12))
print("SVD  :", exact_bounds(theta).A, exact_bounds(theta).B)
print("Gram :", *gram_bounds(theta))

# every node of this family sits a quarter step from a root of unity,
# yet the lower bound keeps falling with d
for d in (5, 15, 45, 135, 405):
    print(f"counterexample d={d:3d}: A={exact_bounds(counterexample_family(d)).A:.6f}")
