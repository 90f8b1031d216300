"""
A spectrum whose lower bound decays exponentially
=================================================

"""

import math

from rieszbounds import analytic

# the test function phi_L is concentrated near 0, where the spectrum has a gap
for L in range(2, 7):
    r = analytic.phi_decay_check(L)
    print(f"L={L}: exact A={r.A_exact:.3e}  sum |phi_L|^2={r.S:.3e}  "
          f"8/pi^L={8 / math.pi ** L:.3e}  tail<={r.tail:.1e}")
