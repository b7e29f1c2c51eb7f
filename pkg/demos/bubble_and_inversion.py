"""Walk through the weighted bubble: closed form, Emden-Fowler picture, Kelvin map.

    python3 demos/bubble_and_inversion.py [n] [a] [b]
"""
import sys

import numpy as np

from henon import bubble as bb
from henon import symmetric_params
from henon.radial_ode import inversion_normalize

n = int(sys.argv[1]) if len(sys.argv) > 1 else 4
a = float(sys.argv[2]) if len(sys.argv) > 2 else 0.2
b = float(sys.argv[3]) if len(sys.argv) > 3 else 0.5
P = symmetric_params(n, a, b)
print(f"n={n} a={a} b={b}:  p={P.p:.6f}  lambda={P.lam:.6f}  sigma={P.sigma:.6f}")
print(f"bubble height K = {bb.bubble_constant(P):.15f}")

r = np.geomspace(1e-3, 1e3, 7)
res = bb.bubble_residual(P, r)
print("equation residual on a log grid: %.2e" % np.max(np.abs(res)))

# in t = -log r the bubble is an even bump with exponential tails of rate lambda
prof = bb.bubble_profile(P)
fit = prof.tail_fit()
print("tail slopes  left %+.6f  right %+.6f" % (fit["left"]["slope"], fit["right"]["slope"]))

# a dilation is a shift in t, and the Kelvin map reflects it
for mu in (0.25, 1.0, 4.0):
    shifted = bb.bubble_profile(bb.BubbleParams(P, mu), -30, 30, 6001)
    back = inversion_normalize(shifted)
    kel = bb.kelvin_transform(shifted)
    err = np.max(np.abs(kel.values - bb.emden_fowler_bubble(P, kel.t_grid, 1 / mu)))
    print(f"mu={mu:5.2f}: recovered tau={back.tau:.8f}  Kelvin image vs U_(1/mu): {err:.1e}")
