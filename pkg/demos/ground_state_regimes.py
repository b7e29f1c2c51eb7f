"""Tabulate the minimum of f and the sharp constants across the coupling strength.

    python3 demos/ground_state_regimes.py
"""
import numpy as np

from henon import ground_state_report, validate_params
from henon.errors import SymmetryBreakingRegime
from henon.params import felli_schneider, symmetric_params
from henon import sharp_ckn_constant

print(" alpha    nu    case            x_min    f_min      S_bar/S   energy")
for alpha in (1.5, 3.0, 4.5):
    for nu in np.geomspace(0.05, 20, 5):
        P = validate_params(3, 0.0, 0.0, nu, alpha, 6 - alpha)
        rep = ground_state_report(P)
        print("%5.1f %7.3f  %-14s %8.5f %9.6f %9.6f %9.5f" % (
            alpha, nu, rep.case_label.value, rep.minimizer[0], rep.f_min, rep.S_bar / rep.S, rep.energy))

# the bubble stops being the extremal below the Felli-Schneider curve
a = -1.0
bfs = felli_schneider(3, a)
print(f"\nFelli-Schneider curve at n=3, a={a}: b={bfs:.6f}")
for b in (bfs + 0.2, bfs, bfs - 0.05):
    try:
        print("  b=%.4f  S=%.10f" % (b, sharp_ckn_constant(symmetric_params(3, a, b))))
    except SymmetryBreakingRegime as exc:
        print("  b=%.4f  refused: %s" % (b, exc))
