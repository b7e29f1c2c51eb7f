"""Radial eigenvalues of the linearisation at the bubble and the nondegeneracy test.

    python3 demos/linearised_spectrum.py
"""
import numpy as np

from henon import radial_eigen, solve_sync_2, symmetric_params
from henon.spectrum import linearized_decouple, nondegeneracy_check

P = symmetric_params(4, 0.3, 0.5, nu=1.0)
print(f"p={P.p:.6f}  lambda={P.lam:.6f}")
eig = radial_eigen(P, n_modes=3)
print("weighted eigenvalues:", np.array2string(eig.eigenvalues, precision=10))
print("expected:             1, p-1 =", P.p - 1)

for s in solve_sync_2(P):
    if s.kind != "positive":
        continue
    c1, c2 = s.c
    rep = nondegeneracy_check(P, c1, c2)
    dec = linearized_decouple(P, c1, c2)
    print("c=(%.6f, %.6f)  lhs=%.6f rhs=%.6f  nondegenerate=%s" % (c1, c2, rep.lhs, rep.rhs, rep.nondegenerate))
    print("    decoupled eigenvalues %s  rotation slope %.10f" %
          (np.array2string(dec.eigenvalues, precision=8), dec.gamma_tilde))
