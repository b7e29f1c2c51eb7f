"""Find the constant vectors c with u = c U and check them against the radial ODE.

    python3 demos/synchronised_pairs.py
"""
import numpy as np

from henon import bubble as bb
from henon import radial_ode as ro
from henon import solve_sync_2, validate_params

P = validate_params(3, 0.0, 0.0, 0.4, 2.5, 3.5)
K = bb.bubble_constant(P)
roots = solve_sync_2(P)
print(f"{len(roots)} synchronised pairs for nu={P.nu}, alpha={P.alpha}, beta={P.beta}")
for s in roots:
    print("  %-13s c=(%.10f, %.10f)  residual %.1e" % (s.kind, s.c[0], s.c[1], s.residual))

# start the radial ODE at u(0) = c K and see that it stays on the line through c
r = np.geomspace(1e-4, 50.0, 200)
for s in roots:
    if s.kind != "positive":
        continue
    sol = ro.picard_solve(P, s.c * K, 50.0)
    exact = np.outer(s.c, bb.bubble_value(P, r))
    print("  launch from %s: max relative gap to c U = %.2e" %
          (np.array2string(s.c, precision=4), np.max(np.abs(sol(r) / exact - 1))))

# nudging one component off the line makes the pair drift apart
c = next(s.c for s in roots if s.kind == "positive")
for eps in (1e-6, 1e-3, 1e-1):
    sol = ro.picard_solve(P, c * K * [1 + eps, 1.0], 50.0)
    u = sol(r[r < sol.r_end])
    drift = np.max(np.abs(u[0] / u[1] * c[1] / c[0] - 1))
    print(f"  perturb c1 by {eps:.0e}: ratio drift {drift:.2e}, solved to r={sol.r_end:.1f}")
