"""End-to-end consistency checks for one parameter set.

Each check returns a :class:`Check` with the measured quantity and the
tolerance it was held to.  ``run_checks`` is what ``henon verify-all``
executes.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import bubble as bb
from . import groundstate as gs
from . import radial_ode as ro
from . import spectrum as spc
from .coupling import solve_sync_2, sync_residual
from .errors import HenonError, SymmetryBreakingRegime
from .params import CouplingSpec, ProblemParams

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool | None      # None: skipped
    value: float | None = None
    tol: float | None = None
    note: str = ""

    @property
    def status(self) -> str:
        return {True: "PASS", False: "FAIL", None: "SKIP"}[self.passed]

    def line(self) -> str:
        val = "" if self.value is None else f" value={self.value:.3e}"
        tol = "" if self.tol is None else f" tol={self.tol:.6g}"
        note = f"  ({self.note})" if self.note else ""
        return f"{self.status}  {self.name}{val}{tol}{note}"

    def to_dict(self) -> dict:
        return {"name": self.name, "status": self.status, "value": self.value,
                "tol": self.tol, "note": self.note}


def _below(name, value, tol, note=""):
    value = float(value)
    return Check(name, bool(value < tol), value, tol, note)


def check_bubble(P: ProblemParams) -> list[Check]:
    r = np.geomspace(1e-3, 1e3, 200)
    prof = bb.bubble_profile(P)
    even = np.max(np.abs(prof.values - prof.values[::-1]))
    return [_below("bubble residual", np.max(bb.bubble_residual(P, r)), 1e-10),
            _below("bubble evenness", even, 1e-12)]


def check_sync(P: ProblemParams, roots) -> list[Check]:
    prof = bb.bubble_profile(P)
    worst_alg, worst_ode = 0.0, 0.0
    for r in roots:
        worst_alg = max(worst_alg, sync_residual(P, r.c))
        worst_ode = max(worst_ode, ro.residual(P, [prof.scaled(c) for c in r.c]))
    return [_below("sync algebraic residual", worst_alg, 1e-12, f"{len(roots)} roots"),
            _below("sync ODE residual", worst_ode, 1e-8)]


def check_picard(P: ProblemParams, c) -> list[Check]:
    K = bb.bubble_constant(P)
    sol = ro.picard_solve(P, c * K, 10.0)
    r = np.linspace(0.0, 10.0, 2001)[1:]
    exact = np.outer(c, bb.bubble_value(P, r))
    rel = np.max(np.abs(sol(r) - exact) / exact)
    out = [_below("picard reproduction", rel, 1e-6)]
    u2 = ro.uniqueness_experiment(P, c * K, 2 * c * K, 5.0)
    out.append(_below("uniqueness theta=2", np.max(u2.deviation), 1e-8))
    far = ro.picard_solve(P, c * K, 1e12 ** (1 / P.sigma))
    prs = far.profiles()
    asy = ro.asymptotics(prs, tol=1e-4)
    target = P.n - 2 - 2 * P.a
    out.append(_below("decay exponent", np.max(np.abs(asy.decay_exponents - target)) / target, 1e-4))
    inv = ro.inversion_normalize(prs[0])
    right = inv.profile.values[inv.profile.t_grid > 0]
    out.append(_below("inversion defect", inv.defect, 1e-8,
                      "decreasing" if np.all(np.diff(right) < 0) else "NOT decreasing"))
    if not np.all(np.diff(right) < 0):
        out[-1] = Check("inversion defect", False, inv.defect, 1e-8, "not decreasing for t > 0")
    return out


def check_transforms(P: ProblemParams) -> list[Check]:
    prof = bb.bubble_profile(bb.BubbleParams(P, 2.0))
    kk = bb.kelvin_transform(bb.kelvin_transform(prof))
    inv = bb.kelvin_transform(prof)
    ref = bb.emden_fowler_bubble(P, inv.t_grid, 0.5)
    hs = bb.hardy_sobolev_map(P, 0.5 * P.gamma)
    r = np.geomspace(1e-3, 1e3, 200)
    u = bb.bubble_value(P, r)
    trip = np.max(np.abs(hs.inverse(r, hs.forward(r, u)) - u) / u)
    return [_below("kelvin involution", np.max(np.abs(kk.values - prof.values)), 1e-12),
            _below("kelvin of bubble", np.max(np.abs(inv.values - ref)), 1e-12),
            _below("hardy-sobolev round trip", trip, 1e-12),
            _below("hardy-sobolev residual", np.max(hs.residual(bb.BubbleParams(P), r)), 1e-8)]


def check_groundstate(P: ProblemParams, seed: int, n_trials: int) -> list[Check]:
    try:
        rep = gs.ground_state_report(P)
    except SymmetryBreakingRegime as exc:
        return [Check("sharp constants", None, note=str(exc))]
    out = []
    S2 = gs.sharp_ckn_constant(P, 2.0)
    out.append(_below("S dilation invariance", abs(S2 / rep.S - 1), 1e-10))
    case = rep.case_label
    if case is gs.CaseLabel.CASE_III:
        out.append(_below("case iii boundary minimum", abs(rep.f_min - 1), 1e-10))
    elif case in (gs.CaseLabel.CASE_I, gs.CaseLabel.CASE_II):
        out.append(Check("interior minimum below 1", bool(rep.interior and rep.f_min < 1 - 1e-6),
                         rep.f_min, None, case.value))
    else:
        out.append(Check("f minimum", None, rep.f_min, note="unclassified gap"))
    d, pot = gs.synchronised_energies(P, rep.minimizer, rep.s_factor)
    out.append(_below("energy identity", abs((0.5 - 1 / P.p) * d / rep.energy - 1), 1e-8))
    out.append(_below("Nehari identity", abs(d / pot - 1), 1e-8))
    rng = np.random.default_rng(seed)
    worst = math.inf
    for _ in range(n_trials):
        m = rng.integers(1, 4)
        mus = np.exp(rng.uniform(-1.5, 1.5, 2 * m))
        cu, cv = rng.normal(size=m), rng.normal(size=m)
        q = gs.vector_rayleigh_quotient(P, gs.bubble_combination(P, cu, mus[:m]),
                                        gs.bubble_combination(P, cv, mus[m:]), mus)
        worst = min(worst, q / rep.S_bar)
    out.append(Check("vector Rayleigh quotients >= S_bar", bool(worst >= 1 - 1e-6), worst, 1 - 1e-6,
                     f"{n_trials} trials, smallest ratio shown"))
    return out


def check_spectrum(P: ProblemParams) -> list[Check]:
    res = spc.radial_eigen(P)
    f, df = spc.bubble_modes(P, res.t)
    ev = res.eigenvalues
    p = P.p
    return [_below("lambda_1 = 1", abs(ev[0] - 1), 1e-4),
            _below("lambda_2 = p - 1", abs(ev[1] - (p - 1)), 1e-4),
            Check("lambda_3 > p - 1", bool(ev[2] > p - 1 + 1e-3), float(ev[2] - (p - 1)), 1e-3),
            _below("eigenvector 1 cosine", 1 - res.cosine(0, f), 1e-6),
            _below("eigenvector 2 cosine", 1 - res.cosine(1, df), 1e-6)]


def check_nondegeneracy(P: ProblemParams, roots) -> list[Check]:
    out = []
    bound = P.nu <= (P.p - 2) / (2 * P.alpha * P.beta)
    worst = 0.0
    all_nd = True
    for r in roots:
        rep = spc.nondegeneracy_check(P, *r.c)
        all_nd &= rep.nondegenerate
        if rep.kind == "positive":
            dec = spc.linearized_decouple(P, *r.c)
            worst = max(worst, rep.simplification_error, dec.gamma_error, dec.sync_error, dec.transverse_error)
    out.append(_below("theta identities", worst, 1e-12))
    if bound:
        out.append(Check("nondegenerate under nu bound", all_nd))
    else:
        out.append(Check("nondegenerate roots", all_nd, note="nu above the sufficient bound"))
    return out


def run_checks(P: ProblemParams, seed: int = 0, n_trials: int = 1000) -> list[Check]:
    """Every check for ``P``; a check that raises is reported as failed with the message."""
    roots = solve_sync_2(P)
    positive = [r for r in roots if r.kind == "positive"]
    steps = [
        ("bubble", lambda: check_bubble(P)),
        ("sync", lambda: check_sync(P, roots)),
        ("picard", lambda: check_picard(P, positive[0].c)),
        ("transforms", lambda: check_transforms(P)),
        ("groundstate", lambda: check_groundstate(P, seed, n_trials)),
        ("spectrum", lambda: check_spectrum(P)),
        ("nondegeneracy", lambda: check_nondegeneracy(P, roots)),
    ]
    out: list[Check] = []
    for name, fn in steps:
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", category=ro.VanishedSolution)
                out += fn()
        except HenonError as exc:
            out.append(Check(name, False, note=f"{type(exc).__name__}: {exc}"))
    return out


def spec_checks(spec: CouplingSpec, seed: int = 0) -> list[Check]:
    """Synchronisation and uniqueness checks for a k-coupled spec."""
    from .coupling import solve_sync_k

    roots = solve_sync_k(spec, seed=seed)
    out = [Check("positive sync roots found", bool(roots), float(len(roots)))]
    if roots:
        out.append(_below("sync residual", max(r.residual for r in roots), 1e-10))
        K = bb.bubble_constant(spec.params)
        rep = ro.uniqueness_experiment(spec, roots[0].c * K, 2 * roots[0].c * K, 5.0)
        out.append(_below("uniqueness theta=2", np.max(rep.deviation), 1e-8))
    return out
