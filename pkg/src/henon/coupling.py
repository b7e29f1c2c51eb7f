"""Synchronisation constants of coupled bubbles.

A synchronised solution ``u_i = c_i W`` of the coupled system, with ``W`` a
solution of the scalar equation, exists exactly when

    sum_j kappa_ij c_i^{alpha_ij - 1} c_j^{beta_ij} = c_i   for every i.

For two components this reads

    c1^{p-2} + nu alpha c1^{alpha-2} c2^beta = 1,
    c2^{p-2} + nu beta  c1^alpha c2^{beta-2} = 1,

and the ratio ``L = c1/c2`` of a positive solution is a root of

    f(L) = L^{p-2} + nu alpha L^{alpha-2} - 1 - nu beta L^alpha.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .errors import NoPositiveRoot
from .params import CouplingSpec, ProblemParams

log = logging.getLogger(__name__)

SCAN_RANGE = (1e-8, 1e8)
SCAN_POINTS = 100_000
DEDUP_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class SyncConstants:
    """A nonnegative solution of the synchronisation system.

    ``kind`` is ``"positive"``, ``"semi_trivial"`` or ``"trivial"``; for
    two components ``branch`` is the index of the root of ``f`` the pair
    was built from.
    """

    c: np.ndarray
    residual: float
    kind: str = "positive"
    branch: int | None = None
    meta: dict = field(default_factory=dict)

    @property
    def ratio(self) -> float:
        return float(self.c[0] / self.c[1]) if self.c[1] > 0 else float("inf")

    def to_dict(self) -> dict:
        return {"c": self.c.tolist(), "residual": self.residual, "kind": self.kind,
                "branch": self.branch, **self.meta}


def classify_sync(c) -> str:
    c = np.asarray(c, dtype=float)
    if np.all(c == 0):
        return "trivial"
    return "positive" if np.all(c > 0) else "semi_trivial"


def _as_spec(system) -> CouplingSpec:
    return CouplingSpec.from_pair(system) if isinstance(system, ProblemParams) else system


def sync_map(system, c) -> np.ndarray:
    """``G_i(c) = sum_j kappa_ij c_i^{alpha_ij-1} c_j^{beta_ij} - c_i``."""
    spec = _as_spec(system)
    c = np.asarray(c, dtype=float)
    return spec.nonlinearity(c) - c


def sync_residual(system, c) -> float:
    """Max-norm residual of the synchronisation system (zero for ``c = 0``)."""
    return float(np.max(np.abs(sync_map(system, c))))


def pair_residual(params: ProblemParams, c1: float, c2: float) -> float:
    """Residual of the divided two-component system; needs ``c1, c2 > 0``."""
    p, al, be, nu = params.p, params.alpha, params.beta, params.nu
    e1 = c1 ** (p - 2) + nu * al * c1 ** (al - 2) * c2 ** be - 1
    e2 = c2 ** (p - 2) + nu * be * c1 ** al * c2 ** (be - 2) - 1
    return float(max(abs(e1), abs(e2)))


def scalar_reduction_f(params: ProblemParams, t):
    """``f(t) = t^{p-2} + nu alpha t^{alpha-2} - 1 - nu beta t^alpha`` for ``t > 0``."""
    p, al, be, nu = params.p, params.alpha, params.beta, params.nu
    t = np.asarray(t, dtype=float)
    return t ** (p - 2) + nu * al * t ** (al - 2) - 1 - nu * be * t ** al


def scalar_reduction_df(params: ProblemParams, t):
    p, al, be, nu = params.p, params.alpha, params.beta, params.nu
    t = np.asarray(t, dtype=float)
    return (p - 2) * t ** (p - 3) + nu * al * (al - 2) * t ** (al - 3) - nu * be * al * t ** (al - 1)


def f_roots(params: ProblemParams, t_range=SCAN_RANGE, n_points: int = SCAN_POINTS,
            xtol: float = 1e-14) -> list[float]:
    """Sign changes of ``f`` on a log grid, refined by bisection.

    Tangential zeros do not change sign; they are logged as warnings and
    not returned.
    """
    t = np.geomspace(*t_range, n_points)
    f = lambda s: float(scalar_reduction_f(params, s))
    v = scalar_reduction_f(params, t)
    sgn = np.sign(v)
    roots = []
    for i in np.flatnonzero(sgn[:-1] * sgn[1:] < 0):
        roots.append(brentq(f, t[i], t[i + 1], xtol=xtol * t[i], rtol=4 * np.finfo(float).eps))
    for i in np.flatnonzero(sgn == 0):
        roots.append(float(t[i]))
    _warn_tangencies(params, t, v)
    return sorted(roots)


def _warn_tangencies(params, t, v):
    a = np.abs(v)
    # local minima of |f| without a sign change nearby
    idx = np.flatnonzero((a[1:-1] < a[:-2]) & (a[1:-1] < a[2:])) + 1
    for i in idx:
        if np.sign(v[i - 1]) != np.sign(v[i + 1]) or v[i] == 0:
            continue
        lo, hi = np.log(t[i - 1]), np.log(t[i + 1])
        res = minimize_scalar(lambda s: abs(float(scalar_reduction_f(params, np.exp(s)))),
                              bounds=(lo, hi), method="bounded", options={"xatol": 1e-14})
        if res.fun < 1e-10:
            log.warning("f has a near double root at t = %.12g (|f| = %.2e); not reported as a root",
                        np.exp(res.x), res.fun)


def pair_from_ratio(params: ProblemParams, L: float) -> tuple[float, float]:
    """``c1 = (1 + nu alpha L^{-beta})^{-1/(p-2)}``, ``c2 = c1 / L``."""
    c1 = (1 + params.nu * params.alpha * L ** (-params.beta)) ** (-1 / (params.p - 2))
    return c1, c1 / L


def solve_sync_2(params: ProblemParams, check_tol: float = 1e-12) -> list[SyncConstants]:
    """All positive pairs found by the scan of ``f``, then the two semi-trivial ones.

    Raises :class:`NoPositiveRoot` (carrying the semi-trivial pairs in
    ``.pairs``) if the scan finds no sign change.
    """
    out = []
    for branch, L in enumerate(f_roots(params)):
        c1, c2 = pair_from_ratio(params, L)
        res = pair_residual(params, c1, c2)
        if res > check_tol:
            log.warning("root L = %.15g gives residual %.2e above %.0e", L, res, check_tol)
        out.append(SyncConstants(np.array([c1, c2]), res, "positive", branch, {"L": L}))
    semi = [SyncConstants(np.array([1.0, 0.0]), sync_residual(params, [1.0, 0.0]), "semi_trivial"),
            SyncConstants(np.array([0.0, 1.0]), sync_residual(params, [0.0, 1.0]), "semi_trivial")]
    if not out:
        err = NoPositiveRoot(f"no sign change of f on [{SCAN_RANGE[0]:g}, {SCAN_RANGE[1]:g}]")
        err.pairs = semi
        raise err
    return out + semi


def _newton_log(spec: CouplingSpec, c0, max_iter: int = 200, tol: float = 1e-14):
    """Damped Newton on ``H_i = sum_j kappa_ij c_i^{alpha_ij-2} c_j^{beta_ij} - 1`` in ``log c``."""
    al, be, ka = spec.alpha_ij, spec.beta_ij, spec.kappa
    k = spec.k
    eye = np.eye(k)

    def H_and_J(x):
        with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
            c = np.exp(x)
            terms = ka * c[:, None] ** (al - 2) * c[None, :] ** be
            H = terms.sum(axis=1) - 1
            J = np.einsum("ij,il->il", terms * (al - 2), eye) + terms * be
        return H, J

    x = np.log(np.asarray(c0, dtype=float))
    H, J = H_and_J(x)
    for _ in range(max_iter):
        nrm = np.max(np.abs(H))
        if nrm < tol:
            return np.exp(x)
        try:
            dx = np.linalg.solve(J, -H)
        except np.linalg.LinAlgError:
            return None
        step = 1.0
        while step > 1e-10:
            xn = x + step * dx
            Hn, Jn = H_and_J(xn)
            if np.all(np.isfinite(Hn)) and np.max(np.abs(Hn)) < nrm:
                break
            step *= 0.5
        else:
            return None
        x, H, J = xn, Hn, Jn
        if np.max(np.abs(x)) > 60:
            return None
    return np.exp(x) if np.max(np.abs(H)) < 1e-12 else None


def solve_sync_k(spec: CouplingSpec, starts: int = 32, seed: int = 0,
                 check_tol: float = 1e-10) -> list[SyncConstants]:
    """Positive synchronisation vectors from multi-start Newton.

    Starts are the symmetric point plus ``starts`` random positive points.
    Solutions closer than ``1e-9`` in max norm are merged.  The returned
    list is sorted lexicographically and may be empty.
    """
    spec = _as_spec(spec)
    rng = np.random.default_rng(seed)
    k, p = spec.k, spec.p
    sym = np.full(k, spec.kappa.sum(axis=1).mean() ** (-1 / (p - 2)))
    inits = [sym] + [np.exp(rng.uniform(np.log(0.05), np.log(2.0), k)) for _ in range(starts)]
    found: list[np.ndarray] = []
    for c0 in inits:
        c = _newton_log(spec, c0)
        if c is None or sync_residual(spec, c) > check_tol:
            continue
        if any(np.max(np.abs(c - f)) < DEDUP_TOL for f in found):
            continue
        found.append(c)
    found.sort(key=tuple)
    return [SyncConstants(c, sync_residual(spec, c), "positive", i) for i, c in enumerate(found)]
