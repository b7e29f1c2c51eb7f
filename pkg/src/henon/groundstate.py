"""Coupling function, sharp constants and ground-state energies.

The coupling function of the two-component system is

    f(x, y) = (x^2 + y^2) / (x^p + y^p + p nu x^alpha y^beta)^{2/p},

and more generally ``|x|^2 / (sum_ij kappa_ij x_i^alpha_ij x_j^beta_ij)^{2/p}``.
With ``S`` the best constant in

    int |x|^{-2a} |grad u|^2  >=  S (int |x|^{-bp} |u|^p)^{2/p},

the vector constant is ``S f_min`` and the ground-state energy is
``(1/2 - 1/p) (f_min S)^{p/(p-2)}``.  ``S`` is computed from the bubble:
both sides of the inequality are equal to ``I = int |x|^{-bp} U^p`` at the
extremal, so ``S = I^{1 - 2/p}``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, minimize, minimize_scalar

from .bubble import default_half_width, emden_fowler_bubble, emden_fowler_bubble_dt
from .errors import DomainError, NoConvergence, SymmetryBreakingRegime
from .params import CouplingSpec, ProblemParams, RegimeTag, classify_regime
from .quadrature import integrate_line, panel_nodes, sphere_area

GRID_POINTS = 10_000
RESTARTS = 50


class CaseLabel(str, enum.Enum):
    CASE_I = "case_i"
    CASE_II = "case_ii"
    CASE_III = "case_iii"
    UNCLASSIFIED = "unclassified"


def _check_point(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if np.any(x < 0) or not np.any(x > 0):
        raise DomainError("f is defined for nonnegative points other than the origin")
    return x


def f_value(params: ProblemParams, x: float, y: float) -> float:
    """The two-component coupling function ``f(x, y)``."""
    x, y = _check_point([x, y])
    p = params.p
    den = x ** p + y ** p + p * params.nu * x ** params.alpha * y ** params.beta
    return float((x * x + y * y) / den ** (2 / p))


def f_value_k(spec: CouplingSpec, x) -> float:
    """``|x|^2 / (sum_ij kappa_ij x_i^alpha_ij x_j^beta_ij)^{2/p}``."""
    x = _check_point(x)
    if x.shape != (spec.k,):
        raise DomainError(f"expected a point with {spec.k} entries")
    return float(np.dot(x, x) / spec.potential(x[:, None])[0] ** (2 / spec.p))


def _f_on_segment(params: ProblemParams, x):
    """``f(x, 1 - x)`` for an array of ``x`` in ``[0, 1]``."""
    p, al, be, nu = params.p, params.alpha, params.beta, params.nu
    y = 1.0 - x
    return (x * x + y * y) / (x ** p + y ** p + p * nu * x ** al * y ** be) ** (2 / p)


def _segment_slope_sign(params: ProblemParams, x: float) -> float:
    """A positive multiple of ``d/dx f(x, 1 - x)`` at interior ``x``."""
    p, al, be, nu = params.p, params.alpha, params.beta, params.nu
    y = 1.0 - x
    N = x * x + y * y
    D = x ** p + y ** p + p * nu * x ** al * y ** be
    dN = 2 * x - 2 * y
    dD = p * x ** (p - 1) - p * y ** (p - 1) + p * nu * (al * x ** (al - 1) * y ** be - be * x ** al * y ** (be - 1))
    return dN * D - (2 / p) * N * dD


def _minimize_pair(params: ProblemParams, n_grid: int):
    xs = np.linspace(0.0, 1.0, n_grid + 1)
    vals = _f_on_segment(params, xs)
    i = int(np.argmin(vals))
    if i in (0, n_grid):
        x = xs[i]
        return np.array([x, 1 - x]), float(vals[i])
    lo, hi = xs[i - 1], xs[i + 1]
    res = minimize_scalar(lambda z: float(_f_on_segment(params, z)), bounds=(lo, hi),
                          method="bounded", options={"xatol": 1e-14})
    x = float(res.x)
    # polish on the stationarity condition, which is exact where the value is flat
    g = lambda z: _segment_slope_sign(params, z)
    if g(lo) < 0 < g(hi):
        x = brentq(g, lo, hi, xtol=1e-16, rtol=4 * np.finfo(float).eps)
    fx = float(_f_on_segment(params, x))
    if fx > vals[i]:
        x, fx = float(xs[i]), float(vals[i])
    return np.array([x, 1 - x]), fx


def _minimize_k(spec: CouplingSpec, restarts: int, seed: int):
    k = spec.k
    obj = lambda z: f_value_k(spec, z * z) if np.any(z != 0) else np.inf
    probes = [np.eye(k)[i] for i in range(k)] + [np.full(k, 1 / k)]
    probes += [0.5 * (np.eye(k)[i] + np.eye(k)[j]) for i in range(k) for j in range(i + 1, k)]
    best_x, best_f = None, np.inf
    for x in probes:
        fx = f_value_k(spec, x)
        if fx < best_f:
            best_x, best_f = x, fx
    rng = np.random.default_rng(seed)
    starts = [np.sqrt(x) for x in probes[k:]] + [np.sqrt(rng.dirichlet(np.ones(k))) for _ in range(restarts)]
    for z0 in starts:
        res = minimize(obj, z0, method="Nelder-Mead",
                       options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 20_000, "maxfev": 40_000})
        x = res.x * res.x
        if x.sum() <= 0:
            continue
        x = x / x.sum()
        fx = f_value_k(spec, x)
        if fx < best_f:
            best_x, best_f = x, fx
    return best_x / best_x.sum(), best_f


def minimize_f(system, n_grid: int = GRID_POINTS, restarts: int = RESTARTS,
               seed: int = 0) -> tuple[np.ndarray, float]:
    """Global minimum of the coupling function over the simplex.

    Two components: dense grid on ``f(x, 1 - x)`` including both endpoints,
    then bounded Brent refinement and a root polish of the derivative.
    ``k >= 3``: Nelder-Mead in ``x_i = z_i^2`` from the vertices, edge
    midpoints, the barycentre and ``restarts`` random points.
    """
    if isinstance(system, ProblemParams):
        return _minimize_pair(system, n_grid)
    if system.k == 1:
        return np.array([1.0]), 1.0
    if system.k == 2 and _is_pair(system):
        return _minimize_pair(system.params, n_grid)
    return _minimize_k(system, restarts, seed)


def _is_pair(spec: CouplingSpec) -> bool:
    P = spec.params
    ref = CouplingSpec.from_pair(P)
    return (np.allclose(spec.kappa, ref.kappa, rtol=1e-14, atol=0)
            and np.allclose(spec.alpha_ij, ref.alpha_ij, rtol=1e-14, atol=0))


def regime_cases(params: ProblemParams) -> CaseLabel:
    """Which of the three sufficient conditions on ``(alpha, beta, nu)`` holds."""
    p, nu = params.p, params.nu
    if min(params.alpha, params.beta) < 2:
        return CaseLabel.CASE_I
    if nu > (2 ** (p / 2) - 2) / p:
        return CaseLabel.CASE_II
    if nu <= (p - 2) / (2 * p):
        return CaseLabel.CASE_III
    return CaseLabel.UNCLASSIFIED


def _require_radial(params: ProblemParams):
    regime = classify_regime(params)
    if regime.tag is RegimeTag.SYMMETRY_BREAKING:
        raise SymmetryBreakingRegime(
            f"b = {params.b:g} < b_FS(a) = {regime.b_fs:.12g} with a = {params.a:g} < 0: "
            "symmetry-breaking regime, the extremal is not radial and S(a,b,n) is not computed")


def bubble_lp_mass(params: ProblemParams, mu: float = 1.0, panels: int = 200, order: int = 16) -> float:
    """``int |x|^{-bp} U_mu^p dx`` by Gauss-Legendre panels in ``t``."""
    T = default_half_width(params)
    c = -math.log(mu)
    body = integrate_line(lambda t: emden_fowler_bubble(params, t, mu) ** params.p,
                          c - T, c + T, params.p * params.lam, panels, order)
    return sphere_area(params.n) * float(body)


def sharp_ckn_constant(params: ProblemParams, mu: float = 1.0) -> float:
    """Best constant ``S`` with ``int |x|^{-2a}|grad u|^2 >= S (int |x|^{-bp}|u|^p)^{2/p}``.

    Evaluated as ``I^{1 - 2/p}`` with ``I`` the weighted ``L^p`` mass of
    ``U_mu``; the result does not depend on ``mu``.  Raises
    :class:`SymmetryBreakingRegime` below the Felli-Schneider curve.
    """
    _require_radial(params)
    return bubble_lp_mass(params, mu) ** (1 - 2 / params.p)


def vector_ckn_constant(system, mu: float = 1.0) -> float:
    """``S f_min``: best constant of the vector inequality."""
    P = system if isinstance(system, ProblemParams) else system.params
    return sharp_ckn_constant(P, mu) * minimize_f(system)[1]


def _normalisation_factor(system, c: np.ndarray, tol: float = 1e-15) -> float:
    """``s > 0`` such that ``(s c_i U)`` solves the system, by Newton on ``s^{p-2} D = |c|^2``."""
    spec = CouplingSpec.from_pair(system) if isinstance(system, ProblemParams) else system
    p = spec.p
    N = float(np.dot(c, c))
    D = float(spec.potential(c[:, None])[0])
    g = lambda s: s ** (p - 2) * D - N
    dg = lambda s: (p - 2) * s ** (p - 3) * D
    s = 1.0
    for _ in range(200):
        step = g(s) / dg(s)
        s_new = s - step
        if s_new <= 0:
            s_new = 0.5 * s
        if abs(s_new - s) <= tol * s_new:
            return s_new
        s = s_new
    raise NoConvergence("Newton iteration for the normalisation factor did not converge")


def ground_energy(system) -> tuple[float, float]:
    """``((1/2 - 1/p) (f_min S)^{p/(p-2)}, s)`` for the synchronised ground state."""
    P = system if isinstance(system, ProblemParams) else system.params
    x, fmin = minimize_f(system)
    S = sharp_ckn_constant(P)
    p = P.p
    energy = (0.5 - 1 / p) * (fmin * S) ** (p / (p - 2))
    return energy, _normalisation_factor(system, x)


def normalisation_residual(system, c, s: float) -> float:
    """Residual of ``sum_j kappa_ij (s c_i)^{alpha-1} (s c_j)^beta = s c_i`` at the nonzero entries."""
    spec = CouplingSpec.from_pair(system) if isinstance(system, ProblemParams) else system
    v = s * np.asarray(c, dtype=float)
    res = spec.nonlinearity(v[:, None])[:, 0] - v
    return float(np.max(np.abs(res[v > 0]) / v[v > 0]))


@dataclass(frozen=True)
class GroundStateReport:
    minimizer: np.ndarray
    f_min: float
    case_label: CaseLabel
    S: float
    S_bar: float
    energy: float
    s_factor: float
    interior: bool

    def to_dict(self) -> dict:
        return {"minimizer": self.minimizer.tolist(), "f_min": self.f_min,
                "case_label": self.case_label.value, "S": self.S, "S_bar": self.S_bar,
                "energy": self.energy, "s_factor": self.s_factor, "interior": self.interior}


def ground_state_report(params: ProblemParams) -> GroundStateReport:
    x, fmin = minimize_f(params)
    S = sharp_ckn_constant(params)
    p = params.p
    energy = (0.5 - 1 / p) * (fmin * S) ** (p / (p - 2))
    return GroundStateReport(x, fmin, regime_cases(params), S, S * fmin, energy,
                             _normalisation_factor(params, x), bool(np.all(x > 0)))


# ---------------------------------------------------------------------------
# Trial functions and Rayleigh quotients


def bubble_combination(params: ProblemParams, coeffs, mus):
    """``t -> (phi, phi')`` for ``sum_j coeffs[j] U_{mus[j]}`` in Emden-Fowler form."""
    coeffs = np.asarray(coeffs, dtype=float)
    mus = np.asarray(mus, dtype=float)

    def evaluate(t):
        t = np.asarray(t, dtype=float)
        phi = sum(c * emden_fowler_bubble(params, t, m) for c, m in zip(coeffs, mus))
        dphi = sum(c * emden_fowler_bubble_dt(params, t, m) for c, m in zip(coeffs, mus))
        return phi, dphi

    return evaluate


def _trial_nodes(params: ProblemParams, mus, panels: int = 400, order: int = 16):
    T = default_half_width(params)
    shifts = -np.log(np.asarray(mus, dtype=float))
    return panel_nodes(shifts.min() - T, shifts.max() + T, panels, order)


def dirichlet_energy(params: ProblemParams, phi, dphi, weights) -> float:
    """``int |x|^{-2a} |grad u|^2 = omega int (phi'^2 + gamma phi^2) dt`` on quadrature nodes."""
    return sphere_area(params.n) * float((dphi ** 2 + params.gamma * phi ** 2) @ weights)


def scalar_rayleigh_quotient(params: ProblemParams, trial, mus) -> float:
    t, w = _trial_nodes(params, mus)
    phi, dphi = trial(t)
    lp = sphere_area(params.n) * float(np.abs(phi) ** params.p @ w)
    return dirichlet_energy(params, phi, dphi, w) / lp ** (2 / params.p)


def vector_rayleigh_quotient(params: ProblemParams, trial_u, trial_v, mus) -> float:
    """Quotient of the vector inequality for radial trial pairs.

    ``(D(u) + D(v)) / (int |x|^{-bp}(|u|^p + |v|^p + p nu |u|^alpha |v|^beta))^{2/p}``.
    """
    t, w = _trial_nodes(params, mus)
    pu, dpu = trial_u(t)
    pv, dpv = trial_v(t)
    p = params.p
    au, av = np.abs(pu), np.abs(pv)
    dens = au ** p + av ** p + p * params.nu * au ** params.alpha * av ** params.beta
    lp = sphere_area(params.n) * float(dens @ w)
    num = dirichlet_energy(params, pu, dpu, w) + dirichlet_energy(params, pv, dpv, w)
    return num / lp ** (2 / p)


def synchronised_energies(system, c, s: float = 1.0, mu: float = 1.0) -> tuple[float, float]:
    """Weighted Dirichlet energy and integrated nonlinearity of ``(s c_i U_mu)`` by quadrature.

    For a solution the two agree (multiply each equation by its component
    and integrate by parts).
    """
    spec = CouplingSpec.from_pair(system) if isinstance(system, ProblemParams) else system
    P = spec.params
    c = s * np.asarray(c, dtype=float)
    t, w = _trial_nodes(P, [mu])
    phi = emden_fowler_bubble(P, t, mu)
    dphi = emden_fowler_bubble_dt(P, t, mu)
    dirichlet = float(np.dot(c, c)) * dirichlet_energy(P, phi, dphi, w)
    pot = float(spec.potential(c[:, None])[0]) * sphere_area(P.n) * float(phi ** P.p @ w)
    return dirichlet, pot
