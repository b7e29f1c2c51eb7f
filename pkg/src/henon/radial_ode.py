"""Radial solutions of the coupled system launched from their values at the origin.

A radial solution of

    -div(|x|^{-2a} grad u_i) = |x|^{-bp} F_i(u),   u_i(0) given,

is the fixed point of

    u_i(r) = u_i(0) - int_0^r s^{2a+1-n} int_0^s t^{n-1-bp} F_i(u(t)) dt ds.

In the variable ``rho = r^sigma`` with ``sigma = 2a + 2 - bp`` this becomes

    u(rho) = u(0) - sigma^{-2} int_0^rho tau^{-1-e} int_0^tau xi^e F(u(xi)) dxi dtau,
    e = 2 lam / sigma,

and the solution is analytic in ``rho``.  The solver advances over windows
``[rho_a, rho_b]`` and runs Picard iteration on each window with Chebyshev
collocation.  On the first window the weight ``xi^e`` is absorbed into a
Gauss-Jacobi rule, so the singular inner integral is exact for polynomials.
Window lengths adapt to the measured contraction ratio of the iteration.
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.polynomial import chebyshev as C
from scipy.optimize import brentq, minimize_scalar
from scipy.special import roots_jacobi

from ._fd import second_derivative
from .errors import (BlowUp, ConstraintViolation, GridMismatch, NoConvergence,
                     NotProportional, TailNotResolved, VanishedSolution)
from .params import CouplingSpec, ProblemParams
from .profile import RadialProfile, common_grid

log = logging.getLogger(__name__)

NODES = 24             # Chebyshev degree per window
JACOBI_POINTS = 28     # inner rule on the first window
BLOWUP_FACTOR = 1e8
MAX_PICARD = 80
GROWTH = 1.6
FAR_SWITCH = 1e-3      # try the far field once every component is below this fraction of max u(0)
FAR_MATCH = 1e-9       # relative agreement with the forward values required to accept it


@dataclass(frozen=True)
class InitialData:
    """Positive values ``u_i(0)``."""

    values_at_zero: np.ndarray

    def __post_init__(self):
        v = np.atleast_1d(np.array(self.values_at_zero, dtype=float))
        if v.ndim != 1 or v.size == 0:
            raise ConstraintViolation("initial data must be a non-empty vector")
        if not np.all(np.isfinite(v)) or np.any(v <= 0):
            raise ConstraintViolation(f"initial data must be positive, got {v.tolist()}")
        v.setflags(write=False)
        object.__setattr__(self, "values_at_zero", v)

    @property
    def k(self) -> int:
        return self.values_at_zero.size


@dataclass(frozen=True)
class AsymptoticData:
    """Limits ``u_i(0)`` and ``|x|^{n-2-2a} u_i(x)`` at infinity, with fit diagnostics.

    ``decay_exponents`` are the fitted ``r``-exponents of the decay at
    infinity (``n - 2 - 2a`` for a genuine solution) and
    ``origin_exponents`` the fitted exponents at the origin (zero).
    """

    u0: np.ndarray
    u_inf: np.ndarray
    fit_residuals: np.ndarray
    decay_exponents: np.ndarray
    origin_exponents: np.ndarray

    def to_dict(self) -> dict:
        return {k: np.asarray(v).tolist() for k, v in self.__dict__.items()}


# ---------------------------------------------------------------------------
# Chebyshev machinery on the reference interval [-1, 1]


@lru_cache(maxsize=8)
def _cheb_setup(N: int):
    """Lobatto nodes, values-to-coefficients map and cumulative integration map."""
    x = -np.cos(np.pi * np.arange(N + 1) / N)
    V = C.chebvander(x, N)
    to_coef = np.linalg.inv(V)
    # Q @ values = int_{-1}^{x_j} of the interpolant
    Q = np.empty((N + 1, N + 1))
    for m in range(N + 1):
        e = np.zeros(N + 1)
        e[m] = 1.0
        Q[:, m] = C.chebval(x, C.chebint(e, lbnd=-1))
    Q = Q @ to_coef
    for arr in (x, to_coef, Q):
        arr.setflags(write=False)
    return x, to_coef, Q


@lru_cache(maxsize=8)
def _first_window_rule(N: int, M: int, e: float):
    """Map from nodal values to values at ``tau_j s_k``, and weights of ``int_0^1 s^e g(s) ds``."""
    x, to_coef, _ = _cheb_setup(N)
    xs, ws = roots_jacobi(M, 0.0, e)
    s = 0.5 * (1 + xs)
    w = ws * 2.0 ** (-e - 1)
    tau = 0.5 * (1 + x)                       # nodes of [0, 1]
    pts = 2 * (tau[:, None] * s[None, :]) - 1  # back to [-1, 1]
    E = C.chebvander(pts.ravel(), N) @ to_coef
    return E, w


@dataclass(frozen=True, eq=False)
class Window:
    rho_a: float
    rho_b: float
    coef: np.ndarray        # (k, N+1) Chebyshev coefficients of u on [rho_a, rho_b]
    flux_coef: np.ndarray   # same for the accumulated integral int_0^rho xi^e F dxi
    iterations: int
    contraction: float
    # on the first window flux_coef describes acc / rho^{flux_power}, which is smooth
    flux_power: float = 0.0

    def _x(self, rho):
        return (2 * rho - (self.rho_a + self.rho_b)) / (self.rho_b - self.rho_a)

    def u(self, rho):
        return np.array([C.chebval(self._x(rho), c) for c in self.coef])

    def accumulated(self, rho):
        vals = np.array([C.chebval(self._x(rho), c) for c in self.flux_coef])
        return vals * np.asarray(rho) ** self.flux_power if self.flux_power else vals


@dataclass(frozen=True, eq=False)
class FarField:
    """The solution beyond ``rho_s``, written as ``u = rho^{-e} W(s)`` with ``s = rho_s / rho``.

    Because ``F`` is homogeneous of degree ``p - 1`` and ``e (p - 2) = 2``,
    the decaying solution satisfies on ``s in [0, 1]``

        W(s) = sigma^{-2} int_0^1 y^{e-1} A(s y) dy,
        A(s) = A(rho_s) + rho_s^{-1} int_s^1 F(W(z)) dz,

    where ``A`` is the accumulated integral.  Both are smooth in ``s``, so
    one Chebyshev series covers ``[rho_s, inf)`` with full relative
    accuracy, which forward values (a small difference of O(1) terms)
    cannot provide.  ``W(0)`` is the limit of ``rho^e u``.
    """

    rho_s: float
    e: float
    w_coef: np.ndarray
    a_coef: np.ndarray
    iterations: int
    contraction: float
    mismatch: float

    def _x(self, rho):
        return 2 * self.rho_s / np.asarray(rho, dtype=float) - 1

    def u(self, rho):
        W = np.array([C.chebval(self._x(rho), c) for c in self.w_coef])
        return W * np.asarray(rho, dtype=float) ** (-self.e)

    def accumulated(self, rho):
        return np.array([C.chebval(self._x(rho), c) for c in self.a_coef])

    @property
    def limit(self) -> np.ndarray:
        """``lim rho^e u(rho)``."""
        return np.array([C.chebval(-1.0, c) for c in self.w_coef])


def _far_field(spec, u_s, acc_s, rho_s, tol, N, M):
    """Fixed point for :class:`FarField`; ``None`` if it does not contract or resolve."""
    P = spec.params
    sig = P.sigma
    e = 2 * P.lam / sig
    x, to_coef, Q = _cheb_setup(N)
    E, w = _first_window_rule(N, M, e - 1)
    k = spec.k
    W = np.repeat((u_s * rho_s ** e)[:, None], N + 1, axis=1)
    tail_int = Q[-1][None, :] - Q          # int_{x_j}^1 on [-1, 1]
    diffs = []
    for it in range(1, MAX_PICARD + 1):
        A = acc_s[:, None] + (0.5 / rho_s) * (spec.nonlinearity(W) @ tail_int.T)
        W_new = ((A @ E.T).reshape(k, N + 1, M) @ w) / (sig * sig)
        d = float(np.max(np.abs(W_new - W)))
        W = W_new
        diffs.append(d)
        if not np.all(np.isfinite(W)) or np.any(W <= 0):
            return None
        if d <= tol * np.max(W):
            break
        if len(diffs) >= 3 and diffs[-1] > 0.5 * diffs[-2]:
            return None
    else:
        return None
    w_coef, a_coef = W @ to_coef.T, A @ to_coef.T
    if np.max(np.abs(w_coef[:, -3:])) > 1e-2 * tol * np.max(W) + 1e-16 * np.max(W):
        return None
    pairs = [b / a for a, b in zip(diffs[:-1], diffs[1:]) if a > 0]
    mismatch = float(np.max(np.abs(W[:, -1] * rho_s ** (-e) - u_s) / u_s))
    return FarField(rho_s, e, w_coef, a_coef, it, max(pairs) if pairs else 0.0, mismatch)


@dataclass(eq=False)
class PicardSolution:
    """Dense output of :func:`picard_solve`.

    Call it with radii to get ``u`` (shape ``(k, len(r))``).  ``flux(r)``
    is ``r^{n-1-2a} u'(r)``.  ``profiles()`` samples the solution in the
    Emden-Fowler variable.  Beyond ``far.rho_s`` (when present) values come
    from the :class:`FarField` rather than the forward windows.
    """

    spec: CouplingSpec
    init: InitialData
    r_max: float
    windows: list
    vanished: bool = False
    vanish_radius: float | None = None
    within_hypotheses: bool = True
    meta: dict = field(default_factory=dict)
    far: FarField | None = None

    @property
    def params(self) -> ProblemParams:
        return self.spec.params

    @property
    def sigma(self) -> float:
        return self.params.sigma

    @property
    def iterations(self) -> int:
        return sum(w.iterations for w in self.windows) + (self.far.iterations if self.far else 0)

    @property
    def r_end(self) -> float:
        if self.far is not None:
            return max(self.r_max, self.far.rho_s ** (1 / self.sigma))
        return self.windows[-1].rho_b ** (1 / self.sigma)

    def _locate(self, rho):
        edges = np.array([w.rho_b for w in self.windows])
        return np.minimum(np.searchsorted(edges, rho), len(self.windows) - 1)

    def _eval(self, r, which):
        r = np.asarray(r, dtype=float)
        reach = math.inf if self.far is not None else self.r_end
        if np.any(r < 0) or np.any(r > reach * (1 + 1e-12)):
            raise ValueError(f"radii must lie in [0, {reach:g}]")
        rho = r.ravel() ** self.sigma
        out = np.empty((self.spec.k, rho.size))
        outside = np.zeros(rho.size, dtype=bool)
        if self.far is not None:
            outside = rho > self.far.rho_s
            if outside.any():
                ff = self.far
                out[:, outside] = ff.u(rho[outside]) if which == "u" else ff.accumulated(rho[outside])
        idx = self._locate(rho)
        for i in np.unique(idx[~outside]):
            sel = (idx == i) & ~outside
            w = self.windows[i]
            out[:, sel] = w.u(rho[sel]) if which == "u" else w.accumulated(rho[sel])
        return out.reshape((self.spec.k,) + r.shape), rho.reshape(r.shape)

    def __call__(self, r) -> np.ndarray:
        return self._eval(r, "u")[0]

    def flux(self, r) -> np.ndarray:
        """``r^{n-1-2a} u_i'(r) = -sigma^{-1} int_0^rho xi^e F_i d xi``."""
        acc, _ = self._eval(r, "acc")
        return -acc / self.sigma

    def nodes(self) -> np.ndarray:
        """Radii of all collocation nodes, increasing, without duplicates."""
        x, _, _ = _cheb_setup(self.windows[0].coef.shape[1] - 1)
        rho = [w.rho_a + 0.5 * (1 + x[:-1]) * (w.rho_b - w.rho_a) for w in self.windows]
        rho.append([self.windows[-1].rho_b])
        if self.far is not None:
            s = 0.5 * (1 + x[1:-1])
            rho.append(np.sort(self.far.rho_s / s))
        r = np.concatenate(rho) ** (1 / self.sigma)
        return r[r <= self.r_end]

    def profiles(self, t_min: float | None = None, t_max: float | None = None,
                 n_pts: int = 6001) -> list[RadialProfile]:
        """Sample ``phi_i(t) = r^lam u_i(r)`` on a uniform grid in ``t = -ln r``.

        The default range runs from ``-ln r_end`` far enough towards the
        origin that ``phi`` has dropped by about ``1e-14`` and ``u`` is
        within about ``1e-12`` of ``u(0)`` (``rho`` below ``1e-12`` times the
        scale on which the data at the origin change).
        """
        lam, sig = self.params.lam, self.sigma
        t_lo = -math.log(self.r_end) if t_min is None else t_min
        if t_max is None:
            rho_flat = 1e-12 * _natural_scale(self.spec, self.init.values_at_zero)
            t_hi = max(t_lo + 34.0 / lam, 14 * math.log(10) / lam, -math.log(rho_flat) / sig)
        else:
            t_hi = t_max
        t = np.linspace(t_lo, t_hi, n_pts)
        r = np.exp(-t)
        u = self(r if self.far is not None else np.minimum(r, self.r_end))
        phi = np.clip(r ** lam * u, 0.0, None)
        meta = {"kind": "picard", "params": self.params.to_dict(),
                "init": self.init.values_at_zero.tolist()}
        return [RadialProfile(t, phi[i], lam, {**meta, "component": i}) for i in range(self.spec.k)]

    def report(self) -> dict:
        return {"windows": len(self.windows), "iterations": self.iterations,
                "r_end": self.r_end, "vanished": self.vanished,
                "vanish_radius": self.vanish_radius,
                "within_hypotheses": self.within_hypotheses,
                "max_contraction": max(w.contraction for w in self.windows),
                "far_field_from": None if self.far is None else self.far.rho_s ** (1 / self.sigma),
                "far_field_mismatch": None if self.far is None else self.far.mismatch, **self.meta}


def _as_spec(system) -> CouplingSpec:
    if isinstance(system, ProblemParams):
        return CouplingSpec.from_pair(system)
    return system


def _natural_scale(spec: CouplingSpec, u0: np.ndarray) -> float:
    """``rho`` over which the data at the origin change by an O(1) fraction."""
    sig = spec.params.sigma
    e = 2 * spec.params.lam / sig
    F = spec.nonlinearity(u0[:, None])[:, 0]
    ratio = np.max(F / u0)
    return sig * sig * (1 + e) / ratio if ratio > 0 else 1.0


def _picard_window(spec, u_a, acc_a, rho_a, h, tol, first, N, M):
    """Run Picard iteration on ``[rho_a, rho_a + h]``.

    Returns ``(U, ACC, iterations, ratio, converged)`` with nodal values of
    ``u`` and of the accumulated inner integral (divided by ``rho^{1+e}`` on
    the first window).
    """
    P = spec.params
    sig = P.sigma
    e = 2 * P.lam / sig
    x, to_coef, Q = _cheb_setup(N)
    rho = rho_a + 0.5 * (1 + x) * h
    scale = 0.5 * h
    k = spec.k
    if first:
        E, w = _first_window_rule(N, M, e)
        F0 = spec.nonlinearity(u_a[:, None])[:, 0]
        U = u_a[:, None] - (F0 / (sig * sig * (1 + e)))[:, None] * rho[None, :]
    else:
        slope = -acc_a / (sig * sig * rho_a ** (1 + e))
        U = u_a[:, None] + slope[:, None] * (rho - rho_a)[None, :]
    diffs = []
    for it in range(1, MAX_PICARD + 1):
        if first:
            vals = (U @ E.T).reshape(k, N + 1, M)
            G = spec.nonlinearity(vals) @ w            # int_0^1 s^e F(u(tau s)) ds
            U_new = u_a[:, None] - scale * (G @ Q.T) / (sig * sig)
            ACC = G
        else:
            g = rho[None, :] ** e * spec.nonlinearity(U)
            ACC = acc_a[:, None] + scale * (g @ Q.T)
            U_new = u_a[:, None] - scale * ((rho[None, :] ** (-1 - e) * ACC) @ Q.T) / (sig * sig)
        d = float(np.max(np.abs(U_new - U)))
        U = U_new
        diffs.append(d)
        if not np.all(np.isfinite(U)):
            return U, ACC, it, np.inf, False
        if d <= tol:
            break
        if len(diffs) >= 3 and diffs[-1] > 0.5 * diffs[-2] and diffs[-2] > 0.5 * diffs[-3]:
            return U, ACC, it, diffs[-1] / diffs[-2], False
    else:
        return U, ACC, MAX_PICARD, diffs[-1] / max(diffs[-2], 1e-300), False
    pairs = [b / a for a, b in zip(diffs[:-1], diffs[1:]) if a > 100 * tol]
    ratio = max(pairs) if pairs else 0.0
    return U, ACC, it, ratio, True


def picard_solve(system, init, r_max: float, tol: float = 1e-13, *,
                 blowup_factor: float = BLOWUP_FACTOR, nodes: int = NODES,
                 min_window: float = 1e-14) -> PicardSolution:
    """Integrate the radial system from ``u(0) = init`` up to ``r_max``.

    ``system`` is a :class:`CouplingSpec` or :class:`ProblemParams` (the
    two-component system).  ``tol`` bounds the sup-norm change between the
    last two Picard iterates on every window, relative to ``max u(0)``.

    Raises :class:`BlowUp` if a component exceeds ``blowup_factor * max u(0)``
    and :class:`NoConvergence` if a window cannot be made contractive.  If a
    component reaches zero the integration stops there with a
    :class:`VanishedSolution` warning and ``vanished=True``.  Once every
    component has fallen below ``FAR_SWITCH * max u(0)`` the decaying
    :class:`FarField` is tried; if it agrees with the forward values it
    covers everything further out and the forward march stops.
    """
    spec = _as_spec(system)
    if not isinstance(init, InitialData):
        init = InitialData(init)
    if init.k != spec.k:
        raise ConstraintViolation(f"initial data has {init.k} entries, the system has {spec.k} components")
    if not r_max > 0:
        raise ConstraintViolation("r_max must be positive")
    if not tol > 0:
        raise ConstraintViolation("tol must be positive")
    P = spec.params
    sig = P.sigma
    u0 = init.values_at_zero.astype(float)
    umax = float(u0.max())
    atol = tol * umax
    cap = blowup_factor * umax
    rho_max = r_max ** sig
    h = min(0.1 * _natural_scale(spec, u0), rho_max)
    h_floor = min_window * max(_natural_scale(spec, u0), 1.0)
    x, to_coef, _ = _cheb_setup(nodes)

    windows: list[Window] = []
    rho_a, u_a, acc_a = 0.0, u0, np.zeros(spec.k)
    vanished, vanish_r, far = False, None, None
    while rho_a < rho_max * (1 - 1e-15):
        h = min(h, rho_max - rho_a)
        U, ACC, its, ratio, ok = _picard_window(spec, u_a, acc_a, rho_a, h, atol,
                                                not windows, nodes, JACOBI_POINTS)
        coef = U @ to_coef.T
        tail = np.max(np.abs(coef[:, -3:])) if ok else np.inf
        if not ok or tail > 1e-2 * atol + 1e-16 * umax:
            h *= 0.5
            if h < h_floor:
                raise NoConvergence(f"Picard iteration does not contract on windows near rho = {rho_a:.6g}")
            continue
        if np.max(U) > cap:
            raise BlowUp(f"a component exceeded {cap:.3g} before r = {r_max:g}")
        power = 1 + 2 * P.lam / sig if not windows else 0.0
        win = Window(rho_a, rho_a + h, coef, ACC @ to_coef.T, its, ratio, power)
        if np.min(U) <= 0:
            rho_z = _first_zero(win)
            vanished, vanish_r = True, rho_z ** (1 / sig)
            windows.append(Window(rho_a, rho_z, _restrict(win.coef, rho_a, rho_a + h, rho_z, nodes),
                                  _restrict(win.flux_coef, rho_a, rho_a + h, rho_z, nodes), its, ratio,
                                  power))
            warnings.warn(VanishedSolution(f"a component vanishes at r = {vanish_r:.8g}"), stacklevel=2)
            break
        windows.append(win)
        rho_a = win.rho_b
        u_a = U[:, -1].copy()
        acc_a = ACC[:, -1] * win.rho_b ** power if power else ACC[:, -1].copy()
        if its <= 12 and ratio < 0.25:
            h *= GROWTH
        if np.max(u_a) < FAR_SWITCH * umax:
            far = _far_field(spec, u_a, acc_a, rho_a, tol, nodes, JACOBI_POINTS)
            if far is not None and far.mismatch < FAR_MATCH:
                break
            far = None
    within = P.a >= 0 and P.b != 0
    if not within:
        log.info("a = %g, b = %g lies outside a >= 0, b != 0: uniqueness theory does not cover this run",
                 P.a, P.b)
    return PicardSolution(spec, init, r_max, windows, vanished, vanish_r, within,
                          {"tol": tol, "nodes": nodes}, far)


def _first_zero(win: Window) -> float:
    """Smallest ``rho`` in the window where some component reaches zero."""
    grid = np.linspace(win.rho_a, win.rho_b, 2001)
    vals = win.u(grid)
    best = win.rho_b
    for idx, comp in enumerate(vals):
        neg = np.flatnonzero(comp <= 0)
        if neg.size == 0:
            continue
        j = neg[0]
        if j == 0:
            return win.rho_a
        root = brentq(lambda s: float(win.u(np.array([s]))[idx, 0]), grid[j - 1], grid[j], xtol=1e-15)
        best = min(best, root)
    return best


def _restrict(coef, a, b, c, N):
    """Chebyshev coefficients on ``[a, c]`` of a series given on ``[a, b]``."""
    x, to_coef, _ = _cheb_setup(N)
    rho = a + 0.5 * (1 + x) * (c - a)
    xr = (2 * rho - (a + b)) / (b - a)
    return np.array([C.chebval(xr, cf) for cf in coef]) @ to_coef.T


# ---------------------------------------------------------------------------
# Diagnostics on sampled profiles


def residual(system, profiles) -> float:
    """Max over nodes and components of ``|-phi'' + gamma phi - F(phi)|``.

    Derivatives are 9-point finite differences on the common grid of the
    profiles; values are in the Emden-Fowler form of the radial equation.
    """
    spec = _as_spec(system) if not isinstance(system, CouplingSpec) else system
    if len(profiles) != spec.k:
        raise GridMismatch(f"{len(profiles)} profiles given for a {spec.k}-component system")
    t = common_grid(profiles)
    if t.size < 9:
        raise GridMismatch("residual needs at least 9 nodes")
    phi = np.array([pr.values for pr in profiles])
    d2 = second_derivative(t, phi)
    res = -d2 + spec.params.gamma * phi - spec.nonlinearity(phi)
    return float(np.max(np.abs(res)))


def asymptotics(profiles, tail_fraction: float = 0.05, tol: float = 1e-4) -> AsymptoticData:
    """Limits at the origin and at infinity read off the two ends of ``t``.

    ``u(0)`` is the mean of ``phi e^{lam t}`` over the right tail and
    ``u_inf`` the mean of ``phi e^{-lam t}`` over the left tail.  The fit
    residual is the larger relative spread of the two plateaus; a spread
    above ``tol`` raises :class:`TailNotResolved`.
    """
    u0, uinf, res, dec, org = [], [], [], [], []
    for pr in profiles:
        t, v = pr.t_grid, pr.values
        m = max(8, int(tail_fraction * t.size))
        if np.any(v[:m] <= 0) or np.any(v[-m:] <= 0):
            raise TailNotResolved("profile vanishes in a tail window")
        right = v[-m:] * np.exp(pr.lam * t[-m:])
        left = v[:m] * np.exp(-pr.lam * t[:m])
        spread = max(np.ptp(right) / np.mean(right), np.ptp(left) / np.mean(left))
        fit = pr.tail_fit(m)
        u0.append(float(np.mean(right)))
        uinf.append(float(np.mean(left)))
        res.append(float(spread))
        # u = r^{-lam} phi and phi ~ e^{s t} = r^{-s}: r-exponent of u is -(lam + s)
        dec.append(pr.lam + fit["left"]["slope"])
        org.append(pr.lam + fit["right"]["slope"])
    data = AsymptoticData(*(np.array(x) for x in (u0, uinf, res, dec, org)))
    if np.max(data.fit_residuals) > tol:
        raise TailNotResolved(f"tail plateau spread {np.max(data.fit_residuals):.2e} exceeds {tol:.0e}; "
                              "integrate further out")
    return data


# ---------------------------------------------------------------------------
# Uniqueness and inversion symmetry


@dataclass(frozen=True)
class UniquenessReport:
    theta: float
    deviation: np.ndarray
    tol: float
    r_max: float
    runs: tuple

    @property
    def passed(self) -> bool:
        return bool(np.max(self.deviation) < self.tol)

    def to_dict(self) -> dict:
        return {"theta": self.theta, "deviation": self.deviation.tolist(), "tol": self.tol,
                "r_max": self.r_max, "passed": self.passed}


def proportionality_factor(init1, init2, rtol: float = 1e-12) -> float:
    a = InitialData(init1).values_at_zero if not isinstance(init1, InitialData) else init1.values_at_zero
    b = InitialData(init2).values_at_zero if not isinstance(init2, InitialData) else init2.values_at_zero
    if a.shape != b.shape:
        raise NotProportional("initial data have different lengths")
    ratios = b / a
    theta = float(np.mean(ratios))
    if np.max(np.abs(ratios - theta)) > rtol * theta:
        raise NotProportional(f"initial data are not proportional: ratios {ratios.tolist()}")
    return theta


def uniqueness_experiment(system, init1, init2, r_max: float, tol: float = 1e-8,
                          n_samples: int = 2000, solve_tol: float = 1e-13) -> UniquenessReport:
    """Compare two solutions whose data at the origin are proportional.

    With ``init2 = theta * init1`` the solutions ``u`` (from ``init1``) and
    ``v`` (from ``init2``) are related through the dilation symmetry of the
    system: ``v(r) = theta u(theta^{1/lam} r)``.  Both are integrated
    independently and the per-component relative deviation from this law
    is reported over ``[0, r_max]``, skipping values below ``1e-6 v_i(0)``
    when a solution vanishes inside the interval.
    """
    spec = _as_spec(system)
    theta = proportionality_factor(init1, init2)
    lam = spec.params.lam
    stretch = theta ** (1 / lam)
    sol_u = picard_solve(spec, init1, max(r_max, stretch * r_max), solve_tol)
    sol_v = picard_solve(spec, init2, r_max, solve_tol)
    reach = min(sol_v.r_end, sol_u.r_end / stretch)
    r = np.unique(np.concatenate([np.linspace(0.0, reach, n_samples),
                                  sol_v.nodes()[sol_v.nodes() <= reach]]))
    v = sol_v(r)
    u = sol_u(np.minimum(stretch * r, sol_u.r_end))
    # a relative measure is meaningless next to a zero of a vanishing solution
    floor = 1e-6 * sol_v.init.values_at_zero[:, None]
    keep = v > floor
    dev = np.array([np.max(np.abs(vi[m] - theta * ui[m]) / vi[m]) if m.any() else 0.0
                    for vi, ui, m in zip(v, u, keep)])
    return UniquenessReport(theta, dev, tol, reach, (sol_u, sol_v))


@dataclass(frozen=True, eq=False)
class InversionResult:
    tau: float
    shift: float
    profile: RadialProfile
    defect: float

    def __iter__(self):
        return iter((self.tau, self.profile))


def _evenness_gradient(sp, s, t):
    d = sp(s + t) - sp(s - t)
    dd = sp(s + t, 1) - sp(s - t, 1)
    return float(np.sum(d * dd))


def inversion_normalize(profile: RadialProfile, n_pts: int | None = None) -> InversionResult:
    """Translate in ``t`` so that the profile becomes even.

    The shift ``s`` minimises the evenness defect
    ``int (phi(s + t) - phi(s - t))^2 dt`` over a symmetric window; ``tau
    = e^{-s}`` is the matching dilation.  The returned profile is sampled on
    a grid symmetric about zero and ``defect`` is its largest relative
    deviation from evenness.
    """
    t, v = profile.t_grid, profile.values
    sp = profile.spline
    i = int(np.argmax(v))
    s0 = float(t[i])
    width = 0.9 * min(s0 - t[0], t[-1] - s0)
    if width <= 0:
        raise ValueError("profile peak lies at the edge of its grid")
    h = float(np.min(np.diff(t)))
    probe = np.linspace(0.0, width, max(200, int(width / h)))
    obj = lambda s: float(np.sum((sp(s + probe) - sp(s - probe)) ** 2))
    lo, hi = s0 - 2 * (t[1] - t[0]), s0 + 2 * (t[1] - t[0])
    lo, hi = max(lo, t[0] + width), min(hi, t[-1] - width)
    s = minimize_scalar(obj, bounds=(lo, hi), method="bounded", options={"xatol": 1e-12}).x
    g = lambda z: _evenness_gradient(sp, z, probe)
    a, b = s - 1e-6, s + 1e-6
    if g(a) * g(b) < 0:
        s = brentq(g, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    half = min(s - t[0], t[-1] - s)
    m = n_pts or int(2 * half / h) | 1
    tt = np.linspace(-half, half, m)
    vals = np.clip(sp(tt + s), 0.0, None)
    defect = float(np.max(np.abs(vals - vals[::-1])) / np.max(vals))
    out = RadialProfile(tt, vals, profile.lam, {**profile.meta, "recentered_by": s})
    return InversionResult(math.exp(-s), s, out, defect)
