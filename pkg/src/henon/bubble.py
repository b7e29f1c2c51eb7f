"""Explicit bubble solutions and the coordinate changes built around them.

The bubble is

    U(r) = K (1 + r^q)^{-m},   q = 2(n-2-2a)(1+a-b) / (n - 2(1+a-b)),
                                m = (n - 2(1+a-b)) / (2(1+a-b)),

with ``K^{p-2} = n (n-2-2a)^2 / (n - 2(1+a-b))`` and dilations
``U_mu(r) = mu^{(2-n-2a)/2} U(r/mu)``.  In the variable ``t = -ln r`` the
rescaled profile ``phi(t) = r^lam U(r)`` is ``K (2 cosh(q t / 2))^{-m}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConstraintViolation, DomainError
from .params import ProblemParams
from .profile import RadialProfile

# tails below this fraction of the peak are dropped from default grids
TAIL_EPS = 1e-14


def bubble_exponents(params: ProblemParams) -> tuple[float, float]:
    """Return ``(q, m)`` with ``U = K (1 + r^q)^{-m}``; note ``q m = 2 lam``."""
    n, a, b = params.n, params.a, params.b
    d = 1 + a - b
    q = 2 * (n - 2 - 2 * a) * d / (n - 2 * d)
    m = (n - 2 * d) / (2 * d)
    return q, m


def bubble_constant(params: ProblemParams) -> float:
    n, a, b = params.n, params.a, params.b
    d = 1 + a - b
    return (n * (n - 2 - 2 * a) ** 2 / (n - 2 * d)) ** ((n - 2 * d) / (4 * d))


@dataclass(frozen=True)
class BubbleParams:
    params: ProblemParams
    mu: float = 1.0

    def __post_init__(self):
        if not self.mu > 0:
            raise DomainError(f"scaling factor mu = {self.mu} must be positive")


def _as_bubble(bp) -> BubbleParams:
    return bp if isinstance(bp, BubbleParams) else BubbleParams(bp)


def _check_radii(r) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    if np.any(~(r > 0)):
        raise DomainError("bubble is evaluated at r > 0 only")
    return r


def bubble_value(bp: BubbleParams, r) -> np.ndarray:
    """``U_mu(r)``; raises :class:`DomainError` for ``r <= 0``."""
    bp = _as_bubble(bp)
    r = _check_radii(r)
    q, m = bubble_exponents(bp.params)
    K = bubble_constant(bp.params)
    s = r / bp.mu
    return bp.mu ** (-bp.params.lam) * K * np.exp(-m * np.log1p(s ** q))


def bubble_derivatives(bp: BubbleParams, r) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(U_mu, U_mu', U_mu'')`` at ``r > 0`` from the closed form."""
    bp = _as_bubble(bp)
    r = _check_radii(r)
    q, m = bubble_exponents(bp.params)
    K = bubble_constant(bp.params)
    mu = bp.mu
    s = r / mu
    sq = s ** q
    w = 1.0 + sq
    amp = mu ** (-bp.params.lam) * K
    u = amp * w ** (-m)
    # d/ds of (1+s^q)^{-m}
    d1 = -m * q * s ** (q - 1) * w ** (-m - 1)
    d2 = -m * q * s ** (q - 2) * w ** (-m - 2) * ((q - 1) * w - (m + 1) * q * sq)
    return u, amp * d1 / mu, amp * d2 / mu ** 2


def radial_residual_terms(n, a, b, p, r, u, du, ddu, rhs=None, potential=0.0):
    """Terms of ``-div(|x|^{-2a} grad u) + potential |x|^{-2-2a} u - |x|^{-bp} rhs``.

    ``rhs`` defaults to ``u^{p-1}``.  Returns ``(residual, scale)`` where
    ``scale`` is the sum of absolute values of the individual terms.
    """
    if rhs is None:
        rhs = np.abs(u) ** (p - 1)
    t1 = -r ** (-2 * a) * ddu
    t2 = -r ** (-2 * a) * (n - 1 - 2 * a) * du / r
    t3 = potential * r ** (-2 - 2 * a) * u
    t4 = -r ** (-b * p) * rhs
    return t1 + t2 + t3 + t4, np.abs(t1) + np.abs(t2) + np.abs(t3) + np.abs(t4)


def bubble_residual(bp: BubbleParams, r) -> np.ndarray:
    """Pointwise relative residual of the radial scalar equation at ``U_mu``."""
    bp = _as_bubble(bp)
    P = bp.params
    u, du, ddu = bubble_derivatives(bp, r)
    res, scale = radial_residual_terms(P.n, P.a, P.b, P.p, np.asarray(r, float), u, du, ddu)
    return np.abs(res) / scale


def emden_fowler_bubble(params: ProblemParams, t, mu: float = 1.0) -> np.ndarray:
    """``phi(t) = r^lam U_mu(r)`` at ``r = e^{-t}``, evaluated without overflow."""
    q, m = bubble_exponents(params)
    K = bubble_constant(params)
    x = 0.5 * q * (np.asarray(t, dtype=float) + math.log(mu))
    return K * np.exp(-m * np.logaddexp(x, -x))


def emden_fowler_bubble_dt(params: ProblemParams, t, mu: float = 1.0) -> np.ndarray:
    q, m = bubble_exponents(params)
    x = 0.5 * q * (np.asarray(t, dtype=float) + math.log(mu))
    return -0.5 * q * m * np.tanh(x) * emden_fowler_bubble(params, t, mu)


def default_half_width(params: ProblemParams, eps: float = TAIL_EPS) -> float:
    """Half width ``T`` with the tail, and its leading correction, below ``eps``."""
    q, _ = bubble_exponents(params)
    return -math.log(eps) / min(params.lam, q)


def bubble_profile(bp: BubbleParams, t_min: float | None = None, t_max: float | None = None,
                   n_pts: int = 4001) -> RadialProfile:
    """Sample ``phi_{U_mu}`` on a uniform ``t`` grid (default ``[-T, T]``)."""
    bp = _as_bubble(bp)
    if n_pts < 16:
        raise ConstraintViolation("n_pts must be at least 16")
    T = default_half_width(bp.params)
    t_min = -T if t_min is None else t_min
    t_max = T if t_max is None else t_max
    if not t_min < t_max:
        raise ConstraintViolation("t_min must be smaller than t_max")
    t = np.linspace(t_min, t_max, n_pts)
    return RadialProfile(t, emden_fowler_bubble(bp.params, t, bp.mu), bp.params.lam,
                         {"kind": "bubble", "mu": bp.mu, "params": bp.params.to_dict()})


def soliton_profile(params: ProblemParams, t) -> np.ndarray:
    """Even positive homoclinic of ``-phi'' + gamma phi = phi^{p-1}``.

    ``phi(t) = A sech(w t)^{2/(p-2)}`` with ``A = (p gamma / 2)^{1/(p-2)}`` and
    ``w = (p-2) sqrt(gamma) / 2``.
    """
    p, g = params.p, params.gamma
    A = (p * g / 2) ** (1 / (p - 2))
    w = (p - 2) * math.sqrt(g) / 2
    x = w * np.asarray(t, dtype=float)
    # sech(x) = 2 / (e^x + e^-x), computed in log space
    return A * np.exp((2 / (p - 2)) * (math.log(2) - np.logaddexp(x, -x)))


def kelvin_transform(profile: RadialProfile) -> RadialProfile:
    """Modified Kelvin transform ``|x|^{2+2a-n} u(x/|x|^2)``: reflection in ``t``."""
    return RadialProfile(-profile.t_grid[::-1], profile.values[::-1], profile.lam,
                         {**profile.meta, "kelvin": not profile.meta.get("kelvin", False)})


@dataclass(frozen=True)
class HardySobolevMap:
    """Map between the weighted system and a doubly critical Hardy-Sobolev one.

    With ``shift = sqrt(lam_bar^2 + gamma_hs) - lam_bar`` the transformed
    weights are ``a_bar = a + shift``, ``b_bar = b + shift`` and
    ``u_bar = |x|^shift u``.  The Hardy coefficient enters as
    ``gamma_hs |x|^{-2(1 + a_bar)} u_bar``.
    """

    params: ProblemParams
    gamma_hs: float
    shift: float
    a_bar: float
    b_bar: float
    lam_bar: float

    def forward(self, r, u) -> np.ndarray:
        return np.asarray(r, float) ** self.shift * np.asarray(u, float)

    def inverse(self, r, u_bar) -> np.ndarray:
        return np.asarray(r, float) ** (-self.shift) * np.asarray(u_bar, float)

    def forward_fn(self, u: Callable) -> Callable:
        return lambda r: self.forward(r, u(r))

    def inverse_fn(self, u_bar: Callable) -> Callable:
        return lambda r: self.inverse(r, u_bar(r))

    def forward_profile(self, profile: RadialProfile) -> RadialProfile:
        # r^lam_bar * u_bar = r^(lam_bar + shift) u = r^lam u
        return profile.with_values(profile.values, hardy_sobolev_gamma=self.gamma_hs)

    def residual(self, bp: BubbleParams, r) -> np.ndarray:
        """Relative residual of the transformed radial equation at ``u_bar = |x|^shift U_mu``."""
        P = self.params
        r = np.asarray(r, dtype=float)
        u, du, ddu = bubble_derivatives(bp, r)
        d = self.shift
        ub = r ** d * u
        dub = d * r ** (d - 1) * u + r ** d * du
        ddub = d * (d - 1) * r ** (d - 2) * u + 2 * d * r ** (d - 1) * du + r ** d * ddu
        res, scale = radial_residual_terms(P.n, self.a_bar, self.b_bar, P.p, r, ub, dub, ddub,
                                           potential=self.gamma_hs)
        return np.abs(res) / scale


def hardy_sobolev_map(params: ProblemParams, gamma_hs: float) -> HardySobolevMap:
    """Solve ``a_bar = a + sqrt(lam_bar^2 + gamma_hs) - lam_bar`` for the new weights.

    Since ``lam_bar + shift = lam`` the relation reduces to
    ``lam_bar = sqrt(lam^2 - gamma_hs)``, which needs ``gamma_hs < lam^2``;
    ``gamma_hs > -lam_bar^2`` then holds automatically.
    """
    lam = params.lam
    if not gamma_hs < lam * lam:
        raise DomainError(f"gamma_hs = {gamma_hs} must be below lam^2 = {lam * lam}")
    lam_bar = math.sqrt(lam * lam - gamma_hs)
    if not gamma_hs > -lam_bar * lam_bar:
        raise DomainError(f"gamma_hs = {gamma_hs} must exceed -lam_bar^2 = {-lam_bar ** 2}")
    shift = lam - lam_bar
    return HardySobolevMap(params, float(gamma_hs), shift, params.a + shift, params.b + shift, lam_bar)
