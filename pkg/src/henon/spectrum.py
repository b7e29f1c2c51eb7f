"""Radial linearisation at the bubble and the nondegeneracy test for synchronised pairs.

In the Emden-Fowler variable the weighted eigenvalue problem
``-div(|x|^{-2a} grad w) = mu |x|^{-bp} U^{p-2} w`` restricted to radial
functions reads

    -psi'' + gamma psi = mu phi_U^{p-2} psi   on the line.

Its lowest eigenvalues are ``1`` (eigenfunction ``phi_U``) and ``p - 1``
(eigenfunction ``phi_U'``, the dilation mode).  Both are computed here with
second-order finite differences on a truncated interval and Richardson
extrapolation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import eigsh

from .bubble import emden_fowler_bubble, emden_fowler_bubble_dt
from .coupling import SyncConstants, solve_sync_2, sync_residual
from .errors import ConstraintViolation, GridTooCoarse, NotASyncRoot
from .params import ProblemParams, RegimeTag, classify_regime

DEGENERACY_TOL = 1e-10
RICHARDSON_RTOL = 1e-5


@dataclass(frozen=True)
class GridSpec:
    """``n`` interior nodes of the coarsest grid on ``[-T, T]``."""

    n: int = 3000
    T: float | None = None

    def half_width(self, params: ProblemParams) -> float:
        # eigenfunctions decay like e^{-lam |t|}; truncate where that is 1e-10
        return self.T if self.T is not None else 10 * math.log(10) / params.lam


@dataclass(frozen=True, eq=False)
class RadialEigenResult:
    """Lowest radial eigenpairs.

    ``eigenvalues`` are Richardson-extrapolated from grids with ``n``,
    ``2n + 1`` and ``4n + 3`` nodes.  ``eigenvectors`` live on the finest
    grid ``t`` and are normalised by ``int phi_U^{p-2} psi^2 dt = 1``;
    they change sign, so they are plain arrays rather than profiles.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    t: np.ndarray
    weight: np.ndarray
    raw: dict
    hypotheses_hold: bool
    grid: dict = field(default_factory=dict)

    def inner(self, f, g) -> float:
        h = self.t[1] - self.t[0]
        return float(np.sum(self.weight * f * g) * h)

    def cosine(self, i: int, g) -> float:
        """Weighted cosine between eigenvector ``i`` and samples ``g``."""
        psi = self.eigenvectors[i]
        return abs(self.inner(psi, g)) / math.sqrt(self.inner(psi, psi) * self.inner(g, g))

    def to_dict(self) -> dict:
        return {"eigenvalues": self.eigenvalues.tolist(),
                "raw": {k: v.tolist() for k, v in self.raw.items()},
                "hypotheses_hold": self.hypotheses_hold, "grid": self.grid}


def _solve_grid(params: ProblemParams, n: int, T: float, n_modes: int):
    t = np.linspace(-T, T, n + 2)[1:-1]
    h = t[1] - t[0]
    w = emden_fowler_bubble(params, t) ** (params.p - 2)
    main = np.full(n, 2.0 / h ** 2 + params.gamma)
    off = np.full(n - 1, -1.0 / h ** 2)
    A = sp.diags([off, main, off], [-1, 0, 1], format="csc")
    B = sp.diags(w, format="csc")
    # B psi = (1/mu) A psi: the largest 1/mu are the smallest mu
    vals, vecs = eigsh(B, k=n_modes, M=A, which="LA", tol=0)
    order = np.argsort(vals)[::-1]
    mu = 1.0 / vals[order]
    vecs = vecs[:, order].T
    norms = np.sqrt(np.sum(w * vecs ** 2, axis=1) * h)
    vecs = vecs / norms[:, None]
    # sign convention: positive where |psi| is largest on the left half
    for v in vecs:
        left = v[: n // 2]
        if left[np.argmax(np.abs(left))] < 0:
            v *= -1
    return t, w, mu, vecs


def radial_eigen(params: ProblemParams, n_modes: int = 3, grid: GridSpec | None = None,
                 rtol: float = RICHARDSON_RTOL) -> RadialEigenResult:
    """Lowest ``n_modes`` radial eigenvalues of the linearisation at the bubble.

    Three nested grids give two Richardson estimates; if they differ by
    more than ``rtol`` (relative) :class:`GridTooCoarse` is raised.
    """
    grid = grid or GridSpec()
    if n_modes < 1:
        raise ConstraintViolation("n_modes must be positive")
    T = grid.half_width(params)
    sizes = [grid.n, 2 * grid.n + 1, 4 * grid.n + 3]
    runs = [_solve_grid(params, n, T, n_modes) for n in sizes]
    mus = [r[2] for r in runs]
    rich1 = (4 * mus[1] - mus[0]) / 3
    rich2 = (4 * mus[2] - mus[1]) / 3
    gap = np.max(np.abs(rich2 - rich1) / np.abs(rich2))
    if gap > rtol:
        raise GridTooCoarse(f"Richardson estimates differ by {gap:.2e} (relative); refine the grid")
    t, w, _, vecs = runs[-1]
    regime = classify_regime(params)
    hyp = (params.a >= 0 and params.b != 0) or (params.a < 0 and regime.tag is RegimeTag.SYMMETRIC)
    return RadialEigenResult(rich2, vecs, t, w, {f"n={n}": m for n, m in zip(sizes, mus)}, hyp,
                             {"T": T, "sizes": sizes, "richardson_gap": float(gap)})


def bubble_modes(params: ProblemParams, t) -> tuple[np.ndarray, np.ndarray]:
    """``phi_U`` and ``phi_U'``, the expected eigenfunctions for ``1`` and ``p - 1``."""
    return emden_fowler_bubble(params, t), emden_fowler_bubble_dt(params, t)


# ---------------------------------------------------------------------------
# Nondegeneracy of synchronised pairs


@dataclass(frozen=True)
class NondegeneracyReport:
    c: tuple
    lhs: float
    rhs: float
    nondegenerate: bool
    sufficient_nu_bound: bool
    theta_matrix: np.ndarray
    theta_raw: np.ndarray
    simplification_error: float
    kind: str

    def to_dict(self) -> dict:
        finite = lambda x: None if isinstance(x, float) and not math.isfinite(x) else x
        return {"c": list(self.c), "lhs": finite(self.lhs), "rhs": self.rhs,
                "nondegenerate": self.nondegenerate, "sufficient_nu_bound": self.sufficient_nu_bound,
                "theta_matrix": self.theta_matrix.tolist() if self.kind == "positive" else None,
                "simplification_error": finite(self.simplification_error), "kind": self.kind}


def theta_matrices(params: ProblemParams, c1: float, c2: float) -> tuple[np.ndarray, np.ndarray]:
    """The coefficient matrix of the linearised system at ``(c1 U, c2 U)``, raw and simplified.

    Raw entries come from differentiating the nonlinearity; the simplified
    ones use the synchronisation equations to eliminate ``c_i^{p-2}``.
    """
    p, al, be, nu = params.p, params.alpha, params.beta, params.nu
    off = nu * al * be * c1 ** (al - 1) * c2 ** (be - 1)
    raw = np.array([[(p - 1) * c1 ** (p - 2) + nu * al * (al - 1) * c1 ** (al - 2) * c2 ** be, off],
                    [off, (p - 1) * c2 ** (p - 2) + nu * be * (be - 1) * c1 ** al * c2 ** (be - 2)]])
    simp = np.array([[p - 1 - nu * al * be * c1 ** (al - 2) * c2 ** be, off],
                     [off, p - 1 - nu * al * be * c1 ** al * c2 ** (be - 2)]])
    return raw, simp


def nondegeneracy_lhs(params: ProblemParams, c1: float, c2: float) -> float:
    al, be, nu = params.alpha, params.beta, params.nu
    return nu * al * be * (c1 ** (al - 2) * c2 ** be + c1 ** al * c2 ** (be - 2))


def nondegeneracy_check(params: ProblemParams, c1: float, c2: float,
                        tol: float = DEGENERACY_TOL, root_tol: float = 1e-10) -> NondegeneracyReport:
    """Decide whether ``(c1 U, c2 U)`` is nondegenerate.

    The pair is degenerate exactly when
    ``nu alpha beta (c1^{alpha-2} c2^beta + c1^alpha c2^{beta-2}) = p - 2``;
    the test uses ``|lhs - (p - 2)| > tol``.  Semi-trivial pairs are always
    nondegenerate.  Raises :class:`NotASyncRoot` if ``(c1, c2)`` does not
    solve the synchronisation system to ``root_tol``.
    """
    c1, c2 = float(c1), float(c2)
    if c1 < 0 or c2 < 0:
        raise NotASyncRoot("synchronisation constants must be nonnegative")
    res = sync_residual(params, [c1, c2])
    if res > root_tol or (c1 == 0 and c2 == 0):
        raise NotASyncRoot(f"({c1}, {c2}) is not a synchronisation root (residual {res:.2e})")
    p = params.p
    bound = params.nu <= (p - 2) / (2 * params.alpha * params.beta)
    if c1 == 0 or c2 == 0:
        nan = float("nan")
        return NondegeneracyReport((c1, c2), nan, p - 2, True, bound,
                                   np.full((2, 2), nan), np.full((2, 2), nan), nan, "semi_trivial")
    c1, c2 = float(c1), float(c2)
    raw, simp = theta_matrices(params, c1, c2)
    lhs = float(nondegeneracy_lhs(params, c1, c2))
    err = float(np.max(np.abs(raw - simp)))
    return NondegeneracyReport((c1, c2), lhs, p - 2, abs(lhs - (p - 2)) > tol, bound,
                               simp, raw, err, "positive")


@dataclass(frozen=True)
class Decoupling:
    """Diagonalisation of the simplified coefficient matrix.

    ``eigenvalues[0]`` belongs to the direction ``(c1, c2)`` and should be
    ``p - 1``; ``eigenvalues[1]`` belongs to ``(c2, -c1)`` and should be
    ``p - 1 - lhs``.  ``rotation`` has these unit directions as columns.
    ``gamma_error`` is the relative deviation of ``gamma_tilde`` from
    ``-c2/c1``.
    """

    eigenvalues: np.ndarray
    rotation: np.ndarray
    gamma_tilde: float
    gamma_error: float
    sync_error: float
    transverse_error: float

    def to_dict(self) -> dict:
        return {k: (v.tolist() if isinstance(v, np.ndarray) else v) for k, v in self.__dict__.items()}


def linearized_decouple(params: ProblemParams, c1: float, c2: float) -> Decoupling:
    if not (c1 > 0 and c2 > 0):
        raise ValueError("decoupling needs c1, c2 > 0")
    _, th = theta_matrices(params, c1, c2)
    t11, t22, t12 = th[0, 0], th[1, 1], th[0, 1]
    # g is the root of t12 g^2 - d g - t12 = 0 taken with the minus sign; since the two roots
    # multiply to -1, the first branch is the same root written without cancellation
    d = t11 - t22
    root = math.hypot(d, 2 * t12)
    g = -2 * t12 / (d + root) if d >= 0 else (d - root) / (2 * t12)
    vals, vecs = np.linalg.eigh(th)
    along = np.array([c1, c2]) / math.hypot(c1, c2)
    # order the eigenpairs as (synchronised direction, transverse direction)
    i = int(np.argmax(np.abs(vecs.T @ along)))
    order = [i, 1 - i]
    vals, vecs = vals[order], vecs[:, order]
    vecs = vecs * np.sign(vecs[0])
    p = params.p
    lhs = nondegeneracy_lhs(params, c1, c2)
    return Decoupling(vals, vecs, float(g), float(abs(g * c1 / c2 + 1)),
                      float(abs(vals[0] - (p - 1))), float(abs(vals[1] - (p - 1 - lhs))))


def near_degeneracies(params_list, threshold: float = 1e-3) -> list[dict]:
    """Synchronised roots with ``|lhs - (p - 2)| < threshold``, as candidates only."""
    out = []
    for P in params_list:
        try:
            roots: list[SyncConstants] = solve_sync_2(P)
        except Exception:  # noqa: BLE001 - a scan skips parameter sets without roots
            continue
        for r in roots:
            if r.kind != "positive":
                continue
            gap = nondegeneracy_lhs(P, *r.c) - (P.p - 2)
            if abs(gap) < threshold:
                out.append({"params": P.to_dict(), "c": r.c.tolist(), "gap": gap})
    return out
