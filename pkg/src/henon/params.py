"""Admissible parameters of the weighted critical system and their regimes.

The system is

    -div(|x|^{-2a} grad u) = |x|^{-bp} (u^{p-1} + nu alpha u^{alpha-1} v^beta)
    -div(|x|^{-2a} grad v) = |x|^{-bp} (v^{p-1} + nu beta  u^alpha v^{beta-1})

with ``p = 2n / (n - 2 + 2(b - a))`` and ``alpha + beta = p``.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from .errors import ConstraintViolation

# relative tolerance used for the alpha + beta = p constraint
_SUM_RTOL = 1e-10


def check_weights(n, a: float, b: float) -> None:
    """Raise :class:`ConstraintViolation` unless ``n >= 3`` and ``a <= b < a + 1``, ``a < (n-2)/2``."""
    if int(n) != n or n < 3:
        raise ConstraintViolation(f"n = {n}: dimension must be an integer n >= 3")
    if not a < (n - 2) / 2:
        raise ConstraintViolation(f"a = {a} violates a < (n-2)/2 = {(n - 2) / 2}")
    if b < a:
        raise ConstraintViolation(f"b = {b} < a = {a} violates a <= b")
    if not b < a + 1:
        raise ConstraintViolation(f"b = {b} violates b < a + 1 = {a + 1}")


def critical_exponent(n: int, a: float, b: float) -> float:
    """``p = 2n / (n - 2 + 2(b - a))`` for admissible ``(n, a, b)``."""
    check_weights(n, a, b)
    return 2.0 * n / (n - 2.0 + 2.0 * (b - a))


@dataclass(frozen=True)
class ProblemParams:
    """Validated scalar parameters plus the quantities derived from them.

    Build instances with :func:`validate_params`; the derived fields are
    filled in automatically and the constructor checks every invariant.
    """

    n: int
    a: float
    b: float
    nu: float
    alpha: float
    beta: float
    p: float = field(init=False)
    gamma: float = field(init=False)
    lam: float = field(init=False)

    def __post_init__(self):
        n, a, b = self.n, self.a, self.b
        p = critical_exponent(n, a, b)
        lam = (n - 2 - 2 * a) / 2
        if not self.nu > 0:
            raise ConstraintViolation(f"nu = {self.nu} violates nu > 0")
        if not (self.alpha > 1 and self.beta > 1):
            raise ConstraintViolation(
                f"(alpha, beta) = ({self.alpha}, {self.beta}) violates alpha > 1, beta > 1")
        if abs(self.alpha + self.beta - p) > _SUM_RTOL * p:
            raise ConstraintViolation(
                f"alpha + beta = {self.alpha + self.beta} differs from p = {p}")
        # holds automatically in the admissible range; kept as a guard
        if not 2 * a + 2 - b * p > 0:
            raise ConstraintViolation(f"2a + 2 - bp = {2 * a + 2 - b * p} must be positive")
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "gamma", lam * lam)

    @property
    def sigma(self) -> float:
        """Exponent ``2a + 2 - bp``; the solution is analytic in ``r**sigma``."""
        return 2 * self.a + 2 - self.b * self.p

    def replace(self, **changes) -> "ProblemParams":
        values = self.to_dict()
        values.update(changes)
        return validate_params(**values)

    def to_dict(self) -> dict:
        return {"n": self.n, "a": self.a, "b": self.b, "nu": self.nu,
                "alpha": self.alpha, "beta": self.beta}


def validate_params(n, a, b, nu, alpha, beta) -> ProblemParams:
    """Check raw scalars and return a :class:`ProblemParams`.

    Raises :class:`~henon.errors.ConstraintViolation` naming the violated
    condition.
    """
    try:
        values = [float(v) for v in (a, b, nu, alpha, beta)]
    except (TypeError, ValueError) as exc:
        raise ConstraintViolation(f"non-numeric parameter: {exc}") from None
    if not all(math.isfinite(v) for v in values):
        raise ConstraintViolation("parameters must be finite")
    return ProblemParams(n, *values)


def symmetric_params(n: int, a: float = 0.0, b: float = 0.0, nu: float = 1.0) -> ProblemParams:
    """Parameters with ``alpha = beta = p/2``."""
    p = critical_exponent(n, a, b)
    return validate_params(n, a, b, nu, p / 2, p / 2)


def params_from_mapping(config: Mapping[str, Any]) -> ProblemParams:
    missing = [k for k in ("n", "a", "b", "nu", "alpha", "beta") if k not in config]
    if missing:
        raise ConstraintViolation(f"config is missing keys: {', '.join(missing)}")
    return validate_params(config["n"], config["a"], config["b"], config["nu"],
                           config["alpha"], config["beta"])


def felli_schneider(n: int, a: float) -> float:
    """Felli-Schneider threshold ``b_FS(a)``.

    Below it (for ``a < 0``) ground states of the scalar equation are not
    radial.
    """
    d = n - 2 - 2 * a
    return n * d / (2 * math.sqrt(d * d + 4 * n - 4)) - d / 2


class RegimeTag(str, enum.Enum):
    SYMMETRIC = "Symmetric"
    SYMMETRY_BREAKING = "SymmetryBreaking"
    FS_BOUNDARY = "FSBoundary"


@dataclass(frozen=True)
class Regime:
    tag: RegimeTag
    b_fs: float

    @property
    def radial(self) -> bool:
        """Whether extremals of the scalar inequality are the radial bubbles."""
        return self.tag is not RegimeTag.SYMMETRY_BREAKING


def classify_regime(params: ProblemParams, rtol: float = 1e-12) -> Regime:
    """Place ``(a, b)`` relative to the Felli-Schneider curve.

    For ``a >= 0`` the regime is always symmetric.  ``b == a < 0`` counts as
    symmetry breaking (``b < b_FS(a)``).
    """
    b_fs = felli_schneider(params.n, params.a)
    if params.a >= 0:
        return Regime(RegimeTag.SYMMETRIC, b_fs)
    if abs(params.b - b_fs) <= rtol * max(abs(b_fs), 1.0):
        return Regime(RegimeTag.FS_BOUNDARY, b_fs)
    if params.b > b_fs:
        return Regime(RegimeTag.SYMMETRIC, b_fs)
    return Regime(RegimeTag.SYMMETRY_BREAKING, b_fs)


@dataclass(frozen=True, eq=False)
class CouplingSpec:
    """Coefficient tables of the k-coupled system

        -div(|x|^{-2a} grad u_i) = sum_j kappa_ij |x|^{-bp} u_i^{alpha_ij - 1} u_j^{beta_ij}.

    ``k = 1`` is reserved for the decoupled scalar equation (see
    :meth:`henon`); user supplied tables must have ``k >= 2``.
    """

    params: ProblemParams
    kappa: np.ndarray
    alpha_ij: np.ndarray
    beta_ij: np.ndarray

    def __post_init__(self):
        kappa = np.array(self.kappa, dtype=float)
        al = np.array(self.alpha_ij, dtype=float)
        be = np.array(self.beta_ij, dtype=float)
        if kappa.ndim != 2 or kappa.shape[0] != kappa.shape[1]:
            raise ConstraintViolation(f"kappa must be a square table, got shape {kappa.shape}")
        if al.shape != kappa.shape or be.shape != kappa.shape:
            raise ConstraintViolation("kappa, alpha_ij and beta_ij must share one k x k shape")
        if not np.all(kappa > 0):
            raise ConstraintViolation("kappa_ij > 0 required for all i, j")
        if not (np.all(al > 1) and np.all(be > 1)):
            raise ConstraintViolation("alpha_ij > 1 and beta_ij > 1 required for all i, j")
        p = self.params.p
        if np.max(np.abs(al + be - p)) > _SUM_RTOL * p:
            raise ConstraintViolation(f"alpha_ij + beta_ij must equal p = {p}")
        for name, arr in (("kappa", kappa), ("alpha_ij", al), ("beta_ij", be)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def k(self) -> int:
        return self.kappa.shape[0]

    @property
    def p(self) -> float:
        return self.params.p

    @property
    def variational(self) -> bool:
        """``alpha_ij = beta_ji`` and ``kappa_ij / kappa_ji = alpha_ij / beta_ij``."""
        al, be, ka = self.alpha_ij, self.beta_ij, self.kappa
        return bool(np.allclose(al, be.T, rtol=1e-12, atol=0)
                    and np.allclose(ka * be, ka.T * al, rtol=1e-12, atol=0))

    @classmethod
    def from_tables(cls, params: ProblemParams, kappa, alpha_ij, beta_ij) -> "CouplingSpec":
        spec = cls(params, kappa, alpha_ij, beta_ij)
        if spec.k < 2:
            raise ConstraintViolation(f"coupled system needs k >= 2, got k = {spec.k}")
        return spec

    @classmethod
    def from_pair(cls, params: ProblemParams) -> "CouplingSpec":
        """Tables reproducing the two-component system with coupling ``nu``."""
        p, al, be, nu = params.p, params.alpha, params.beta, params.nu
        kappa = [[1.0, nu * al], [nu * be, 1.0]]
        alpha_ij = [[p / 2, al], [be, p / 2]]
        beta_ij = [[p / 2, be], [al, p / 2]]
        return cls(params, kappa, alpha_ij, beta_ij)

    @classmethod
    def henon(cls, params: ProblemParams) -> "CouplingSpec":
        """The decoupled equation ``-div(|x|^{-2a} grad w) = |x|^{-bp} w^{p-1}``."""
        p = params.p
        return cls(params, [[1.0]], [[p / 2]], [[p / 2]])

    def nonlinearity(self, u: np.ndarray) -> np.ndarray:
        """``F_i(u) = sum_j kappa_ij u_i^{alpha_ij - 1} u_j^{beta_ij}``.

        ``u`` has shape ``(k, ...)``; negative entries are clipped to zero.
        """
        u = np.clip(np.asarray(u, dtype=float), 0.0, None)
        out = np.zeros_like(u)
        for i in range(self.k):
            for j in range(self.k):
                out[i] += self.kappa[i, j] * u[i] ** (self.alpha_ij[i, j] - 1) * u[j] ** self.beta_ij[i, j]
        return out

    def potential(self, u: np.ndarray) -> np.ndarray:
        """``sum_ij kappa_ij |u_i|^{alpha_ij} |u_j|^{beta_ij}``, the energy density times p."""
        u = np.abs(np.asarray(u, dtype=float))
        out = np.zeros(u.shape[1:])
        for i in range(self.k):
            for j in range(self.k):
                out = out + self.kappa[i, j] * u[i] ** self.alpha_ij[i, j] * u[j] ** self.beta_ij[i, j]
        return out

    def to_dict(self) -> dict:
        return {"kappa": self.kappa.tolist(), "alpha_ij": self.alpha_ij.tolist(),
                "beta_ij": self.beta_ij.tolist()}


def spec_from_mapping(params: ProblemParams, config: Mapping[str, Any]) -> CouplingSpec:
    missing = [k for k in ("kappa", "alpha_ij", "beta_ij") if k not in config]
    if missing:
        raise ConstraintViolation(f"k-spec is missing keys: {', '.join(missing)}")
    return CouplingSpec.from_tables(params, config["kappa"], config["alpha_ij"], config["beta_ij"])


def random_variational_spec(params: ProblemParams, k: int, rng: np.random.Generator,
                            kappa_range=(0.2, 2.0)) -> CouplingSpec:
    """Draw a random k-coupled spec satisfying the variational conditions."""
    p = params.p
    lo, hi = 1.0 + 1e-3, p - 1.0 - 1e-3
    al = np.full((k, k), p / 2)
    ka = np.ones((k, k))
    for i in range(k):
        ka[i, i] = rng.uniform(*kappa_range)
        for j in range(i + 1, k):
            al[i, j] = rng.uniform(lo, hi)
            al[j, i] = p - al[i, j]
            # kappa_ij / kappa_ji = alpha_ij / beta_ij with beta_ij = alpha_ji
            s = rng.uniform(*kappa_range)
            ka[i, j] = s * al[i, j]
            ka[j, i] = s * al[j, i]
    be = p - al
    return CouplingSpec.from_tables(params, ka, al, be)


def load_json(path) -> dict:
    """Read a JSON config; syntax errors become ConstraintViolation with location."""
    with open(path) as fh:
        text = fh.read()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConstraintViolation(
            f"{path}: malformed JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
