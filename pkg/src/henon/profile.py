"""Radial functions sampled in the Emden-Fowler variable ``t = -ln r``.

A radial ``u(r)`` is stored as ``phi(t) = r^lam u(r)`` with
``lam = (n - 2 - 2a)/2``.  Inversions ``x -> x/|x|^2`` become reflections
``t -> -t`` and dilations become translations, which is why every module
works with this representation.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import GridMismatch

SCHEMA_VERSION = 1


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """Samples ``values[i] = phi(t_grid[i])`` of a nonnegative radial profile.

    Between nodes the profile is a cubic spline.  Outside the grid it
    continues with the exponential tails ``phi(t) ~ C e^{-lam |t|}``
    matched to the end values.
    """

    t_grid: np.ndarray
    values: np.ndarray
    lam: float
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        t = np.array(self.t_grid, dtype=float)
        v = np.array(self.values, dtype=float)
        if t.ndim != 1 or v.shape != t.shape:
            raise GridMismatch(f"t_grid {t.shape} and values {v.shape} must be 1-D of equal length")
        if t.size < 4:
            raise GridMismatch("a profile needs at least 4 nodes")
        if not np.all(np.diff(t) > 0):
            raise GridMismatch("t_grid must be strictly increasing")
        if not np.all(np.isfinite(v)):
            raise ValueError("profile values must be finite")
        if np.any(v < 0):
            raise ValueError("profile values must be nonnegative")
        t.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "t_grid", t)
        object.__setattr__(self, "values", v)

    @property
    def spline(self) -> CubicSpline:
        sp = self.__dict__.get("_spline")
        if sp is None:
            sp = CubicSpline(self.t_grid, self.values)
            object.__setattr__(self, "_spline", sp)
        return sp

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        out = np.asarray(self.spline(t), dtype=float)
        lo, hi = self.t_grid[0], self.t_grid[-1]
        left, right = t < lo, t > hi
        if np.any(left):
            out = np.where(left, self.values[0] * np.exp(self.lam * (t - lo)), out)
        if np.any(right):
            out = np.where(right, self.values[-1] * np.exp(-self.lam * (t - hi)), out)
        return out

    def derivative(self, t, order: int = 1) -> np.ndarray:
        return self.spline(np.asarray(t, dtype=float), order)

    def r_values(self) -> tuple[np.ndarray, np.ndarray]:
        """``(r, u(r))`` on the nodes, with ``r`` increasing."""
        r = np.exp(-self.t_grid[::-1])
        return r, self.values[::-1] * r ** (-self.lam)

    def same_grid(self, other: "RadialProfile") -> bool:
        return self.t_grid.shape == other.t_grid.shape and np.array_equal(self.t_grid, other.t_grid)

    def with_values(self, values, **meta) -> "RadialProfile":
        return RadialProfile(self.t_grid, values, self.lam, {**self.meta, **meta})

    def scaled(self, c: float) -> "RadialProfile":
        return self.with_values(c * self.values)

    def tail_fit(self, n_tail: int | None = None) -> dict:
        """Least-squares fit of ``log phi`` against ``t`` on both ends.

        Returns slopes (``+lam`` on the left, ``-lam`` on the right for a
        decaying profile), intercepts and max fit residuals.
        """
        m = n_tail or max(8, self.t_grid.size // 20)
        out = {}
        for side, sl in (("left", slice(0, m)), ("right", slice(-m, None))):
            t, v = self.t_grid[sl], self.values[sl]
            if np.any(v <= 0):
                out[side] = {"slope": float("nan"), "intercept": float("nan"), "residual": float("inf")}
                continue
            A = np.vstack([t, np.ones_like(t)]).T
            (slope, icpt), *_ = np.linalg.lstsq(A, np.log(v), rcond=None)
            res = float(np.max(np.abs(A @ [slope, icpt] - np.log(v))))
            out[side] = {"slope": float(slope), "intercept": float(icpt), "residual": res}
        return out

    def header(self) -> dict:
        fit = self.tail_fit()
        return {"schema_version": SCHEMA_VERSION, "lambda": self.lam,
                "tail_fit": {k: v["slope"] for k, v in fit.items()},
                **{k: v for k, v in self.meta.items()}}

    def to_csv(self, path) -> Path:
        """Write ``t,value`` rows and a ``<path>.json`` header sidecar."""
        path = Path(path)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["t", "value"])
            for t, v in zip(self.t_grid, self.values):
                w.writerow([repr(float(t)), repr(float(v))])
        path.with_suffix(path.suffix + ".json").write_text(
            json.dumps(self.header(), indent=2, sort_keys=True, default=_jsonable))
        return path

    @classmethod
    def from_csv(cls, path) -> "RadialProfile":
        path = Path(path)
        header = json.loads(path.with_suffix(path.suffix + ".json").read_text())
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        meta = {k: v for k, v in header.items() if k not in ("schema_version", "lambda", "tail_fit")}
        return cls(data[:, 0], data[:, 1], float(header["lambda"]), meta)


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    return str(obj)


def common_grid(profiles) -> np.ndarray:
    first = profiles[0]
    for other in profiles[1:]:
        if not first.same_grid(other):
            raise GridMismatch("profiles are not sampled on a common grid")
    return first.t_grid
