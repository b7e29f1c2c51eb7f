"""Gauss-Legendre panel quadrature on the line with exponential tail closure."""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy.special import gamma as gamma_fn


def sphere_area(n: int) -> float:
    """Surface area of the unit sphere in R^n, ``2 pi^{n/2} / Gamma(n/2)``."""
    return 2 * math.pi ** (n / 2) / float(gamma_fn(n / 2))


@lru_cache(maxsize=32)
def _gauss_legendre(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def panel_nodes(t_lo: float, t_hi: float, panels: int = 200, order: int = 16):
    """Nodes and weights of composite Gauss-Legendre on ``[t_lo, t_hi]``."""
    x, w = _gauss_legendre(order)
    edges = np.linspace(t_lo, t_hi, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def integrate_line(values_at, t_lo: float, t_hi: float, decay: float,
                   panels: int = 200, order: int = 16) -> float:
    """Integrate over the whole line a function decaying like ``e^{-decay |t|}``.

    ``values_at`` maps an array of ``t`` to integrand values (any trailing
    batch dimensions allowed as long as ``t`` is the last axis).  The parts
    beyond ``[t_lo, t_hi]`` are added analytically from the end values.
    """
    nodes, weights = panel_nodes(t_lo, t_hi, panels, order)
    inner = np.asarray(values_at(nodes)) @ weights
    ends = np.asarray(values_at(np.array([t_lo, t_hi])))
    return inner + (ends[..., 0] + ends[..., 1]) / decay
