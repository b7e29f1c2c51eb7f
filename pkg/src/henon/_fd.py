"""Finite-difference weights on arbitrary grids (Fornberg's recursion)."""

import numpy as np


def fornberg_weights(z: float, x: np.ndarray, m: int) -> np.ndarray:
    """Weights ``w[k, j]`` so that ``sum_j w[k, j] f(x_j)`` approximates ``f^(k)(z)``."""
    n = len(x)
    c = np.zeros((m + 1, n))
    c1, c4 = 1.0, x[0] - z
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, m)
        c2, c5, c4 = 1.0, c4, x[i] - z
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[k, i] = c1 * (k * c[k - 1, i - 1] - c5 * c[k, i - 1]) / c2
                c[0, i] = -c1 * c5 * c[0, i - 1] / c2
            for k in range(mn, 0, -1):
                c[k, j] = (c4 * c[k, j] - k * c[k - 1, j]) / c3
            c[0, j] = c4 * c[0, j] / c3
        c1 = c2
    return c


def second_derivative(x: np.ndarray, f: np.ndarray, width: int = 9) -> np.ndarray:
    """Second derivative along the last axis of ``f`` with ``width``-point stencils."""
    n = len(x)
    half = width // 2
    out = np.empty_like(f, dtype=float)
    uniform = np.allclose(np.diff(x), x[1] - x[0], rtol=1e-10, atol=0)
    if uniform:
        h = x[1] - x[0]
        w = fornberg_weights(0.0, h * np.arange(-half, half + 1), 2)[2]
        body = sum(w[j] * f[..., j:n - width + 1 + j] for j in range(width))
        out[..., half:n - half] = body
        idx = list(range(half)) + list(range(n - half, n))
    else:
        idx = range(n)
    for i in idx:
        lo = min(max(i - half, 0), n - width)
        w = fornberg_weights(x[i], x[lo:lo + width], 2)[2]
        out[..., i] = f[..., lo:lo + width] @ w
    return out
