"""Finite-difference stencils on uniform grids (Fornberg weight generation).

Used for the spectral derivatives n_g, GVD and TOD; interior points use
centered order-4-accurate stencils, edge points one-sided ones of the same
order.
"""

from __future__ import annotations

import numpy as np


def fornberg_weights(z: float, x: np.ndarray, m: int) -> np.ndarray:
    """Weights of the m-th derivative at z for nodes x (Fornberg 1988)."""
    n = len(x)
    c = np.zeros((n, m + 1))
    c1 = 1.0
    c4 = x[0] - z
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, m)
        c2 = 1.0
        c5 = c4
        c4 = x[i] - z
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c[:, m]


def derivative_uniform(y: np.ndarray, h: float, order: int, accuracy: int = 4) -> np.ndarray:
    """d^order y / dx^order on a uniform grid, ``accuracy``-order stencils.

    Interior points use centered stencils; near the edges the stencil is
    shifted (one-sided) keeping the same width.
    """
    y = np.asarray(y, dtype=float)
    n = len(y)
    width = order + accuracy  # nodes needed for the requested accuracy
    if width % 2 == 0:
        width += 1
    if n < width:
        raise ValueError(f"need at least {width} points for derivative "
                         f"order {order} at accuracy {accuracy}, got {n}")
    half = width // 2
    out = np.empty(n)
    nodes = np.arange(width, dtype=float)
    for i in range(n):
        start = min(max(i - half, 0), n - width)
        w = fornberg_weights(float(i - start), nodes, order)
        out[i] = np.dot(w, y[start:start + width])
    return out / h**order
