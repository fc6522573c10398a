"""Chebyshev-Lobatto grids, barycentric interpolation, and panel quadrature.

Iterates of the fixed-point operator are smooth and decaying, so a single
global Chebyshev grid with barycentric interpolation keeps the node count
small; integrals between nodes use fixed-order Gauss-Legendre panels,
which is spectrally accurate for the smooth integrands at hand and keeps
the pipeline deterministic.
"""

from __future__ import annotations

import numpy as np

GL_ORDER = 12


def lobatto_nodes(a: float, b: float, count: int) -> np.ndarray:
    """Chebyshev-Lobatto points mapped to [a, b], ascending, endpoints
    included."""
    if count < 2:
        raise ValueError("need at least 2 nodes")
    k = np.arange(count)
    x = np.cos(np.pi * k / (count - 1))  # descending on [-1, 1]
    return (a + b) / 2 + (b - a) / 2 * x[::-1]


def lobatto_weights(count: int) -> np.ndarray:
    """Barycentric weights for the Lobatto points (ascending order)."""
    w = (-1.0) ** np.arange(count)
    w[0] *= 0.5
    w[-1] *= 0.5
    return w[::-1]


def barycentric_matrix(nodes: np.ndarray, weights: np.ndarray,
                       targets: np.ndarray) -> np.ndarray:
    """Matrix M with (M @ values)[i] = interpolant(targets[i])."""
    targets = np.asarray(targets, dtype=float)
    diff = targets[:, None] - nodes[None, :]
    exact_rows, exact_cols = np.nonzero(diff == 0.0)
    diff[exact_rows, :] = 1.0  # avoid 0/0; fixed up below
    with np.errstate(divide="ignore", invalid="ignore"):
        kernel = weights[None, :] / diff
        mat = kernel / kernel.sum(axis=1, keepdims=True)
    for row, col in zip(exact_rows, exact_cols):
        mat[row, :] = 0.0
        mat[row, col] = 1.0
    return mat


def barycentric_eval(nodes, weights, values, x):
    """Interpolant of ``values`` at scalar or array ``x``."""
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    out = barycentric_matrix(nodes, weights, x_arr) @ values
    if np.ndim(x) == 0:
        return float(out[0])
    return out


def differentiation_matrix(nodes: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Spectral differentiation matrix for the barycentric grid."""
    count = len(nodes)
    diff = nodes[:, None] - nodes[None, :]
    np.fill_diagonal(diff, 1.0)
    mat = (weights[None, :] / weights[:, None]) / diff
    np.fill_diagonal(mat, 0.0)
    np.fill_diagonal(mat, -mat.sum(axis=1))
    return mat


def panel_rule(nodes: np.ndarray, order: int = GL_ORDER):
    """Gauss-Legendre points and weights on every inter-node panel.

    Returns (points, weights, panel_index) as flat arrays of length
    (len(nodes) - 1) * order.
    """
    x, w = np.polynomial.legendre.leggauss(order)
    lo = nodes[:-1]
    hi = nodes[1:]
    half = (hi - lo) / 2
    mid = (lo + hi) / 2
    pts = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    wts = (half[:, None] * w[None, :]).ravel()
    idx = np.repeat(np.arange(len(nodes) - 1), order)
    return pts, wts, idx


def cumulative_integral(nodes: np.ndarray, panel_points: np.ndarray,
                        panel_weights: np.ndarray, order: int,
                        integrand_at_panels: np.ndarray) -> np.ndarray:
    """Antiderivative values at the nodes, zero at the first node."""
    per_panel = (integrand_at_panels * panel_weights).reshape(-1, order).sum(axis=1)
    out = np.zeros(len(nodes))
    out[1:] = np.cumsum(per_panel)
    return out
