"""Discrete Legendre-Fenchel transform on tensor grids.

The 1-D transform builds the lower convex hull of the samples and then
assigns each dual slope its supporting hull vertex by a sorted merge, so a
slice costs O(n + m). Multi-dimensional grids are handled one axis at a
time, which is exact for the discrete conjugate

    f*(s) = max_{x in grid, f(x) < inf} <s, x> - f(x).
"""

from __future__ import annotations

import numpy as np


def lower_hull(x: np.ndarray, f: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Vertices of the lower convex hull of points ``(x_i, f_i)`` with ``x`` increasing."""
    hx: list[float] = []
    hf: list[float] = []
    for xi, fi in zip(x.tolist(), f.tolist()):
        if hx and xi == hx[-1]:
            if fi >= hf[-1]:
                continue
            hx.pop()
            hf.pop()
        while len(hx) >= 2:
            # drop the middle point unless it lies strictly below the chord
            x1, f1, x2, f2 = hx[-2], hf[-2], hx[-1], hf[-1]
            if (f2 - f1) * (xi - x1) >= (fi - f1) * (x2 - x1):
                hx.pop()
                hf.pop()
            else:
                break
        hx.append(xi)
        hf.append(fi)
    return np.array(hx), np.array(hf)


def conjugate_1d(x: np.ndarray, f: np.ndarray, s: np.ndarray) -> np.ndarray:
    """``max_i s_j x_i - f_i`` for every slope ``s_j``; ``x`` sorted, ``+inf`` entries ignored."""
    finite = np.isfinite(f)
    if not np.any(finite):
        return np.full(s.shape, -np.inf)
    hx, hf = lower_hull(x[finite], f[finite])
    if hx.size == 1:
        return s * hx[0] - hf[0]
    slopes = np.diff(hf) / np.diff(hx)
    k = np.searchsorted(slopes, s, side="left")
    return s * hx[k] - hf[k]


def conjugate_axis(values: np.ndarray, x: np.ndarray, s: np.ndarray, axis: int) -> np.ndarray:
    moved = np.moveaxis(values, axis, -1)
    flat = moved.reshape(-1, moved.shape[-1])
    out = np.empty((flat.shape[0], s.size))
    for i, row in enumerate(flat):
        out[i] = conjugate_1d(x, row, s)
    return np.moveaxis(out.reshape(moved.shape[:-1] + (s.size,)), -1, axis)


def discrete_conjugate(values: np.ndarray, primal_axes: list[np.ndarray],
                       dual_axes: list[np.ndarray]) -> np.ndarray:
    """Factored conjugate of grid values (shape = primal grid shape) onto a dual grid."""
    cur = np.asarray(values, dtype=float)
    if cur.ndim != len(primal_axes):
        raise ValueError("values shape does not match the number of axes")
    res = None
    for axis in range(cur.ndim - 1, -1, -1):
        res = conjugate_axis(cur, primal_axes[axis], dual_axes[axis], axis)
        # the next axis maximizes s*x + res = s*x - (-res)
        cur = -res
    return res


def brute_conjugate(nodes: np.ndarray, values: np.ndarray, slopes: np.ndarray) -> np.ndarray:
    """Reference O(N*M) discrete conjugate: ``max_i <s_j, x_i> - f_i``."""
    finite = np.isfinite(values)
    if not np.any(finite):
        return np.full(slopes.shape[0], -np.inf)
    X, F = nodes[finite], values[finite]
    out = np.empty(slopes.shape[0])
    step = max(1, (1 << 22) // X.shape[0])
    for i in range(0, slopes.shape[0], step):
        out[i:i + step] = (slopes[i:i + step] @ X.T - F).max(axis=1)
    return out
