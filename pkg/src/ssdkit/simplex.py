"""Dense two-phase simplex for small equality-form linear programs.

Solves ``min c^T x  s.t.  A x = b, x >= 0``. Problems here have a handful of
rows (dimension + 1) and up to a few thousand columns, so a dense tableau with
vectorized row operations is adequate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import LPNumericalFailure

PIVOT_TOL = 1e-11


@dataclass
class LPResult:
    status: str  # "optimal" | "infeasible"
    value: float
    x: np.ndarray | None
    iterations: int


def _pivot(T: np.ndarray, basis: list[int], row: int, col: int) -> None:
    T[row] /= T[row, col]
    colv = T[:, col].copy()
    colv[row] = 0.0
    T -= np.outer(colv, T[row])
    basis[row] = col


def _run(T: np.ndarray, basis: list[int], ncols: int, tol: float, max_iter: int) -> tuple[str, int]:
    """Iterate on tableau ``T`` (last row = reduced costs, last column = rhs)."""
    it = 0
    stall = 0
    last_obj = T[-1, -1]
    while it < max_iter:
        rc = T[-1, :ncols]
        if stall > 20:
            # Bland's rule once progress stalls (degenerate cycling guard)
            cand = np.flatnonzero(rc < -tol)
            if cand.size == 0:
                return "optimal", it
            col = int(cand[0])
        else:
            col = int(np.argmin(rc))
            if rc[col] >= -tol:
                return "optimal", it
        colv = T[:-1, col]
        pos = colv > PIVOT_TOL
        if not np.any(pos):
            return "unbounded", it
        ratios = np.full(colv.shape, np.inf)
        ratios[pos] = T[:-1, -1][pos] / colv[pos]
        best = ratios.min()
        ties = np.flatnonzero(ratios <= best + 1e-15 * max(1.0, abs(best)))
        row = int(min(ties, key=lambda r: basis[r]))
        _pivot(T, basis, row, col)
        it += 1
        obj = T[-1, -1]
        stall = stall + 1 if abs(obj - last_obj) <= 1e-15 * max(1.0, abs(obj)) else 0
        last_obj = obj
    raise LPNumericalFailure("simplex iteration limit reached",
                             condition={"iterations": it, "rows": T.shape[0] - 1, "cols": ncols})


def solve_lp(c, A, b, tol: float = 1e-11, feas_tol: float = 1e-9, max_iter: int = 10_000) -> LPResult:
    c = np.asarray(c, dtype=float)
    A = np.array(A, dtype=float)
    b = np.array(b, dtype=float)
    m, n = A.shape
    neg = b < 0
    A[neg] *= -1.0
    b[neg] *= -1.0
    scale = max(1.0, float(np.abs(b).max()) if m else 1.0)

    # phase 1: artificials in columns n..n+m-1
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = b
    T[-1, :n] = -A.sum(axis=0)
    T[-1, -1] = -b.sum()
    basis = list(range(n, n + m))
    status, it1 = _run(T, basis, n + m, tol, max_iter)
    if -T[-1, -1] > feas_tol * scale:
        return LPResult("infeasible", float("inf"), None, it1)

    # drive remaining artificials out of the basis; drop redundant rows
    keep = []
    for r in range(m):
        if basis[r] >= n:
            cols = np.flatnonzero(np.abs(T[r, :n]) > PIVOT_TOL)
            if cols.size:
                _pivot(T, basis, r, int(cols[np.argmax(np.abs(T[r, cols]))]))
                keep.append(r)
        else:
            keep.append(r)
    rows = [r for r in keep if basis[r] < n]
    T2 = np.zeros((len(rows) + 1, n + 1))
    T2[:-1, :n] = T[rows, :n]
    T2[:-1, -1] = T[rows, -1]
    basis2 = [basis[r] for r in rows]
    T2[-1, :n] = c
    for r, j in enumerate(basis2):
        T2[-1] -= c[j] * T2[r]
    status, it2 = _run(T2, basis2, n, tol, max_iter)
    if status != "optimal":
        raise LPNumericalFailure(f"phase 2 ended with status {status}",
                                 condition={"rows": m, "cols": n})
    x = np.zeros(n)
    x[basis2] = np.maximum(T2[:-1, -1], 0.0)
    resid = float(np.abs(A @ x - b).max()) if m else 0.0
    if resid > 1e-7 * scale:
        raise LPNumericalFailure(f"primal residual {resid:.3e} too large",
                                 condition={"residual": resid, "cond": float(np.linalg.cond(A @ A.T))})
    return LPResult("optimal", float(c @ x), x, it1 + it2)


def envelope_value(points: np.ndarray, values: np.ndarray, x: np.ndarray) -> tuple[float, np.ndarray | None]:
    """Lower convex envelope of ``points -> values`` at ``x``.

    ``min sum(l_i v_i)`` over convex weights ``l`` with ``sum(l_i a_i) = x``;
    ``+inf`` when ``x`` lies outside the convex hull.
    """
    n, d = points.shape
    A = np.vstack([points.T, np.ones((1, n))])
    b = np.concatenate([x, [1.0]])
    res = solve_lp(values, A, b)
    if res.status == "infeasible":
        return float("inf"), None
    return res.value, res.x
