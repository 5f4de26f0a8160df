"""q-positive sets as explicit point samples, plus positivity and maximality scans."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .errors import DimensionMismatch, EmptySet, InvalidParams, NotQPositive
from .grid import GridSpec
from .space import EPS_Q, SSDSpace

_CHUNK = 1 << 20  # max pair evaluations per vectorized block


@dataclass(frozen=True)
class Violation:
    """A failed check: ``value < bound`` at the witness point(s)."""

    witness: tuple[np.ndarray, ...]
    value: float
    bound: float

    def to_dict(self) -> dict:
        return {
            "witness": [np.asarray(w).tolist() for w in self.witness],
            "value": float(self.value),
            "bound": float(self.bound),
        }


@dataclass(frozen=True, eq=False)
class QPositiveSet:
    """Finite sample of a q-positive set.

    ``mesh`` bounds the distance from any point of the sampled (possibly
    infinite) set to its nearest sample point; 0 means the points are the
    whole set.
    """

    space: SSDSpace
    points: np.ndarray
    generator: dict[str, Any] = field(default_factory=lambda: {"kind": "custom"})
    mesh: float = 0.0

    def __len__(self) -> int:
        return self.points.shape[0]

    @property
    def radius(self) -> float:
        return float(np.linalg.norm(self.points, axis=1).max())

    @property
    def q_values(self) -> np.ndarray:
        return self.space.q(self.points)


def as_points(space: SSDSpace, points) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.size == 0 or pts.shape[0] == 0:
        raise EmptySet("point set is empty")
    if pts.shape[1] != space.dim:
        raise DimensionMismatch(f"points have {pts.shape[1]} columns, space has dim {space.dim}")
    return pts


def min_pairwise_q(space: SSDSpace, points) -> tuple[float, int, int]:
    """Minimum of ``q(b - c)`` over ordered pairs of distinct indices.

    Differences are formed explicitly (no expansion) to avoid cancellation.
    Returns ``(value, i, j)``; a single point gives ``(inf, 0, 0)``.
    """
    pts = as_points(space, points)
    n = pts.shape[0]
    if n == 1:
        return float("inf"), 0, 0
    best, bi, bj = float("inf"), 0, 0
    rows = max(1, _CHUNK // n)
    for start in range(0, n, rows):
        block = pts[start:start + rows]
        diff = block[:, None, :] - pts[None, :, :]
        vals = space.q(diff)
        for k in range(block.shape[0]):
            vals[k, start + k] = np.inf
        flat = int(np.argmin(vals))
        i, j = np.unravel_index(flat, vals.shape)
        if vals[i, j] < best:
            best, bi, bj = float(vals[i, j]), start + int(i), int(j)
    return best, bi, bj


def is_q_positive(space: SSDSpace, points, eps: float = EPS_Q) -> tuple[bool, Violation | None]:
    """Exhaustive pair scan; on failure the witness is the minimizing pair."""
    pts = as_points(space, points)
    value, i, j = min_pairwise_q(space, pts)
    if value >= -eps:
        return True, None
    return False, Violation(witness=(pts[i].copy(), pts[j].copy()), value=value, bound=-eps)


def make_set(space: SSDSpace, points, generator: dict | None = None, mesh: float = 0.0,
             eps: float = EPS_Q) -> QPositiveSet:
    pts = as_points(space, points)
    ok, viol = is_q_positive(space, pts, eps)
    if not ok:
        raise NotQPositive(
            f"set is not q-positive: q(b - c) = {viol.value:.3e} < {-eps:.0e}", violation=viol
        )
    pts = pts.copy()
    pts.setflags(write=False)
    return QPositiveSet(space, pts, dict(generator or {"kind": "custom"}), float(mesh))


def min_q_to(space: SSDSpace, points, c) -> tuple[np.ndarray, np.ndarray]:
    """For each row ``c_k`` of ``c``: ``min_i q(a_i - c_k)`` and the argmin index."""
    pts = np.asarray(points, dtype=float)
    c = np.atleast_2d(np.asarray(c, dtype=float))
    out = np.empty(c.shape[0])
    arg = np.empty(c.shape[0], dtype=int)
    rows = max(1, _CHUNK // pts.shape[0])
    for start in range(0, c.shape[0], rows):
        blk = c[start:start + rows]
        vals = space.q(pts[None, :, :] - blk[:, None, :])
        arg[start:start + rows] = np.argmin(vals, axis=1)
        out[start:start + rows] = vals[np.arange(blk.shape[0]), arg[start:start + rows]]
    return out, arg


def min_dist_to(points, c) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    c = np.atleast_2d(np.asarray(c, dtype=float))
    out = np.empty(c.shape[0])
    rows = max(1, _CHUNK // pts.shape[0])
    for start in range(0, c.shape[0], rows):
        blk = c[start:start + rows]
        d2 = ((pts[None, :, :] - blk[:, None, :]) ** 2).sum(axis=2)
        out[start:start + rows] = np.sqrt(d2.min(axis=1))
    return out


def maximality_falsifier(space: SSDSpace, A: QPositiveSet, grid: GridSpec,
                         dist_floor: float, eps: float = EPS_Q) -> list[Violation]:
    """Grid nodes that could be added to ``A`` without breaking q-positivity.

    Only nodes farther than ``dist_floor`` from every sample are considered.
    An empty result means maximality was not falsified on this grid; it is
    never a proof of maximality.
    """
    if grid.dim != space.dim:
        raise DimensionMismatch(f"grid dim {grid.dim} != space dim {space.dim}")
    nodes = grid.nodes()
    dist = min_dist_to(A.points, nodes)
    far = dist > dist_floor
    out: list[Violation] = []
    if not np.any(far):
        return out
    cand = nodes[far]
    mq, arg = min_q_to(space, A.points, cand)
    for k in np.flatnonzero(mq > -eps):
        # value = -inf q(A - c) < eps: c is q-positively related to all of A
        out.append(Violation(witness=(cand[k].copy(), A.points[arg[k]].copy()),
                             value=float(-mq[k]), bound=eps))
    return out


# ---------------------------------------------------------------- generators

def sample_diagonal(lo: float, hi: float, count: int, m: int = 1) -> tuple[np.ndarray, float]:
    """``{(x, x)}`` for ``x`` on a uniform grid in ``[lo, hi]^m``; returns points and mesh."""
    if count < 2:
        raise InvalidParams("diagonal needs count >= 2")
    t = np.linspace(lo, hi, count)
    xs = np.stack([g.ravel() for g in np.meshgrid(*([t] * m), indexing="ij")], axis=1)
    h = (hi - lo) / (count - 1)
    return np.hstack([xs, xs]), h * np.sqrt(m / 2.0)


def sample_helix(lam: float, lo: float, hi: float, count: int) -> tuple[np.ndarray, float]:
    """``{(cos t, sin t, lam * t)}``; adjacent samples are within arc length ``dt*sqrt(1+lam^2)``."""
    t = np.linspace(lo, hi, count)
    pts = np.stack([np.cos(t), np.sin(t), lam * t], axis=1)
    dt = (hi - lo) / (count - 1)
    return pts, 0.5 * dt * np.sqrt(1.0 + lam * lam)


def sample_line(v, lo: float, hi: float, count: int) -> tuple[np.ndarray, float]:
    v = np.asarray(v, dtype=float)
    t = np.linspace(lo, hi, count)
    dt = (hi - lo) / (count - 1)
    return t[:, None] * v[None, :], 0.5 * dt * float(np.linalg.norm(v))


def sample_polyline(breakpoints, step: float) -> tuple[np.ndarray, float]:
    bp = np.asarray(breakpoints, dtype=float)
    if bp.ndim != 2 or bp.shape[0] < 1:
        raise InvalidParams("polyline needs at least one breakpoint")
    pts = [bp[0]]
    mesh = 0.0
    for a, b in zip(bp[:-1], bp[1:]):
        length = float(np.linalg.norm(b - a))
        n = max(1, int(np.ceil(length / step - 1e-12)))
        s = np.linspace(0.0, 1.0, n + 1)[1:]
        pts.extend(a + s[:, None] * (b - a))
        mesh = max(mesh, 0.5 * length / n)
    return np.array(pts), mesh


def sample_monotone_graph(breakpoints, step: float) -> tuple[np.ndarray, float]:
    """Polyline through breakpoints ``(x_k, y_k)``, both coordinates nondecreasing."""
    bp = np.asarray(breakpoints, dtype=float)
    if bp.ndim != 2 or bp.shape[1] != 2:
        raise InvalidParams("monotone-graph breakpoints must be (x, y) pairs")
    if np.any(np.diff(bp[:, 0]) < 0) or np.any(np.diff(bp[:, 1]) < 0):
        raise InvalidParams("monotone-graph breakpoints must be nondecreasing in x and y")
    return sample_polyline(bp, step)


def sample_sgn_graph(radius: float, step: float) -> tuple[np.ndarray, float]:
    """Graph of the maximal monotone sign map on ``[-radius, radius]``."""
    bp = [(-radius, -1.0), (0.0, -1.0), (0.0, 1.0), (radius, 1.0)]
    return sample_polyline(bp, step)


def product_points(p1: np.ndarray, p2: np.ndarray) -> np.ndarray:
    n1, n2 = p1.shape[0], p2.shape[0]
    return np.hstack([np.repeat(p1, n2, axis=0), np.tile(p2, (n1, 1))])


# ---------------------------------------------------------------- CSV I/O

def read_points_csv(path, dim: int | None = None) -> np.ndarray:
    """One point per row, no header, '.' decimal separator."""
    rows = []
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                rows.append([float(c) for c in row])
            except ValueError as exc:
                raise InvalidParams(f"{path}:{lineno}: {exc}") from None
            if dim is not None and len(rows[-1]) != dim:
                raise DimensionMismatch(f"{path}:{lineno}: expected {dim} columns, got {len(rows[-1])}")
    if not rows:
        raise EmptySet(f"{path}: no points")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise InvalidParams(f"{path}: ragged rows {sorted(widths)}")
    return np.array(rows, dtype=float)


def write_points_csv(path, points) -> None:
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    with open(Path(path), "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        for row in pts:
            w.writerow([repr(float(x)) for x in row])
