"""Extended-real convex functions in four closed representations.

``Quadratic``, ``MaxAffine``, ``PointEnvelope`` and ``GridSampled`` cover
every function the verification suites need. Conjugation is exact between
the first three (max-affine and point-envelope functions are conjugate to
each other) and uses the discrete Legendre transform for grids.

All representations expose ``values(X)`` for an ``(n, dim)`` array and are
callable on a single vector.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Union

import numpy as np

from .errors import (
    DegenerateQuadratic,
    DimensionMismatch,
    EmptySearchGrid,
    FBelowQ,
    ImproperFunction,
    InvalidParams,
    OffGridPoint,
)
from .anchors import ref
from .grid import GridSpec
from .legendre import brute_conjugate, discrete_conjugate, lower_hull
from .report import Check, CheckReport
from .simplex import envelope_value
from .space import SSDSpace

PSD_TOL = 1e-10
_CHUNK = 1 << 22


def _rows(x, dim: int) -> tuple[np.ndarray, bool]:
    """Coerce input to ``(n, dim)``; the flag says whether it was a single vector."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    X = np.atleast_2d(x)
    if X.ndim != 2 or X.shape[1] != dim:
        raise DimensionMismatch(f"expected points of dimension {dim}, got shape {x.shape}")
    return X, single


class _Function:
    dim: int

    def values(self, X) -> np.ndarray:  # pragma: no cover - overridden
        raise NotImplementedError

    def __call__(self, x):
        X, single = _rows(x, self.dim)
        v = self.values(X)
        return float(v[0]) if single else v


@dataclass(frozen=True, eq=False)
class QuadraticExpr(_Function):
    """``x -> x^T Q x / 2 + b^T x + c`` with no curvature requirement.

    Used for the nonconvex integrands ``f - q`` that appear inside
    inf-convolutions.
    """

    Q: np.ndarray
    b: np.ndarray | None = None
    c: float = 0.0

    def __post_init__(self):
        Q = np.array(self.Q, dtype=float)
        if Q.ndim != 2 or Q.shape[0] != Q.shape[1]:
            raise InvalidParams(f"quadratic matrix must be square, got shape {Q.shape}")
        if np.max(np.abs(Q - Q.T), initial=0.0) > 1e-12 * max(1.0, np.abs(Q).max(initial=0.0)):
            raise InvalidParams("quadratic matrix must be symmetric")
        b = np.zeros(Q.shape[0]) if self.b is None else np.array(self.b, dtype=float).reshape(-1)
        if b.shape != (Q.shape[0],):
            raise DimensionMismatch(f"linear term has shape {b.shape}, expected ({Q.shape[0]},)")
        object.__setattr__(self, "Q", 0.5 * (Q + Q.T))
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", float(self.c))

    @property
    def dim(self) -> int:
        return self.Q.shape[0]

    def values(self, X) -> np.ndarray:
        X, _ = _rows(X, self.dim)
        return 0.5 * np.einsum("ni,ij,nj->n", X, self.Q, X) + X @ self.b + self.c

    def plus(self, other: "QuadraticExpr", sign: float = 1.0) -> "QuadraticExpr":
        return QuadraticExpr(self.Q + sign * other.Q, self.b + sign * other.b, self.c + sign * other.c)

    def compose(self, L: np.ndarray) -> "QuadraticExpr":
        """``x -> self(L x)``."""
        L = np.asarray(L, dtype=float)
        return QuadraticExpr(L.T @ self.Q @ L, L.T @ self.b, self.c)


@dataclass(frozen=True, eq=False)
class Quadratic(QuadraticExpr):
    """Convex quadratic: ``Q`` symmetric positive semidefinite."""

    def __post_init__(self):
        super().__post_init__()
        lam = float(np.linalg.eigvalsh(self.Q).min())
        if lam < -PSD_TOL:
            raise InvalidParams(f"quadratic is not convex: smallest eigenvalue {lam:.3e}")

    @classmethod
    def half_norm_sq(cls, dim: int, scale: float = 1.0) -> "Quadratic":
        """``scale * ||x||^2 / 2``."""
        return cls(scale * np.eye(dim), np.zeros(dim), 0.0)

    @classmethod
    def from_expr(cls, e: QuadraticExpr) -> "Quadratic":
        return cls(e.Q, e.b, e.c)

    @property
    def min_eig(self) -> float:
        return float(np.linalg.eigvalsh(self.Q).min())


@dataclass(frozen=True, eq=False)
class MaxAffine(_Function):
    """``x -> max_i (m_i^T x - c_i)``."""

    slopes: np.ndarray
    offsets: np.ndarray

    def __post_init__(self):
        m = np.atleast_2d(np.array(self.slopes, dtype=float))
        c = np.array(self.offsets, dtype=float).reshape(-1)
        if m.shape[0] == 0 or m.size == 0:
            raise ImproperFunction("max-affine function needs at least one piece")
        if c.shape[0] != m.shape[0]:
            raise DimensionMismatch(f"{m.shape[0]} slopes but {c.shape[0]} offsets")
        if not (np.all(np.isfinite(m)) and np.all(np.isfinite(c))):
            raise InvalidParams("max-affine pieces must be finite")
        object.__setattr__(self, "slopes", m)
        object.__setattr__(self, "offsets", c)

    @property
    def dim(self) -> int:
        return self.slopes.shape[1]

    def values(self, X) -> np.ndarray:
        X, _ = _rows(X, self.dim)
        out = np.empty(X.shape[0])
        step = max(1, _CHUNK // self.slopes.shape[0])
        for i in range(0, X.shape[0], step):
            out[i:i + step] = (X[i:i + step] @ self.slopes.T - self.offsets).max(axis=1)
        return out

    def argmax(self, X) -> np.ndarray:
        X, _ = _rows(X, self.dim)
        return np.argmax(X @ self.slopes.T - self.offsets, axis=1)


@dataclass(frozen=True, eq=False)
class PointEnvelope(_Function):
    """Lower convex envelope of ``a_i -> v_i``, ``+inf`` off the convex hull.

    With ``pre_map`` set the function is ``x -> env(pre_map @ x)``; this is
    how conjugates composed with a singular linear map are represented.
    """

    points: np.ndarray
    vals: np.ndarray
    pre_map: np.ndarray | None = None

    def __post_init__(self):
        a = np.atleast_2d(np.array(self.points, dtype=float))
        v = np.array(self.vals, dtype=float).reshape(-1)
        if a.shape[0] == 0 or a.size == 0:
            raise ImproperFunction("point envelope needs at least one point")
        if v.shape[0] != a.shape[0]:
            raise DimensionMismatch(f"{a.shape[0]} points but {v.shape[0]} values")
        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(v))):
            raise InvalidParams("envelope points and values must be finite")
        object.__setattr__(self, "points", a)
        object.__setattr__(self, "vals", v)
        if self.pre_map is not None:
            L = np.array(self.pre_map, dtype=float)
            if L.ndim != 2 or L.shape[0] != a.shape[1]:
                raise DimensionMismatch(f"pre_map shape {L.shape} does not fit points of dimension {a.shape[1]}")
            object.__setattr__(self, "pre_map", L)
        object.__setattr__(self, "_hull", self._affine_frame())

    def _affine_frame(self):
        a = self.points
        origin = a.mean(axis=0)
        scale = max(1.0, float(np.abs(a).max()))
        U, sv, Vt = np.linalg.svd(a - origin, full_matrices=False)
        rank = int(np.sum(sv > 1e-10 * scale * max(1, a.shape[0])))
        basis = Vt[:rank]
        coords = (a - origin) @ basis.T
        frame = {"origin": origin, "basis": basis, "coords": coords, "scale": scale,
                 "lo": a.min(axis=0), "hi": a.max(axis=0)}
        if rank == 1:
            order = np.argsort(coords[:, 0], kind="stable")
            hx, hf = lower_hull(coords[order, 0], self.vals[order])
            frame["hull"] = (hx, hf)
        return frame

    @property
    def dim(self) -> int:
        return self.points.shape[1] if self.pre_map is None else self.pre_map.shape[1]

    def _value_at(self, y: np.ndarray) -> float:
        fr = self._hull
        tol = 1e-9 * fr["scale"]
        if np.any(y < fr["lo"] - tol) or np.any(y > fr["hi"] + tol):
            return float("inf")
        r = y - fr["origin"]
        t = fr["basis"] @ r
        if np.linalg.norm(r - fr["basis"].T @ t) > tol:
            return float("inf")
        rank = fr["basis"].shape[0]
        if rank == 0:
            return float(self.vals.min())
        if rank == 1:
            hx, hf = fr["hull"]
            s = float(t[0])
            if s < hx[0] - tol or s > hx[-1] + tol:
                return float("inf")
            return float(np.interp(s, hx, hf))
        value, _ = envelope_value(fr["coords"], self.vals, t)
        return value

    def values(self, X) -> np.ndarray:
        X, _ = _rows(X, self.dim)
        Y = X if self.pre_map is None else X @ self.pre_map.T
        return np.array([self._value_at(y) for y in Y])

    def weights(self, x) -> np.ndarray | None:
        """Optimal convex weights at ``x`` (``None`` off the hull)."""
        y = np.asarray(x, dtype=float)
        if self.pre_map is not None:
            y = self.pre_map @ y
        fr = self._hull
        t = fr["basis"] @ (y - fr["origin"])
        if fr["basis"].shape[0] == 0:
            w = np.zeros(self.points.shape[0])
            w[np.argmin(self.vals)] = 1.0
            return w if np.isfinite(self._value_at(y)) else None
        _, lam = envelope_value(fr["coords"], self.vals, t)
        return lam


@dataclass(frozen=True, eq=False)
class GridSampled(_Function):
    """Values on grid nodes (row-major); ``+inf`` marks points outside the domain."""

    grid: GridSpec
    vals: np.ndarray

    def __post_init__(self):
        v = np.array(self.vals, dtype=float).reshape(-1)
        if v.size != self.grid.size:
            raise DimensionMismatch(f"grid has {self.grid.size} nodes but {v.size} values were given")
        if np.any(np.isnan(v)) or np.any(v == -np.inf):
            raise ImproperFunction("grid values must be finite or +inf")
        if not np.any(np.isfinite(v)):
            raise ImproperFunction("grid function has no finite value")
        object.__setattr__(self, "vals", v)

    @property
    def dim(self) -> int:
        return self.grid.dim

    @property
    def array(self) -> np.ndarray:
        return self.vals.reshape(self.grid.shape)

    def values(self, X) -> np.ndarray:
        X, _ = _rows(X, self.dim)
        sp, lo = self.grid.spacing, self.grid.lower
        T = (X - lo) / sp
        K = np.rint(T).astype(np.int64)
        bad = np.any((np.abs(T - K) > 1e-9) | (K < 0) | (K >= np.array(self.grid.shape)), axis=1)
        if np.any(bad):
            raise OffGridPoint(f"point {X[np.argmax(bad)].tolist()} is not a grid node")
        return self.vals[np.ravel_multi_index(tuple(K.T), self.grid.shape)]


ConvexFunction = Union[Quadratic, MaxAffine, PointEnvelope, GridSampled]
GridFunction = Union[_Function, Callable[[np.ndarray], np.ndarray]]


def evaluate(f: GridFunction, X) -> np.ndarray:
    """Values of a representation or a vectorized callable at the rows of ``X``."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if isinstance(f, _Function):
        return f.values(X)
    return np.asarray(f(X), dtype=float).reshape(X.shape[0])


def to_grid(f: GridFunction, grid: GridSpec) -> GridSampled:
    return GridSampled(grid, evaluate(f, grid.nodes()))


def _signed_permutation(S: np.ndarray):
    """``(perm, signs)`` with ``(S c)_i = signs_i * c[perm_i]``, or ``None``."""
    nz = np.abs(S) > 0
    if not (np.all(nz.sum(axis=1) == 1) and np.all(nz.sum(axis=0) == 1)):
        return None
    perm = np.argmax(nz, axis=1)
    signs = S[np.arange(S.shape[0]), perm]
    if not np.all(np.abs(signs) == 1.0):
        return None
    return perm, signs


def _grid_conjugate(f: GridSampled, dual_grid: GridSpec, L: np.ndarray | None = None) -> GridSampled:
    """Discrete conjugate ``c -> max_x <x, L c> - f(x)`` on ``dual_grid`` nodes."""
    if dual_grid.dim != f.dim:
        raise DimensionMismatch(f"dual grid has dimension {dual_grid.dim}, function {f.dim}")
    if L is None:
        out = discrete_conjugate(f.array, f.grid.axis_values(), dual_grid.axis_values())
        return GridSampled(dual_grid, out.reshape(-1))
    sp = _signed_permutation(L)
    if sp is None:
        slopes = dual_grid.nodes() @ L.T
        return GridSampled(dual_grid, brute_conjugate(f.grid.nodes(), f.vals, slopes))
    perm, signs = sp
    axes = dual_grid.axis_values()
    # slope axis i runs over signs_i * (dual axis perm_i); the factored transform
    # accepts unsorted slope lists, so no reordering is needed
    slope_axes = [signs[i] * axes[perm[i]] for i in range(f.dim)]
    R = discrete_conjugate(f.array, f.grid.axis_values(), slope_axes)
    out = np.transpose(R, np.argsort(perm))
    return GridSampled(dual_grid, out.reshape(-1))


def conjugate_star(f: ConvexFunction, dual_grid: GridSpec | None = None,
                   grid: GridSpec | None = None) -> ConvexFunction:
    """Fenchel conjugate with respect to the dot product.

    Grid functions need ``dual_grid``; a singular quadratic is conjugated on
    grids when both ``grid`` and ``dual_grid`` are supplied.
    """
    if isinstance(f, Quadratic):
        lam = np.linalg.eigvalsh(f.Q)
        if lam.min() <= 1e-12 * max(1.0, float(np.abs(lam).max())):
            if grid is not None and dual_grid is not None:
                return _grid_conjugate(to_grid(f, grid), dual_grid)
            raise DegenerateQuadratic(
                f"quadratic has smallest eigenvalue {lam.min():.3e}; closed-form conjugate needs a definite matrix"
            )
        P = np.linalg.inv(f.Q)
        P = 0.5 * (P + P.T)
        return Quadratic(P, -P @ f.b, 0.5 * f.b @ P @ f.b - f.c)
    if isinstance(f, MaxAffine):
        return PointEnvelope(f.slopes, f.offsets)
    if isinstance(f, PointEnvelope):
        if f.pre_map is None:
            return MaxAffine(f.points, f.vals)
        L = f.pre_map
        if L.shape[0] != L.shape[1] or np.linalg.matrix_rank(L) < L.shape[0]:
            raise InvalidParams("conjugate of an envelope composed with a singular map is not representable")
        return MaxAffine(np.linalg.solve(L, f.points.T).T, f.vals)
    if isinstance(f, GridSampled):
        if dual_grid is None:
            raise InvalidParams("conjugating a grid function needs a dual grid")
        return _grid_conjugate(f, dual_grid)
    raise InvalidParams(f"unsupported function type {type(f).__name__}")


def intrinsic_conjugate(f: ConvexFunction, space: SSDSpace, dual_grid: GridSpec | None = None,
                        grid: GridSpec | None = None) -> ConvexFunction:
    """Conjugate with respect to the form: ``f@(c) = sup_b form(b, c) - f(b) = f*(S c)``.

    ``S`` need not be invertible: the linear map is folded into slopes or
    points, and kept as a ``pre_map`` only when it cannot be inverted.
    """
    S = np.asarray(space.S, dtype=float)
    if f.dim != space.dim:
        raise DimensionMismatch(f"function has dimension {f.dim}, space {space.dim}")
    if isinstance(f, Quadratic):
        g = conjugate_star(f, dual_grid, grid)
        if isinstance(g, GridSampled):
            return _grid_conjugate(to_grid(f, grid), dual_grid, S)
        return Quadratic(S @ g.Q @ S, S @ g.b, g.c)
    if isinstance(f, MaxAffine):
        if np.linalg.matrix_rank(S) == space.dim:
            return PointEnvelope(np.linalg.solve(S, f.slopes.T).T, f.offsets)
        return PointEnvelope(f.slopes, f.offsets, pre_map=S)
    if isinstance(f, PointEnvelope):
        g = conjugate_star(f)
        return MaxAffine(g.slopes @ S, g.offsets)
    if isinstance(f, GridSampled):
        if dual_grid is None:
            raise InvalidParams("conjugating a grid function needs a dual grid")
        return _grid_conjugate(f, dual_grid, S)
    raise InvalidParams(f"unsupported function type {type(f).__name__}")


def quad_inf_conv(h: QuadraticExpr, k: QuadraticExpr) -> QuadraticExpr:
    """Exact ``(h ∇ k)(x) = min_y h(y) + k(x - y)`` for quadratics whose Hessians sum to a definite matrix."""
    A, B = h.Q, k.Q
    M = A + B
    lam = np.linalg.eigvalsh(M)
    if lam.min() <= 1e-12 * max(1.0, float(np.abs(lam).max())):
        raise DegenerateQuadratic("inf-convolution of quadratics needs a positive definite Hessian sum")
    Minv = np.linalg.inv(M)
    H = B - B @ Minv @ B
    y0 = Minv @ (k.b - h.b)  # minimizer at x = 0
    const = float(h(y0) + k(-y0))
    lin = k.b - B @ y0
    return QuadraticExpr(0.5 * (H + H.T), lin, const)


def quad_inf_conv_argmin(h: QuadraticExpr, k: QuadraticExpr, x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return np.linalg.solve(h.Q + k.Q, k.Q @ x + k.b - h.b)


def inf_conv_witness(h: GridFunction, k: GridFunction, x, search: GridSpec | None) -> tuple[float, np.ndarray]:
    """``min_y h(y) + k(x - y)`` and a minimizer.

    Two convex quadratics with a definite Hessian sum use the closed form;
    anything else is minimized over the nodes of ``search``.
    """
    x = np.asarray(x, dtype=float)
    if isinstance(h, QuadraticExpr) and isinstance(k, QuadraticExpr):
        lam = np.linalg.eigvalsh(h.Q + k.Q)
        if lam.min() > 1e-12 * max(1.0, float(np.abs(lam).max())):
            y = quad_inf_conv_argmin(h, k, x)
            return float(h(y) + k(x - y)), y
    if search is None or search.size == 0:
        raise EmptySearchGrid("inf-convolution needs a nonempty search grid")
    Y = search.nodes()
    if Y.shape[1] != x.shape[0]:
        raise DimensionMismatch(f"search grid has dimension {Y.shape[1]}, point {x.shape[0]}")
    with np.errstate(invalid="ignore"):
        v = evaluate(h, Y) + evaluate(k, x - Y)
    v = np.where(np.isnan(v), np.inf, v)
    i = int(np.argmin(v))
    return float(v[i]), Y[i]


def inf_conv(h: GridFunction, k: GridFunction, x, search: GridSpec | None) -> float:
    return inf_conv_witness(h, k, x, search)[0]


def _lipschitz_estimate(g: GridSampled) -> float:
    """Largest finite-difference slope per axis, combined in the l2 sense."""
    arr = g.array
    per_axis = []
    for ax, h in enumerate(g.grid.spacing):
        d = np.diff(arr, axis=ax)
        d = d[np.isfinite(d)]
        per_axis.append(float(np.abs(d).max(initial=0.0)) / h)
    return float(np.sqrt(np.sum(np.square(per_axis))))


def _slopes_in_box(g: GridSampled, box: GridSpec) -> np.ndarray:
    """Flat mask of nodes whose central-difference gradient lies in ``box``."""
    arr = g.array
    ok = np.ones(arr.shape, dtype=bool)
    for ax, (h, lo, hi) in enumerate(zip(g.grid.spacing, box.lower, box.upper)):
        grad = np.gradient(arr, h, axis=ax)
        ok &= np.isfinite(grad) & (grad >= lo - 1e-9) & (grad <= hi + 1e-9)
    return ok.reshape(-1)


def biconjugate_check(f: GridFunction, grid: GridSpec, dual_grid: GridSpec,
                      paper_ref: str | None = None, name: str = "biconjugate") -> CheckReport:
    """Compare ``f`` with its discrete biconjugate at interior grid nodes.

    The gap ``f - f**`` is bounded by ``C * h`` where ``h`` is the larger grid
    spacing and ``C`` is the larger of a finite-difference Lipschitz estimate
    of ``f`` and ``sqrt(dim) * diam / 2`` (the primal-box factor that turns a
    dual-grid rounding of the subgradient into a value error).
    """
    paper_ref = paper_ref or ref("biconjugate")
    g = f if isinstance(f, GridSampled) else to_grid(f, grid)
    fstar = discrete_conjugate(g.array, grid.axis_values(), dual_grid.axis_values())
    fss = discrete_conjugate(fstar, dual_grid.axis_values(), grid.axis_values()).reshape(-1)
    mask = grid.interior_mask() & np.isfinite(g.vals) & _slopes_in_box(g, dual_grid)
    gap = np.where(mask, g.vals - fss, -np.inf)
    excluded = int(np.sum(grid.interior_mask() & np.isfinite(g.vals))) - int(mask.sum())
    lip = _lipschitz_estimate(g)
    C = max(lip, np.sqrt(grid.dim) * grid.diameter / 2.0)
    h = max(grid.h, dual_grid.h)
    rep = CheckReport(name)
    if not mask.any():
        rep.add(Check.skipped(f"{name}.gap", paper_ref, "no interior node has a subgradient in the dual box"))
        return rep
    i = int(np.argmax(gap))
    j = int(np.argmin(np.where(mask, gap, np.inf)))
    nodes = grid.nodes()
    rep.add(Check.measure(f"{name}.gap", paper_ref, gap[i], 0.0, C * h, witness=nodes[i].tolist(),
                          notes=f"f - f** at interior nodes; bound C*h with C={C:.6g}, h={h:.3g}",
                          C=C, h=h, lipschitz=lip, nodes=int(mask.sum()), excluded=excluded))
    rep.add(Check.measure(f"{name}.fenchel_young", paper_ref, -gap[j], 1e-9, witness=nodes[j].tolist(),
                          notes="f** never exceeds f", min_gap=float(gap[j])))
    return rep


def pq_extract(space: SSDSpace, f: GridFunction, candidates, tol: float) -> np.ndarray:
    """Candidates where ``|f - q| <= tol``; raises ``FBelowQ`` if ``f < q - tol`` anywhere."""
    X = np.atleast_2d(np.asarray(candidates, dtype=float))
    if X.shape[1] != space.dim:
        raise DimensionMismatch(f"candidates have dimension {X.shape[1]}, space {space.dim}")
    diff = evaluate(f, X) - space.q(X)
    worst = int(np.argmin(diff))
    if diff[worst] < -tol:
        raise FBelowQ(f"f - q = {diff[worst]:.3e} below -{tol:g}", witness=X[worst].tolist(),
                      value=float(diff[worst]))
    return X[np.abs(diff) <= tol]


def write_grid_csv(path, f: GridSampled) -> None:
    lines = [f.grid.header()]
    lines += ["inf" if np.isinf(v) else repr(float(v)) for v in f.vals]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_grid_csv(path) -> GridSampled:
    text = Path(path).read_text(encoding="utf-8").splitlines()
    if not text:
        raise InvalidParams(f"{path}: empty grid file")
    grid = GridSpec.parse_header(text[0])
    vals = []
    for n, line in enumerate(text[1:], start=2):
        for tok in line.split(","):
            tok = tok.strip()
            if not tok:
                continue
            try:
                vals.append(float(tok))
            except ValueError:
                raise InvalidParams(f"{path}:{n}: cannot parse value {tok!r}") from None
    return GridSampled(grid, np.array(vals))
