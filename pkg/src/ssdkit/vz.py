"""VZ and MAS classification, the duality identity, and distance bounds.

A function ``f >= q`` is VZ when ``(f - q) ∇ p`` vanishes everywhere; the
residual is computed exactly for quadratics and by grid minimization
otherwise. VZ has a second characterization (``f >= q`` and the coincidence
set ``{f = q}`` is p-dense), and ``is_vz`` runs both and records whether
they agree.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .anchors import ref
from .convex import (
    GridSampled,
    MaxAffine,
    PointEnvelope,
    Quadratic,
    QuadraticExpr,
    conjugate_star,
    evaluate,
    inf_conv_witness,
    pq_extract,
    quad_inf_conv,
    to_grid,
)
from .errors import EmptyPqSet, EmptySearchGrid, FBelowQ, InvalidParams, NoDualStructure
from .fitzpatrick import phi_sampling_allowance
from .grid import GridSpec
from .report import Check, CheckReport
from .sets import QPositiveSet, min_dist_to, min_q_to
from .space import SSDSpace

SQRT2 = float(np.sqrt(2.0))


def p_expr(space: SSDSpace) -> QuadraticExpr:
    space._require_banach()
    return QuadraticExpr(np.eye(space.dim) + space.S, np.zeros(space.dim), 0.0)


def q_expr(space: SSDSpace) -> QuadraticExpr:
    return QuadraticExpr(space.S, np.zeros(space.dim), 0.0)


def f_minus_q(space: SSDSpace, f):
    """``f - q`` as a quadratic expression when ``f`` is quadratic, else a vectorized callable."""
    if isinstance(f, QuadraticExpr):
        return f.plus(q_expr(space), -1.0)
    return lambda X: evaluate(f, X) - space.q(X)


def vz_residual(space: SSDSpace, f, c, search: GridSpec | None, candidates=None,
                tol: float = 1e-9) -> tuple[float, np.ndarray, float]:
    """``((f - q) ∇ p)(c)``, a minimizer, and the upper bound ``inf p(P_q(f) - c)``.

    The bound uses the coincidence set extracted from ``candidates``
    (default: the search nodes); it is ``inf`` when that set is empty.
    """
    p = p_expr(space)
    c = np.asarray(c, dtype=float)
    value, y = inf_conv_witness(f_minus_q(space, f), p, c, search)
    if candidates is None:
        candidates = search.nodes() if search is not None else np.empty((0, space.dim))
    pq = pq_extract(space, f, candidates, tol) if len(candidates) else np.empty((0, space.dim))
    bound = float(p.values(pq - c).min()) if pq.shape[0] else float("inf")
    return value, y, bound


@dataclass
class VZReport:
    max_residual: float
    probes: GridSpec
    witness: list
    is_vz: bool
    p_density_gaps: np.ndarray
    density_route: bool
    min_f_minus_q: float
    tolerance: float
    residuals: np.ndarray = field(repr=False)
    pq_count: int = 0

    @property
    def routes_agree(self) -> bool:
        return self.is_vz == self.density_route

    def to_report(self, name: str = "vz") -> CheckReport:
        rep = CheckReport(name)
        rep.add(Check.measure("residual", ref("vz_residual"), self.max_residual, self.tolerance,
                              witness=self.witness, verdict=self.is_vz))
        gap = float(np.max(self.p_density_gaps)) if self.p_density_gaps.size else float("inf")
        rep.add(Check.measure("density", ref("vz_density"), max(gap, -self.min_f_minus_q), self.tolerance,
                              verdict=self.density_route, coincidence_points=self.pq_count,
                              notes="f >= q on the search grid and P_q(f) p-dense at the probes"))
        rep.add(Check.measure("routes_agree", ref("vz_routes"), 0.0 if self.routes_agree else 1.0, 0.0,
                              notes="residual route and density route give the same verdict"))
        return rep


def is_vz(space: SSDSpace, f, probes: GridSpec, search: GridSpec | None, tol: float = 1e-6,
          candidates=None, pq_tol: float | None = None) -> VZReport:
    """Decide VZ by the residual and, independently, by ``f >= q`` plus p-density of ``{f = q}``."""
    C = probes.nodes()
    fq = f_minus_q(space, f)
    p = p_expr(space)
    res, _ = _residuals(fq, p, C, search)
    i = int(np.argmax(np.abs(res)))
    verdict1 = bool(np.abs(res[i]) <= tol)

    if candidates is None:
        nodes = [C] if search is None else [search.nodes(), C]
        candidates = np.vstack(nodes)
    fmq = evaluate(fq, candidates)
    min_fmq = float(np.min(fmq))
    pq_tol = tol if pq_tol is None else pq_tol
    if min_fmq < -tol:
        pq = np.empty((0, space.dim))
    else:
        pq = candidates[np.abs(fmq) <= pq_tol]
    if pq.shape[0]:
        gaps = np.array([float(p.values(pq - c).min()) for c in C])
    else:
        gaps = np.full(C.shape[0], np.inf)
    verdict2 = bool(min_fmq >= -tol and np.all(gaps <= tol))
    return VZReport(float(np.abs(res[i])), probes, C[i].tolist(), verdict1, gaps, verdict2,
                    min_fmq, tol, res, int(pq.shape[0]))


def _residuals(fq, p: QuadraticExpr, C: np.ndarray, search: GridSpec | None) -> tuple[np.ndarray, np.ndarray]:
    """``(fq ∇ p)`` at every row of ``C`` with minimizers; closed form for quadratic ``fq``."""
    if isinstance(fq, QuadraticExpr):
        lam = np.linalg.eigvalsh(fq.Q + p.Q)
        if lam.min() > 1e-12 * max(1.0, float(np.abs(lam).max())):
            Y = np.linalg.solve(fq.Q + p.Q, (C @ p.Q.T + p.b - fq.b).T).T
            return fq.values(Y) + p.values(C - Y), Y
    if search is None or search.size == 0:
        raise EmptySearchGrid("inf-convolution needs a nonempty search grid")
    Y = search.nodes()
    hy = evaluate(fq, Y)
    res = np.empty(C.shape[0])
    arg = np.empty(C.shape, dtype=float)
    for k, c in enumerate(C):
        with np.errstate(invalid="ignore"):
            v = hy + p.values(c - Y)
        v = np.where(np.isnan(v), np.inf, v)
        j = int(np.argmin(v))
        res[k], arg[k] = v[j], Y[j]
    return res, arg


def _dual_or_raise(dual):
    if dual is None:
        raise NoDualStructure("this check needs a dual structure (see make_dual)")
    return dual


def _conjugate_on(f, dual_grid: GridSpec, primal_grid: GridSpec) -> tuple[np.ndarray, float, str]:
    """Values of ``f*`` at dual nodes, with an error allowance (0 for exact routes)."""
    D = dual_grid.nodes()
    if isinstance(f, Quadratic) and np.linalg.eigvalsh(f.Q).min() > 1e-12:
        return conjugate_star(f).values(D), 0.0, "closed form"
    if isinstance(f, (MaxAffine, PointEnvelope)) and not (isinstance(f, PointEnvelope) and f.pre_map is not None):
        return conjugate_star(f).values(D), 0.0, "exact polyhedral"
    g = f if isinstance(f, GridSampled) else to_grid(f, primal_grid)
    fd = conjugate_star(g, dual_grid).vals
    arr = g.array
    lip = 0.0
    for ax, h in enumerate(g.grid.spacing):
        d = np.diff(arr, axis=ax)
        d = d[np.isfinite(d)]
        lip = max(lip, float(np.abs(d).max(initial=0.0)) / h)
    rmax = float(np.linalg.norm(D, axis=1).max())
    allow = (rmax + lip * np.sqrt(g.dim)) * g.grid.h * np.sqrt(g.dim) / 2.0
    return fd, allow, "discrete Legendre transform"


def is_mas(space: SSDSpace, dual, f, primal_grid: GridSpec, dual_grid: GridSpec, tol: float = 1e-6,
           allowance: float = 0.0) -> CheckReport:
    """``f >= q`` on the primal grid and ``f* >= q~`` on the dual grid.

    ``allowance`` is added to the primal row (use it for sampled Fitzpatrick
    functions, which underestimate the function they approximate).
    """
    dual = _dual_or_raise(dual)
    X = primal_grid.nodes()
    rep = CheckReport("mas")
    viol = space.q(X) - evaluate(f, X)
    i = int(np.argmax(viol))
    rep.add(Check.measure("primal", ref("mas_primal"), viol[i], tol, allowance, witness=X[i].tolist()))
    D = dual_grid.nodes()
    fs, allow, how = _conjugate_on(f, dual_grid, primal_grid)
    with np.errstate(invalid="ignore"):
        dv = np.where(np.isinf(fs), -np.inf, dual.qt(D) - fs)
    i = int(np.argmax(dv))
    rep.add(Check.measure("dual", ref("mas_dual"), dv[i], tol, allow, witness=D[i].tolist(),
                          notes=f"conjugate by {how}"))
    return rep


def mas_verdict(rep: CheckReport) -> bool:
    return rep.passed


def vz_duality_check(space: SSDSpace, dual, f, probes: GridSpec, search: GridSpec | None = None,
                     dual_search: GridSpec | None = None, tol: float = 1e-8) -> CheckReport:
    """Compare ``-((f - q) ∇ p)(c)`` with ``((f* - q~) ∇ p~)(iota(c))`` at probe nodes.

    Quadratic ``f`` takes the exact path. Otherwise both inf-convolutions are
    minimized over grids (``f*`` by the discrete Legendre transform on
    ``dual_search``) and the tolerance is ``C * h`` with ``C`` reported.
    """
    dual = _dual_or_raise(dual)
    dual.require_banach()
    C = probes.nodes()
    p = p_expr(space)
    qt = QuadraticExpr(dual.dual_form, np.zeros(space.dim), 0.0)
    pt = QuadraticExpr(np.eye(space.dim) + dual.dual_form, np.zeros(space.dim), 0.0)
    rep = CheckReport("duality")
    if isinstance(f, Quadratic) and np.linalg.eigvalsh(f.Q).min() > 1e-12:
        lhs_fn = quad_inf_conv(f_minus_q(space, f), p)
        rhs_fn = quad_inf_conv(conjugate_star(f).plus(qt, -1.0), pt)
        lhs = -lhs_fn.values(C)
        rhs = rhs_fn.values(dual.iota(C))
        gap = np.abs(lhs - rhs)
        i = int(np.argmax(gap))
        rep.add(Check.measure("exact", ref("duality"), gap[i], tol, witness=C[i].tolist(),
                              notes="closed-form quadratic inf-convolutions", lhs=float(lhs[i]), rhs=float(rhs[i])))
        return rep
    if search is None or dual_search is None:
        raise InvalidParams("the grid path needs both a search grid and a dual search grid")
    fstar = conjugate_star(to_grid(f, search) if not isinstance(f, GridSampled) else f, dual_search)
    Z = dual_search.nodes()
    hz = fstar.vals - qt.values(Z)
    Y = search.nodes()
    hy = evaluate(f, Y) - space.q(Y)
    lhs = np.empty(C.shape[0])
    rhs = np.empty(C.shape[0])
    for k, c in enumerate(C):
        lhs[k] = -np.min(hy + p.values(c - Y))
        rhs[k] = np.min(hz + pt.values(dual.iota(c) - Z))
    gap = np.abs(lhs - rhs)
    i = int(np.argmax(gap))
    # both minimizations lose at most (integrand slope) * (half grid diagonal);
    # the discrete conjugate adds the same kind of term on the dual side
    lip_y = _grid_lipschitz(search, hy) + _quad_lipschitz(p, C, Y)
    lip_z = _grid_lipschitz(dual_search, hz) + _quad_lipschitz(pt, dual.iota(C), Z)
    lip_f = _grid_lipschitz(search, evaluate(f, Y))
    conj_err = (float(np.linalg.norm(Z, axis=1).max()) + lip_f) * search.h * np.sqrt(space.dim) / 2.0
    half_diag_y = search.h * np.sqrt(space.dim) / 2.0
    half_diag_z = dual_search.h * np.sqrt(space.dim) / 2.0
    bound = lip_y * half_diag_y + lip_z * half_diag_z + conj_err
    h = max(search.h, dual_search.h)
    Cconst = bound / h
    rep.add(Check.measure("grid", ref("duality"), gap[i], 0.0, bound, witness=C[i].tolist(),
                          notes=f"grid path: bound C*h with C={Cconst:.6g}, h={h:.3g}",
                          C=Cconst, h=h, lhs=float(lhs[i]), rhs=float(rhs[i])))
    return rep


def _grid_lipschitz(grid: GridSpec, vals: np.ndarray) -> float:
    arr = np.asarray(vals, dtype=float).reshape(grid.shape)
    per_axis = []
    for ax, h in enumerate(grid.spacing):
        d = np.diff(arr, axis=ax)
        d = d[np.isfinite(d)]
        per_axis.append(float(np.abs(d).max(initial=0.0)) / h)
    return float(np.sqrt(np.sum(np.square(per_axis))))


def _quad_lipschitz(e: QuadraticExpr, centers: np.ndarray, nodes: np.ndarray) -> float:
    """Largest gradient norm of ``y -> e(c - y)`` over the box spanned by ``centers - nodes``."""
    lo = centers.min(axis=0) - nodes.max(axis=0)
    hi = centers.max(axis=0) - nodes.min(axis=0)
    r = float(np.linalg.norm(np.maximum(np.abs(lo), np.abs(hi))))
    return float(np.linalg.norm(e.Q, 2)) * r + float(np.linalg.norm(e.b))


def distance_bounds_check(space: SSDSpace, f, probes, pq: QPositiveSet | np.ndarray, tol: float = 1e-9,
                          mesh: float | None = None, radius: float | None = None) -> CheckReport:
    """Distance to the coincidence set against the constant-5 and sqrt(2) bounds.

    ``pq`` is a sample of the coincidence set ``{f = q}``. Distances to a
    sample overestimate the true distance by at most ``mesh``, and
    ``-min q(pq - d)`` underestimates by at most ``eps``; the allowances are
    ``mesh`` for the bounds in ``f - q`` and ``mesh + sqrt(2 eps)`` for the
    bound in ``-min q``.
    """
    if isinstance(pq, QPositiveSet):
        pts, mesh = pq.points, pq.mesh if mesh is None else mesh
        pqset = pq
    else:
        pts = np.atleast_2d(np.asarray(pq, dtype=float))
        mesh = 0.0 if mesh is None else mesh
        pqset = None
    if pts.size == 0 or pts.shape[0] == 0:
        raise EmptyPqSet("coincidence set sample is empty")
    X = probes.nodes() if isinstance(probes, GridSpec) else np.atleast_2d(np.asarray(probes, dtype=float))
    dist = min_dist_to(pts, X)
    fmq = evaluate(f, X) - space.q(X)
    if np.min(fmq) < -tol:
        k = int(np.argmin(fmq))
        raise FBelowQ(f"f - q = {fmq[k]:.3e} at a probe", witness=X[k].tolist(), value=float(fmq[k]))
    clamped_f = int(np.sum(fmq < 0))
    fmq = np.maximum(fmq, 0.0)
    negq = -min_q_to(space, pts, X)[0]
    if pqset is not None:
        eps = phi_sampling_allowance(space, pqset, X)
    else:
        R = float(np.linalg.norm(pts, axis=1).max()) if radius is None else radius
        eps = space.spectral * (mesh * (np.linalg.norm(X, axis=1) + R) + 0.5 * mesh * mesh)
    clamped_q = int(np.sum(negq < 0))
    negq = np.maximum(negq, 0.0)
    note = f"clamped {clamped_f} slightly negative f - q values and {clamped_q} negative -inf q values to 0"

    rep = CheckReport("distance")
    b5 = 5.0 * np.sqrt(fmq)
    b48 = SQRT2 * np.sqrt(fmq)
    b36 = SQRT2 * np.sqrt(negq)
    a36 = mesh + np.sqrt(2.0 * eps)
    for name, key, bound, allow in (("constant_5", "dist_5", b5, np.full(X.shape[0], mesh)),
                                    ("sqrt2_min_q", "dist_36", b36, a36),
                                    ("sqrt2_f_minus_q", "dist_48", b48, np.full(X.shape[0], mesh))):
        v = dist - bound
        i = int(np.argmax(v - allow))
        ratios = _ratios(dist, bound)
        rep.add(Check.measure(name, ref(key), v[i], tol, float(allow[i]), witness=X[i].tolist(), notes=note,
                              ratio_max=float(ratios.max()) if ratios.size else None,
                              ratio_min=float(ratios.min()) if ratios.size else None,
                              violations=int(np.sum(v - allow > tol)), probes=int(X.shape[0])))
    r = _ratios(dist, np.sqrt(negq))
    if r.size:
        achieved = float(r.min())
        rep.add(Check.measure("sharpness", ref("sharpness"), abs(achieved / SQRT2 - 1.0), 1e-3,
                              notes="achieved ratio dist / sqrt(-inf q(P - c)) (minimum over probes) against sqrt(2)",
                              achieved_ratio=achieved, normalized_ratio=achieved / SQRT2,
                              ratio_median=float(np.median(r)), ratio_max=float(r.max()),
                              probes_used=int(r.size)))
    else:
        rep.add(Check.skipped("sharpness", ref("sharpness"), "every probe lies on the coincidence set"))
    return rep


def _ratios(num: np.ndarray, den: np.ndarray, floor: float = 1e-6) -> np.ndarray:
    ok = den > floor
    return num[ok] / den[ok]


def pair_bound_check(space: SSDSpace, f, pairs=1000, box: float = 2.0, seed: int = 42,
                     tol: float = 1e-9) -> CheckReport:
    """``-q(b - c) <= (sqrt((f-q)(b)) + sqrt((f-q)(c)))^2 <= 2(f-q)(b) + 2(f-q)(c)`` on pairs.

    ``pairs`` is either a count (uniform pairs in ``[-box, box]^dim``) or an
    ``(n, 2, dim)`` array.
    """
    if isinstance(pairs, (int, np.integer)):
        rng = np.random.default_rng(seed)
        P = rng.uniform(-box, box, size=(int(pairs), 2, space.dim))
    else:
        P = np.asarray(pairs, dtype=float)
    B, Cc = P[:, 0, :], P[:, 1, :]
    fb = evaluate(f, B) - space.q(B)
    fc = evaluate(f, Cc) - space.q(Cc)
    finite = np.isfinite(fb) & np.isfinite(fc)
    low = np.minimum(fb, fc)
    if np.any(finite & (low < -tol)):
        k = int(np.argmin(np.where(finite, low, np.inf)))
        raise FBelowQ("f < q on a sampled pair", witness=[B[k].tolist(), Cc[k].tolist()], value=float(low[k]))
    fb, fc = np.maximum(fb, 0.0), np.maximum(fc, 0.0)
    lhs = -space.q(B - Cc)
    r1 = (np.sqrt(fb) + np.sqrt(fc)) ** 2
    r2 = 2.0 * fb + 2.0 * fc
    rep = CheckReport("pair_bound")
    for name, key, rhs in (("sqrt_form", "pair_bound", r1), ("linear_form", "pair_bound_linear", r2)):
        scale = 1.0 + np.abs(lhs) + np.abs(rhs)
        v = np.where(finite, (lhs - rhs) / scale, -np.inf)
        i = int(np.argmax(v))
        rep.add(Check.measure(name, ref(key), v[i], tol, witness=[B[i].tolist(), Cc[i].tolist()],
                              notes="violation relative to 1 + |lhs| + |rhs|",
                              pairs=int(finite.sum()), violations=int(np.sum(v > tol))))
    return rep
