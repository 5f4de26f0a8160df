"""Fitzpatrick-type functions of a finite q-positive set.

For points ``a_i`` with ``q_i = q(a_i)``:

* ``phi``   is ``max_i form(a_i, b) - q_i`` (max-affine, slopes ``S a_i``),
* ``theta`` is ``max_i <a_i, d> - q_i`` on the dual variable,
* ``psi``   is the lower convex envelope of ``a_i -> q_i``.

When the set is a sample of a larger set, ``phi`` and ``theta`` are
underestimates; the ``*_sampling_allowance`` helpers bound the loss in
terms of the sample mesh.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .anchors import ref
from .convex import MaxAffine, PointEnvelope, evaluate, intrinsic_conjugate
from .errors import InvalidParams
from .grid import GridSpec
from .report import Check, CheckReport
from .sets import QPositiveSet, min_q_to
from .space import SSDSpace

IDENTITY_TOL = 1e-9


def phi_function(space: SSDSpace, A: QPositiveSet) -> MaxAffine:
    return MaxAffine(A.points @ space.S, A.q_values)


def theta_function(A: QPositiveSet) -> MaxAffine:
    return MaxAffine(A.points, A.q_values)


def psi_function(A: QPositiveSet) -> PointEnvelope:
    return PointEnvelope(A.points, A.q_values)


def phi(space: SSDSpace, A: QPositiveSet, b):
    return phi_function(space, A)(b)


def phi_via_q(space: SSDSpace, A: QPositiveSet, b):
    """Same function written as ``q(b) - min_a q(a - b)``."""
    b = np.asarray(b, dtype=float)
    X = np.atleast_2d(b)
    out = space.q(X) - min_q_to(space, A.points, X)[0]
    return float(out[0]) if b.ndim == 1 else out


def theta(space: SSDSpace, A: QPositiveSet, d):
    if np.asarray(d).shape[-1] != space.dim:
        raise InvalidParams(f"dual vector must have length {space.dim}")
    return theta_function(A)(d)


def psi(space: SSDSpace, A: QPositiveSet, b):
    return psi_function(A)(b)


def phi_sampling_allowance(space: SSDSpace, A: QPositiveSet, b) -> np.ndarray:
    """Bound on ``Phi_true(b) - Phi_sample(b)`` when every true point is within ``A.mesh`` of the sample."""
    b = np.atleast_2d(np.asarray(b, dtype=float))
    d, s = A.mesh, space.spectral
    return s * (d * (np.linalg.norm(b, axis=1) + A.radius) + 0.5 * d * d)


def theta_sampling_allowance(space: SSDSpace, A: QPositiveSet, dual) -> np.ndarray:
    dual = np.atleast_2d(np.asarray(dual, dtype=float))
    d, s = A.mesh, space.spectral
    return d * (np.linalg.norm(dual, axis=1) + s * A.radius) + 0.5 * s * d * d


@dataclass(frozen=True, eq=False)
class FitzpatrickTriple:
    phi: MaxAffine
    theta: MaxAffine
    psi: PointEnvelope

    @classmethod
    def build(cls, space: SSDSpace, A: QPositiveSet) -> "FitzpatrickTriple":
        t = cls(phi_function(space, A), theta_function(A), psi_function(A))
        qa = A.q_values
        err_phi = float(np.max(np.abs(t.phi.values(A.points) - qa)))
        if err_phi > IDENTITY_TOL * (1.0 + float(np.abs(qa).max())):
            raise InvalidParams(f"Phi_A differs from q on A by {err_phi:.3e}; is A q-positive?")
        err_psi = float(np.max(t.psi.values(A.points) - qa))
        if err_psi > IDENTITY_TOL * (1.0 + float(np.abs(qa).max())):
            raise InvalidParams(f"Psi_A exceeds q on A by {err_psi:.3e}")
        return t


def identities_check(space: SSDSpace, A: QPositiveSet, n_random: int = 1000, seed: int = 42,
                     tol: float = IDENTITY_TOL) -> CheckReport:
    """Two routes to Phi_A at random points; Phi_A = q and Psi_A <= q on the set."""
    rng = np.random.default_rng(seed)
    R = max(1.0, A.radius)
    X = rng.uniform(-R, R, size=(n_random, space.dim))
    rep = CheckReport("identities")
    v2 = phi(space, A, X)
    v3 = phi_via_q(space, A, X)
    diff = np.abs(v2 - v3)
    i = int(np.argmax(diff))
    rep.add(Check.measure("phi_two_route", ref("phi_two_route"), diff[i], tol, witness=X[i].tolist(),
                          points=n_random))
    qa = A.q_values
    e4 = np.abs(phi(space, A, A.points) - qa)
    i = int(np.argmax(e4))
    rep.add(Check.measure("phi_eq_q_on_set", ref("phi_eq_q_on_set"), e4[i], tol,
                          witness=A.points[i].tolist(), points=len(A)))
    e32 = psi_function(A).values(A.points) - qa
    i = int(np.argmax(e32))
    rep.add(Check.measure("psi_le_q_on_set", ref("psi_le_q_on_set"), e32[i], tol,
                          witness=A.points[i].tolist(), points=len(A)))
    return rep


def sandwich_check(space: SSDSpace, A: QPositiveSet, f, grid: GridSpec, tol: float = 1e-6) -> CheckReport:
    """``Psi_A >= f >= Phi_A`` and ``Phi_A >= q`` at grid nodes.

    Sampling makes ``Psi_A`` larger and ``Phi_A`` smaller than for the full
    set, so the two bounds on ``f`` need no allowance; the last row, which
    only holds for maximal sets, gets the Phi sampling allowance.
    """
    X = grid.nodes()
    fv = evaluate(f, X)
    ph = phi(space, A, X)
    ps = psi_function(A).values(X)
    qv = space.q(X)
    rep = CheckReport("sandwich")

    finite = np.isfinite(ps)
    if finite.any():
        up = np.where(finite, fv - ps, -np.inf)
        i = int(np.argmax(up))
        rep.add(Check.measure("upper", ref("sandwich_upper"), up[i], tol, witness=X[i].tolist(),
                              notes=f"{int((~finite).sum())} nodes outside conv(A) skipped",
                              skipped_nodes=int((~finite).sum())))
    else:
        rep.add(Check.skipped("upper", ref("sandwich_upper"), "no grid node lies in conv(A)"))

    lo = np.where(np.isfinite(fv), ph - fv, -np.inf)
    i = int(np.argmax(lo))
    rep.add(Check.measure("lower", ref("sandwich_lower"), lo[i], tol, witness=X[i].tolist()))

    allow = phi_sampling_allowance(space, A, X)
    gq = qv - ph - allow
    i = int(np.argmax(gq))
    rep.add(Check.measure("phi_ge_q", ref("phi_ge_q"), qv[i] - ph[i], tol, float(allow[i]),
                          witness=X[i].tolist(), notes="expected only for maximal A",
                          mesh=A.mesh))
    return rep


def phi_conjugate_check(space: SSDSpace, A: QPositiveSet, grid: GridSpec,
                        dual_search: GridSpec | None = None, tol: float = 1e-8) -> CheckReport:
    """Properties of the intrinsic conjugate of Phi_A, computed exactly and by brute force.

    The exact route conjugates the max-affine Phi_A into a point envelope;
    the brute-force route maximizes ``form(b, c) - Phi_A(b)`` over the
    nodes of ``dual_search`` (default: ``grid``).
    """
    search = dual_search or grid
    S = space.S
    ph = phi_function(space, A)
    conj = intrinsic_conjugate(ph, space)
    biconj = intrinsic_conjugate(conj, space) if conj.pre_map is None else None
    X = grid.nodes()
    qa = A.q_values
    rep = CheckReport("phi_conjugate")

    ca = conj.values(A.points) - qa
    i = int(np.argmax(ca))
    rep.add(Check.measure("le_q_on_set", ref("phi_conj_le_q"), ca[i], tol, witness=A.points[i].tolist()))

    cx = conj.values(X)
    phx = ph.values(X)
    qx = space.q(X)
    gap_b = np.maximum(phx, qx) - cx
    i = int(np.argmax(gap_b))
    rep.add(Check.measure("ge_phi_and_q", ref("phi_conj_ge"), gap_b[i], tol, witness=X[i].tolist()))

    if biconj is not None:
        gap_c = np.abs(biconj.values(X) - phx)
        i = int(np.argmax(gap_c))
        rep.add(Check.measure("biconjugate", ref("phi_biconj"), gap_c[i], tol, witness=X[i].tolist()))
    else:
        rep.add(Check.skipped("biconjugate", ref("phi_biconj"),
                              "form is singular; the conjugate keeps a non-invertible pre-map"))

    # brute-force route at the set points, where the exact conjugate is finite
    B = search.nodes()
    phB = ph.values(B)
    inside = np.all((A.points >= search.lower) & (A.points <= search.upper), axis=1)
    C = A.points[inside]
    if C.shape[0]:
        brute = np.max(C @ S @ B.T - phB, axis=1)
        exact = conj.values(C)
        slope_bound = space.spectral * np.linalg.norm(C, axis=1) + float(np.linalg.norm(ph.slopes, axis=1).max())
        allow = float(slope_bound.max()) * search.h * np.sqrt(space.dim) / 2.0
        over = brute - exact
        i = int(np.argmax(over))
        rep.add(Check.measure("brute_below_exact", ref("phi_conj_routes"), over[i], tol,
                              witness=C[i].tolist(), notes="a sup over grid nodes cannot exceed the exact sup"))
        under = exact - brute
        i = int(np.argmax(under))
        rep.add(Check.measure("two_route", ref("phi_conj_routes"), under[i], tol, allow,
                              witness=C[i].tolist(),
                              notes="exact polyhedral conjugate vs sup over the search grid",
                              search_h=search.h, points=int(C.shape[0])))
    else:
        rep.add(Check.skipped("two_route", ref("phi_conj_routes"), "no set point inside the search grid"))

    # Young-type inequality form(b, a) <= q(a) + Phi_A(b) over set points and grid nodes
    worst = -np.inf
    wit = None
    step = max(1, (1 << 22) // max(1, X.shape[0]))
    for s in range(0, len(A), step):
        Ablk = A.points[s:s + step]
        M = Ablk @ S @ X.T - qa[s:s + step, None] - phx[None, :]
        k = np.unravel_index(np.argmax(M), M.shape)
        if M[k] > worst:
            worst = float(M[k])
            wit = [Ablk[k[0]].tolist(), X[k[1]].tolist()]
    rep.add(Check.measure("young_on_set", ref("young_on_set"), worst, tol, witness=wit))

    inside_hull = np.isfinite(cx)
    ps = psi_function(A).values(X)
    if inside_hull.any():
        ok = np.isfinite(ps)
        chain = np.full(cx.shape, -np.inf)
        chain[ok] = np.maximum(cx[ok] - ps[ok], qx[ok] - cx[ok])
        i = int(np.argmax(chain))
        note = ("S invertible: Psi_A and the conjugate coincide (finite-dimensional collapse)"
                if conj.pre_map is None else "S singular: Psi_A >= conjugate >= q may be strict")
        rep.add(Check.measure("psi_chain", ref("psi_chain"), chain[i], tol, witness=X[i].tolist(), notes=note))
    else:
        rep.add(Check.skipped("psi_chain", ref("psi_chain"), "no grid node lies in conv(A)"))
    return rep
