"""Dual SSD structure on ``R^dim`` and Gossez-extension checks.

The dual pairing is the dot product. The embedding is ``iota(b) = S b`` and
the dual form must satisfy ``[iota(b), c*] = <b, c*>``, which forces its
matrix to be ``S^{-1}``. Quantities with a tilde live on the dual side.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .anchors import ref
from .convex import MaxAffine, conjugate_star, intrinsic_conjugate
from .errors import DimensionMismatch, NotBanachDual, SingularForm
from .fitzpatrick import phi_function, theta_function, theta_sampling_allowance
from .grid import GridSpec
from .report import NOT_FALSIFIED, Check, CheckReport
from .sets import QPositiveSet, min_dist_to
from .space import BANACH_SLACK, SSDSpace, make_space, spectral_norm

MAX_COND = 1e8
AXIOM_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class SSDDual:
    base: SSDSpace
    iota_matrix: np.ndarray
    dual_form: np.ndarray
    involutive: bool
    banach_dual: bool
    reason: str = ""

    @property
    def dim(self) -> int:
        return self.base.dim

    @property
    def space(self) -> SSDSpace:
        """The dual side as an SSD space in its own right."""
        return make_space(self.dual_form, name=f"dual({self.base.name})")

    def _check(self, d) -> np.ndarray:
        d = np.asarray(d, dtype=float)
        if d.shape[-1] != self.dim:
            raise DimensionMismatch(f"expected dual vectors of length {self.dim}, got shape {d.shape}")
        return d

    def iota(self, b):
        return self._check(b) @ self.iota_matrix.T

    def iota_tilde(self, d):
        return self._check(d) @ self.dual_form.T

    def pairing(self, c, d) -> float:
        c, d = self._check(c), self._check(d)
        return 0.5 * (float(c @ (self.dual_form @ d)) + float(d @ (self.dual_form @ c)))

    def qt(self, d):
        d = self._check(d)
        return 0.5 * np.einsum("...i,ij,...j->...", d, self.dual_form, d)

    def pt(self, d):
        if not self.banach_dual:
            raise NotBanachDual(self.reason or "dual norm bound fails")
        d = self._check(d)
        return 0.5 * np.einsum("...i,...i->...", d, d) + self.qt(d)

    def require_banach(self) -> None:
        if not self.banach_dual:
            raise NotBanachDual(self.reason or "dual norm bound fails")


def make_dual(space: SSDSpace) -> SSDDual:
    S = np.asarray(space.S, dtype=float)
    cond = float(np.linalg.cond(S))
    if not np.isfinite(cond) or cond > MAX_COND:
        raise SingularForm(f"form matrix has condition number {cond:.3e}; a dual form needs an invertible matrix")
    St = np.linalg.inv(S)
    St = 0.5 * (St + St.T)
    St.setflags(write=False)
    involutive = bool(np.max(np.abs(S @ S - np.eye(space.dim))) <= AXIOM_TOL)
    banach_dual, reason = True, ""
    if space.banach:
        sn = spectral_norm(St)
        if sn > 1.0 + BANACH_SLACK:
            banach_dual = False
            reason = f"spectral norm of the dual form is {sn:.6g} > 1; p~ is not available"
    else:
        banach_dual, reason = False, "base space is not a Banach SSD space"
    return SSDDual(space, S, St, involutive, banach_dual, reason)


def dual_axioms_check(dual: SSDDual, n_random: int = 1000, seed: int = 42, tol: float = AXIOM_TOL) -> CheckReport:
    rng = np.random.default_rng(seed)
    B = rng.standard_normal((n_random, dual.dim))
    C = rng.standard_normal((n_random, dual.dim))
    D = rng.standard_normal((n_random, dual.dim))
    sp = dual.base
    iB, iC = dual.iota(B), dual.iota(C)
    rep = CheckReport("dual_axioms")

    lhs = np.einsum("ni,ij,nj->n", iB, dual.dual_form, iC)
    rhs = np.einsum("ni,ij,nj->n", B, sp.S, C)
    e = np.abs(lhs - rhs)
    i = int(np.argmax(e))
    rep.add(Check.measure("form_preserved", ref("dual_form"), e[i], tol, witness=[B[i].tolist(), C[i].tolist()]))

    e = np.abs(dual.qt(iB) - sp.q(B))
    i = int(np.argmax(e))
    rep.add(Check.measure("q_preserved", ref("dual_q"), e[i], tol, witness=B[i].tolist()))

    lhs = np.einsum("ni,ij,nj->n", iB, dual.dual_form, D)
    e = np.abs(lhs - np.einsum("ni,ni->n", B, D))
    i = int(np.argmax(e))
    rep.add(Check.measure("pairing", ref("dual_pairing"), e[i], tol, witness=[B[i].tolist(), D[i].tolist()]))

    if dual.involutive:
        e = np.abs(dual.iota_tilde(iB) - B).max(axis=1)
        i = int(np.argmax(e))
        rep.add(Check.measure("hat_identity", ref("hat_identity"), e[i], tol, witness=B[i].tolist()))
    else:
        rep.add(Check.skipped("hat_identity", ref("hat_identity"), "form is not involutive"))
    return rep


def _gaps(dual: SSDDual, A: QPositiveSet, D: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Both membership expressions: ``min_a q~(iota(a) - d)`` and ``q~(d) - Theta_A(d)``."""
    iA = dual.iota(A.points)
    g1 = np.empty(D.shape[0])
    rows = max(1, (1 << 22) // iA.shape[0])
    for s in range(0, D.shape[0], rows):
        blk = D[s:s + rows]
        g1[s:s + rows] = dual.qt(iA[None, :, :] - blk[:, None, :]).min(axis=1)
    g2 = dual.qt(D) - theta_function(A).values(D)
    return g1, g2


def gossez_membership(space: SSDSpace, dual: SSDDual, A: QPositiveSet, d, tol: float = 1e-9):
    """``(member, gap, second_gap)``: member iff ``min_a q~(iota(a) - d) >= -tol``."""
    d = np.asarray(d, dtype=float)
    D = np.atleast_2d(d)
    g1, g2 = _gaps(dual, A, D)
    member = g1 >= -tol
    if d.ndim == 1:
        return bool(member[0]), float(g1[0]), float(g2[0])
    return member, g1, g2


def ni_check(space: SSDSpace, dual: SSDDual, A: QPositiveSet, dual_grid: GridSpec, tol: float = 1e-9) -> CheckReport:
    """Minimum of ``Theta_A - q~`` over the dual grid, with the sampling allowance for Theta."""
    D = dual_grid.nodes()
    gap = theta_function(A).values(D) - dual.qt(D)
    allow = theta_sampling_allowance(space, A, D)
    i = int(np.argmin(gap + allow))
    rep = CheckReport("ni")
    rep.add(Check.measure("theta_ge_qt", ref("ni"), -gap[i], tol, float(allow[i]), witness=D[i].tolist(),
                          notes="sampled Theta underestimates; allowance is additive",
                          min_gap=float(gap.min()), mesh=A.mesh))
    return rep


def gossez_extension_check(space: SSDSpace, dual: SSDDual, A: QPositiveSet, dual_grid: GridSpec,
                           tol: float = 1e-9, n_random: int = 100, seed: int = 42,
                           sign_tol: float = 1e-6) -> CheckReport:
    """Image inclusion, the two membership expressions, NI, set equality and the conjugate chain."""
    rep = CheckReport("gossez")
    iA = dual.iota(A.points)

    g1, _ = _gaps(dual, A, iA)
    i = int(np.argmin(g1))
    rep.add(Check.measure("image_inclusion", ref("gossez_inclusion"), -g1[i], tol, witness=iA[i].tolist()))

    D = dual_grid.nodes()
    g1, g2 = _gaps(dual, A, D)
    decisive = (np.abs(g1) > sign_tol) | (np.abs(g2) > sign_tol)
    mismatch = decisive & (np.sign(g1) != np.sign(g2))
    diff = np.abs(g1 - g2)
    i = int(np.argmax(diff))
    rep.add(Check.measure("membership_forms", ref("gossez_forms"), diff[i], 1e-9 * (1 + np.abs(g1).max()),
                          witness=D[i].tolist(), sign_mismatches=int(mismatch.sum()),
                          decisive=int(decisive.sum())))
    rep.add(Check.measure("membership_sign", ref("gossez_forms"), float(mismatch.sum()), 0.0,
                          witness=D[int(np.argmax(mismatch))].tolist() if mismatch.any() else None,
                          notes=f"sign agreement where |gap| > {sign_tol:g}"))

    ni = ni_check(space, dual, A, dual_grid, tol)
    rep.extend(ni)
    theta_vals = theta_function(A).values(D)
    if ni.passed:
        allow = theta_sampling_allowance(space, A, D)
        members = g1 >= -tol
        coincide = np.abs(theta_vals - dual.qt(D)) <= tol
        differ = members != coincide
        rep.add(Check.measure("extension_equals_coincidence", ref("gossez_sets"), float(differ.sum()), 0.0,
                              witness=D[int(np.argmax(differ))].tolist() if differ.any() else None,
                              members=int(members.sum())))
        if members.any():
            dist = min_dist_to(iA, D[members])
            k = int(np.argmax(dist))
            mesh_allow = space.spectral * A.mesh + np.sqrt(2.0 * (tol + float(allow.max())))
            rep.add(Check.measure("extension_near_image", ref("extension_near_image"), dist[k], 0.0,
                                  mesh_allow, witness=D[members][k].tolist(), ok_status=NOT_FALSIFIED,
                                  notes="finite shadow of extension triviality; not a proof"))
    else:
        rep.add(Check.skipped("extension_equals_coincidence", ref("gossez_sets"), "NI check failed"))

    # conjugate chain at random duals: half inside conv(iota(A)), half uniform in the grid box
    rng = np.random.default_rng(seed)
    n_in = n_random // 2
    W = rng.dirichlet(np.ones(min(len(A), 4)), size=n_in)
    idx = rng.integers(0, len(A), size=(n_in, W.shape[1]))
    inside = np.einsum("nk,nkd->nd", W, iA[idx])
    box = rng.uniform(dual_grid.lower, dual_grid.upper, size=(n_random - n_in, space.dim))
    R = np.vstack([inside, box])
    theta_conj = intrinsic_conjugate(theta_function(A), dual.space)
    phi_star = conjugate_star(phi_function(space, A))
    tc, ps, th = theta_conj.values(R), phi_star.values(R), theta_function(A).values(R)
    with np.errstate(invalid="ignore"):
        v1 = np.where(np.isinf(tc) & np.isinf(ps), -np.inf, ps - tc)
    v2 = np.where(np.isinf(ps), -np.inf, th - ps)
    v = np.maximum(v1, v2)
    i = int(np.argmax(v))
    rep.add(Check.measure("conjugate_chain", ref("gossez_chain"), v[i], 1e-8, witness=R[i].tolist(),
                          finite_points=int(np.isfinite(ps).sum()), points=int(R.shape[0])))

    # Theta by two routes: directly, and as Phi of the image set in the dual space
    dsp = dual.space
    phi_img_fn = MaxAffine(iA @ dsp.S, dsp.q(iA))
    phi_img = phi_img_fn.values(R)
    e = np.abs(phi_img - th)
    i = int(np.argmax(e))
    rep.add(Check.measure("theta_two_route", ref("theta_two_route"), e[i], 1e-9 * (1 + np.abs(th).max()),
                          witness=R[i].tolist()))
    e = np.abs(phi_img_fn.values(iA) - dsp.q(iA))
    i = int(np.argmax(e))
    rep.add(Check.measure("phi_dual_on_image", ref("phi_dual_on_image"), e[i], 1e-9 * (1 + np.abs(dsp.q(iA)).max()),
                          witness=iA[i].tolist()))
    return rep
