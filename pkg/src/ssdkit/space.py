"""Finite-dimensional SSD spaces: a real vector space with a symmetric form.

The form is stored as a symmetric matrix ``S`` so that ``form(b, c) = b^T S c``
and ``q(b) = form(b, b) / 2``. With the Euclidean norm the space is a Banach
SSD space exactly when the spectral norm of ``S`` is at most one.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import AsymmetricForm, DimensionMismatch, InvalidParams, NotBanach, NotBanachSpace

EPS_Q = 1e-12
EPS_INEQ = 1e-9
BANACH_SLACK = 1e-9


def spectral_norm(S: np.ndarray, rtol: float = 1e-10, max_iter: int = 100_000) -> float:
    """Largest singular value of ``S`` by power iteration on ``S^T S``."""
    S = np.asarray(S, dtype=float)
    n = S.shape[1]
    if not np.any(S):
        return 0.0
    M = S.T @ S
    v = np.random.default_rng(0).standard_normal(n)
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(max_iter):
        w = M @ v
        nw = np.linalg.norm(w)
        if nw == 0.0:
            # start vector in the kernel; restart along the largest column
            v = M[:, np.argmax(np.abs(M).sum(axis=0))].copy()
            v /= np.linalg.norm(v)
            continue
        new = float(v @ w)
        v = w / nw
        if abs(new - lam) <= rtol * abs(new):
            lam = new
            break
        lam = new
    return float(np.sqrt(max(lam, 0.0)))


@dataclass(frozen=True, eq=False)
class SSDSpace:
    """``(R^dim, S, Euclidean norm)``. Build with :func:`make_space`."""

    form_matrix: np.ndarray
    banach: bool
    name: str = "custom"
    norm: str = "euclidean"
    spectral: float = field(default=float("nan"))
    components: tuple = ()

    @property
    def dim(self) -> int:
        return self.form_matrix.shape[0]

    @property
    def S(self) -> np.ndarray:
        return self.form_matrix

    def _check(self, b) -> np.ndarray:
        b = np.asarray(b, dtype=float)
        if b.shape[-1] != self.dim:
            raise DimensionMismatch(f"expected vectors of length {self.dim}, got shape {b.shape}")
        return b

    def form(self, b, c) -> float:
        b = self._check(b)
        c = self._check(c)
        # summing both orders keeps form(b, c) == form(c, b) bit for bit
        return 0.5 * (float(b @ (self.S @ c)) + float(c @ (self.S @ b)))

    def q(self, b):
        """``q(b) = b^T S b / 2``; accepts a vector or an ``(n, dim)`` array."""
        b = self._check(b)
        return 0.5 * np.einsum("...i,ij,...j->...", b, self.S, b)

    def norm_of(self, b):
        b = self._check(b)
        return np.linalg.norm(b, axis=-1)

    def g(self, b):
        self._require_banach()
        b = self._check(b)
        return 0.5 * np.einsum("...i,...i->...", b, b)

    def p(self, b):
        self._require_banach()
        return self.g(b) + self.q(b)

    def iota(self, b):
        """Image of ``b`` in the dual under the pairing: ``<c, iota(b)> = form(c, b)``."""
        return self._check(b) @ self.S.T

    def _require_banach(self):
        if not self.banach:
            raise NotBanachSpace(
                f"space '{self.name}' is not a Banach SSD space (spectral norm {self.spectral:.6g} > 1)"
            )

    def describe(self) -> dict:
        return {
            "name": self.name,
            "dim": self.dim,
            "form": self.S.tolist(),
            "norm": self.norm,
            "banach": self.banach,
            "spectral_norm": self.spectral,
        }


def make_space(S, require_banach: bool = False, name: str = "custom") -> SSDSpace:
    """Validate ``S`` and build an :class:`SSDSpace`.

    Asymmetric input is rejected rather than symmetrized.
    """
    S = np.array(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1] or S.shape[0] == 0:
        raise InvalidParams(f"form matrix must be square and nonempty, got shape {S.shape}")
    if not np.all(np.isfinite(S)):
        raise InvalidParams("form matrix has non-finite entries")
    asym = float(np.max(np.abs(S - S.T)))
    if asym > 0:
        i, j = np.unravel_index(np.argmax(np.abs(S - S.T)), S.shape)
        raise AsymmetricForm(
            f"bilinear form is not symmetric: S[{i},{j}]={S[i, j]} but S[{j},{i}]={S[j, i]}"
        )
    sn = spectral_norm(S)
    banach = sn <= 1.0 + BANACH_SLACK
    if require_banach and not banach:
        raise NotBanach(f"spectral norm of the form is {sn:.12g} > 1; Cauchy-Schwarz bound fails")
    S.setflags(write=False)
    return SSDSpace(form_matrix=S, banach=banach, name=name, spectral=sn)


def block_diag_space(s1: SSDSpace, s2: SSDSpace, name: str | None = None) -> SSDSpace:
    n1, n2 = s1.dim, s2.dim
    S = np.zeros((n1 + n2, n1 + n2))
    S[:n1, :n1] = s1.S
    S[n1:, n1:] = s2.S
    sp = make_space(S, name=name or f"product({s1.name},{s2.name})")
    return SSDSpace(sp.S, sp.banach, sp.name, sp.norm, sp.spectral, components=(s1, s2))
