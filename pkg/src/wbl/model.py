"""Wishart process parameters and the deterministic endpoint quantities.

A parameter set ``(n, alpha, a, b, x0)`` fixes the matrix square-root
diffusion

    dX = sqrt(X) dW a + a^T dW^T sqrt(X) + (b X + X b + alpha a^T a) dt

on the cone of positive semi-definite n x n matrices.  The endpoint X_t is
noncentral-Wishart distributed with ``alpha`` degrees of freedom, scale

    sigma_t = int_0^t e^{bs} a^T a e^{bs} ds

and noncentrality mean ``e^{bt} x0 e^{bt}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import linalg
from .distribution import NoncentralWishartSpec
from .errors import DomainError


@dataclass(frozen=True)
class WishartParams:
    """Parameters of a Wishart diffusion law.

    Admissibility (checked by :func:`validate`): ``alpha >= n+1``; ``b``
    symmetric negative semi-definite; ``a`` invertible and commuting with
    ``b``; ``x0`` symmetric positive semi-definite.
    """

    n: int
    alpha: float
    a: np.ndarray
    b: np.ndarray
    x0: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "a", linalg.as_matrix(self.a, "a"))
        object.__setattr__(self, "b", linalg.symmetrize(self.b, "b"))
        object.__setattr__(self, "x0", linalg.symmetrize(self.x0, "x0"))
        for name in ("a", "b", "x0"):
            arr = getattr(self, name)
            if arr.shape != (self.n, self.n):
                raise DomainError(
                    f"{name} has shape {arr.shape}, expected ({self.n}, {self.n})"
                )
            arr.setflags(write=False)

    @property
    def ata(self) -> np.ndarray:
        return linalg.symmetrize(self.a.T @ self.a)

    def with_drift_shift(self, u) -> "WishartParams":
        """Parameters with drift ``b + u`` (not re-validated)."""
        return replace(self, b=linalg.symmetrize(self.b + u))

    def with_index_shift(self, nu: float) -> "WishartParams":
        """Parameters with degrees of freedom ``alpha + 2 nu``."""
        return replace(self, alpha=self.alpha + 2.0 * nu)


def validate(params: WishartParams) -> list[str]:
    """Return every violated admissibility condition (empty list = valid)."""
    problems = []
    if params.n < 1:
        problems.append(f"dimension must be >= 1, got {params.n}")
    if params.alpha < params.n + 1:
        problems.append(
            f"alpha below n+1: alpha={params.alpha}, n={params.n}"
        )
    det_a = np.linalg.det(params.a)
    norm_a = np.linalg.norm(params.a)
    if abs(det_a) <= 1e-12 * max(norm_a, 1e-300) ** params.n:
        problems.append(f"a numerically singular: |det a| = {abs(det_a):.3e}")
    if not linalg.cone_check(params.b, "nsd"):
        w, _ = linalg.eigen_sym(params.b)
        problems.append(f"b not negative semi-definite: max eigenvalue {w[-1]:.6e}")
    if not linalg.commutes(params.a, params.b):
        problems.append("a,b do not commute")
    if not linalg.cone_check(params.x0, "psd"):
        w, _ = linalg.eigen_sym(params.x0)
        problems.append(f"x0 not positive semi-definite: min eigenvalue {w[0]:.6e}")
    return problems


def validated(params: WishartParams) -> WishartParams:
    """Raise :class:`DomainError` listing all violations, or pass through."""
    problems = validate(params)
    if problems:
        raise DomainError("invalid parameters: " + "; ".join(problems))
    return params


def _phi(c: np.ndarray, t: float) -> np.ndarray:
    """Entrywise int_0^t e^{c s} ds = expm1(c t)/c, with the c->0 limit."""
    out = np.full_like(c, t)
    nz = np.abs(c) > 1e-14
    out[nz] = np.expm1(c[nz] * t) / c[nz]
    return out


def sigma_t(params: WishartParams, t: float, method: str = "closed") -> np.ndarray:
    """Covariance accumulation ``int_0^t e^{bs} a^T a e^{bs} ds``.

    The closed form works in the eigenbasis of ``b``: with ``b = Q diag(beta)
    Q^T`` and ``M = Q^T a^T a Q``, the (i, j) entry of the rotated integrand
    is ``M_ij e^{(beta_i + beta_j) s}`` whose time integral is elementary.
    ``method='quadrature'`` integrates entrywise with adaptive Simpson
    instead (kept as a slow cross-check for near-defective spectra).
    """
    if t < 0:
        raise DomainError(f"time must be nonnegative, got {t}")
    if method == "closed":
        beta, q = linalg.eigen_sym(params.b)
        m = q.T @ params.ata @ q
        phi = _phi(beta[:, None] + beta[None, :], t)
        return linalg.symmetrize(q @ (m * phi) @ q.T)
    if method == "quadrature":
        ata = params.ata

        def integrand(s: float) -> np.ndarray:
            e = linalg.mat_exp(params.b * s)
            return e @ ata @ e

        return linalg.symmetrize(_adaptive_simpson(integrand, 0.0, t, 1e-10))
    raise DomainError(f"unknown sigma_t method {method!r}")


def _adaptive_simpson(f, lo: float, hi: float, rel_tol: float) -> np.ndarray:
    """Adaptive Simpson rule for matrix-valued integrands."""
    if hi == lo:
        return f(lo) * 0.0

    def simpson(a, fa, b, fb):
        m = 0.5 * (a + b)
        fm = f(m)
        return m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb)

    def rec(a, fa, b, fb, whole, fm, m, depth):
        lm, flm, left = simpson(a, fa, m, fm)
        rm, frm, right = simpson(m, fm, b, fb)
        delta = left + right - whole
        scale = np.linalg.norm(left + right) + 1e-300
        if depth > 40 or np.linalg.norm(delta) <= 15.0 * rel_tol * scale:
            return left + right + delta / 15.0
        return rec(a, fa, m, fm, left, flm, lm, depth + 1) + rec(
            m, fm, b, fb, right, frm, rm, depth + 1
        )

    fa, fb = f(lo), f(hi)
    m, fm, whole = simpson(lo, fa, hi, fb)
    return rec(lo, fa, hi, fb, whole, fm, m, 0)


def endpoint_spec(params: WishartParams, t: float) -> NoncentralWishartSpec:
    """Distribution of X_t: (dof, scale, noncentrality mean).

    The noncentrality is stored mean-form as ``omega = e^{bt} x0 e^{bt}``;
    the conventional noncentrality matrix is ``sigma_t^{-1} omega`` (the
    ordering is immaterial under traces).
    """
    if t <= 0:
        raise DomainError(
            f"endpoint law requires t > 0 (t={t} is a point mass at x0)"
        )
    ebt = linalg.mat_exp(params.b * t)
    omega = linalg.symmetrize(ebt @ params.x0 @ ebt)
    return NoncentralWishartSpec(
        dof=float(params.alpha),
        scale=sigma_t(params, t),
        noncentrality_mean=omega,
    )
