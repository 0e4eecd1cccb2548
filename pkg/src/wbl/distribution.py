"""The noncentral Wishart distribution at a fixed time.

Provides exact sampling, the closed-form Laplace transform, and the
transition density through the multivariate gamma function and the
matrix-argument 0F1 series.

Sign convention.  The Laplace transform used throughout is

    E exp(-tr(u X)) = det(I + 2 S u)^{-dof/2} exp(-tr[u (I + 2 S u)^{-1} w])

for PSD ``u``, scale ``S`` and noncentrality mean ``w``; it equals 1 at
``u = 0`` and decays along PSD rays.  A variant with the opposite signs
(``I - 2 S u`` and a positive exponent) circulates in displayed formulas and
is kept behind ``variant='printed'`` purely so the verification harness can
demonstrate that it exceeds 1 and fails against sampling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from . import linalg
from .errors import DomainError, RegimeError
from .zonal import hyp0f1_eigenvalues

VARIANTS = ("derived", "printed")


def check_variant(variant: str) -> str:
    if variant not in VARIANTS:
        raise DomainError(f"variant must be one of {VARIANTS}, got {variant!r}")
    return variant


@dataclass(frozen=True)
class SeriesControl:
    """Truncation control for the zonal 0F1 series."""

    max_degree: int = 60
    rel_tol: float = 1e-10

    def __post_init__(self):
        if self.max_degree < 1:
            raise DomainError("max_degree must be >= 1")


DEFAULT_SERIES = SeriesControl()


@dataclass(frozen=True)
class NoncentralWishartSpec:
    """Endpoint law: degrees of freedom, SPD scale, PSD noncentrality mean."""

    dof: float
    scale: np.ndarray
    noncentrality_mean: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "scale", linalg.symmetrize(self.scale, "scale"))
        object.__setattr__(
            self,
            "noncentrality_mean",
            linalg.symmetrize(self.noncentrality_mean, "noncentrality_mean"),
        )
        if self.noncentrality_mean.shape != self.scale.shape:
            raise DomainError("scale and noncentrality_mean shapes differ")
        self.scale.setflags(write=False)
        self.noncentrality_mean.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.scale.shape[0]

    def mean(self) -> np.ndarray:
        """E[X] = dof * scale + noncentrality mean."""
        return self.dof * self.scale + self.noncentrality_mean


def log_mvgamma(n: int, z: float) -> float:
    """log Gamma_n(z) = (n(n-1)/4) log pi + sum_i log Gamma(z - (i-1)/2)."""
    if n < 1:
        raise DomainError(f"dimension must be >= 1, got {n}")
    if z <= 0.5 * (n - 1):
        raise DomainError(
            f"multivariate gamma pole: need z > (n-1)/2 = {0.5*(n-1)}, got {z}"
        )
    args = z - 0.5 * np.arange(n)
    return float(0.25 * n * (n - 1) * np.log(np.pi) + gammaln(args).sum())


def mvgamma(n: int, z: float) -> float:
    return float(np.exp(log_mvgamma(n, z)))


def hyp0f1_matrix(
    b: float, m, ctrl: SeriesControl = DEFAULT_SERIES
) -> tuple[float, float]:
    """0F1(b; m) for symmetric PSD ``m``; returns (value, truncation estimate)."""
    w, _ = linalg.eigen_sym(m)
    return hyp0f1_eigenvalues(b, w, ctrl.max_degree, ctrl.rel_tol)


def _hyp0f1_argument_eigs(spec: NoncentralWishartSpec, y: np.ndarray) -> np.ndarray:
    """Eigenvalues of (1/4) S^{-1} w S^{-1} y, computed from the similar
    symmetric PSD matrix (1/4) y^{1/2} S^{-1} w S^{-1} y^{1/2}."""
    sqrt_y = linalg.mat_sqrt(y)
    inner = np.linalg.solve(spec.scale, spec.noncentrality_mean)
    inner = np.linalg.solve(spec.scale.T, inner.T).T  # S^{-1} w S^{-1}
    sym = linalg.symmetrize(0.25 * sqrt_y @ inner @ sqrt_y)
    w, _ = linalg.eigen_sym(sym)
    return np.maximum(w, 0.0)


def log_density(
    spec: NoncentralWishartSpec, y, ctrl: SeriesControl = DEFAULT_SERIES
) -> float:
    """Log of the noncentral Wishart density at SPD ``y``.

    log p(y) = -(dof/2) log det S + ((dof-n-1)/2) log det y
               - tr(S^{-1}(y + w))/2 - (n dof/2) log 2 - log Gamma_n(dof/2)
               + log 0F1(dof/2; S^{-1} w S^{-1} y / 4)
    """
    n = spec.dim
    if spec.dof <= n - 1:
        raise DomainError(f"density requires dof > n-1, got dof={spec.dof}")
    y = linalg.sym_mat(y, "y")
    if y.shape != spec.scale.shape:
        raise DomainError(
            f"density argument y has shape {y.shape}, expected {spec.scale.shape}"
        )
    if not linalg.cone_check(y, "spd"):
        raise DomainError("density argument y must be positive definite")
    log_det_scale = linalg.log_det_spd(spec.scale, "scale")
    log_det_y = linalg.log_det_spd(y, "y")
    tr_term = float(np.trace(np.linalg.solve(spec.scale, y + spec.noncentrality_mean)))
    f01, _ = hyp0f1_eigenvalues(
        0.5 * spec.dof, _hyp0f1_argument_eigs(spec, y), ctrl.max_degree, ctrl.rel_tol
    )
    return (
        -0.5 * spec.dof * log_det_scale
        + 0.5 * (spec.dof - n - 1) * log_det_y
        - 0.5 * tr_term
        - 0.5 * n * spec.dof * np.log(2.0)
        - log_mvgamma(n, 0.5 * spec.dof)
        + np.log(f01)
    )


def density(spec: NoncentralWishartSpec, y, ctrl: SeriesControl = DEFAULT_SERIES) -> float:
    return float(np.exp(log_density(spec, y, ctrl)))


def laplace(spec: NoncentralWishartSpec, u, variant: str = "derived") -> float:
    """Laplace transform E exp(-tr(u X)) at PSD ``u``.

    ``variant='derived'`` is the convention documented in the module
    docstring; ``variant='printed'`` evaluates the sign-flipped display
    (which is not a Laplace transform: it exceeds 1 off the origin) so the
    harness can record its failure.
    """
    check_variant(variant)
    u = linalg.sym_mat(u, "u")
    if u.shape != spec.scale.shape:
        raise DomainError(
            f"transform argument u has shape {u.shape}, expected {spec.scale.shape}"
        )
    if not linalg.cone_check(u, "psd"):
        raise DomainError("transform argument u must be positive semi-definite")
    n = spec.dim
    sign = 1.0 if variant == "derived" else -1.0
    m = np.eye(n) + sign * 2.0 * spec.scale @ u
    det_sign, log_det = np.linalg.slogdet(m)
    if det_sign <= 0:
        raise DomainError(
            "matrix I %s 2 S u is singular or negative definite"
            % ("+" if sign > 0 else "-")
        )
    inner = np.linalg.solve(m, spec.noncentrality_mean @ u)
    return float(np.exp(-0.5 * spec.dof * log_det - sign * np.trace(inner)))


def _noncentral_factor(spec: NoncentralWishartSpec, rows: int) -> np.ndarray:
    """Matrix M with M^T M = noncentrality mean, padded to ``rows`` rows."""
    w, v = linalg.eigen_sym(spec.noncentrality_mean)
    w = np.maximum(w, 0.0)
    m = np.zeros((rows, spec.dim))
    m[: spec.dim] = np.sqrt(w)[:, None] * v.T
    return m


def _chol_scale(spec: NoncentralWishartSpec) -> np.ndarray:
    try:
        return np.linalg.cholesky(spec.scale)
    except np.linalg.LinAlgError as exc:
        raise DomainError("scale matrix is not positive definite") from exc


def _bartlett_lower(dim: int, dof: float, size: int, rng) -> np.ndarray:
    """Batch of lower-triangular Bartlett factors A with A A^T ~ W(dof, I)."""
    a = np.zeros((size, dim, dim))
    ii, jj = np.tril_indices(dim, k=-1)
    if ii.size:
        a[:, ii, jj] = rng.standard_normal((size, ii.size))
    for i in range(dim):
        a[:, i, i] = np.sqrt(rng.chisquare(dof - i, size=size))
    return a


def sample_batch(spec: NoncentralWishartSpec, size: int, rng) -> np.ndarray:
    """Exact draws, shape (size, n, n).

    Integer dof: Gram construction (M + G)^T (M + G) with M^T M equal to the
    noncentrality mean and G rows N(0, scale).  Non-integer dof >= 2n-1:
    independent sum of a central Bartlett draw with dof - n degrees of
    freedom and an n-degree noncentral Gram part carrying the mean.
    """
    n = spec.dim
    chol = _chol_scale(spec)
    dof = spec.dof

    def gram(rows: int, mean_rows: np.ndarray) -> np.ndarray:
        g = rng.standard_normal((size, rows, n)) @ chol.T
        ymat = mean_rows[None] + g
        return np.einsum("bri,brj->bij", ymat, ymat)

    if abs(dof - round(dof)) < 1e-9 and round(dof) >= n:
        return gram(int(round(dof)), _noncentral_factor(spec, int(round(dof))))
    if dof >= 2 * n - 1:
        central_dof = dof - n
        a = _bartlett_lower(n, central_dof, size, rng)
        la = np.einsum("ij,bjk->bik", chol, a)
        central = np.einsum("bik,bjk->bij", la, la)
        return central + gram(n, _noncentral_factor(spec, n))
    raise RegimeError(
        f"exact sampling supports integer dof or dof >= 2n-1 = {2*n-1}; "
        f"got dof={dof}.  Use path simulation for this regime."
    )


def sample(spec: NoncentralWishartSpec, rng) -> np.ndarray:
    """One exact draw (PSD by construction)."""
    return sample_batch(spec, 1, rng)[0]
