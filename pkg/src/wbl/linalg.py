"""Dense symmetric-matrix primitives.

Everything in the package works with plain ``numpy.ndarray`` values; the
helpers here centralize symmetrization, eigendecomposition-based matrix
functions, cone-membership tests and commutation checks so that every module
applies the same tolerances.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError, NumericalError

# Eigenvalues above this (relative) threshold are rounding noise from
# simulation; anything below it is treated as a logic error.
PSD_CLIP_TOL = 1e-10
SPD_TOL = 1e-10
COMMUTE_TOL = 1e-10


def as_matrix(m, name: str = "matrix") -> np.ndarray:
    """Coerce to a square float64 matrix, rejecting non-finite entries."""
    a = np.asarray(m, dtype=float)
    if a.ndim == 0:
        a = a.reshape(1, 1)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError(f"{name} must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DomainError(f"{name} contains non-finite entries")
    return a


def symmetrize(m, name: str = "matrix") -> np.ndarray:
    """Return (M + M^T)/2.

    Euler steps and matrix products introduce 1e-15-scale asymmetry, so
    construction symmetrizes instead of rejecting.
    """
    a = as_matrix(m, name)
    return 0.5 * (a + a.T)


def sym_mat(m, name: str = "matrix", atol: float = 1e-12) -> np.ndarray:
    """Validated symmetric matrix: symmetrizes and rejects gross asymmetry."""
    a = as_matrix(m, name)
    scale = max(np.abs(a).max(), 1.0)
    if np.abs(a - a.T).max() > max(atol, 1e-8 * scale):
        raise DomainError(f"{name} is not symmetric within tolerance")
    return 0.5 * (a + a.T)


def eigen_sym(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a symmetric matrix.

    Returns (eigenvalues ascending, orthogonal eigenvector matrix) such that
    ``V @ diag(w) @ V.T`` reconstructs the input.
    """
    a = symmetrize(m)
    try:
        w, v = np.linalg.eigh(a)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        diag = f"trace={np.trace(a):.3e}, max|entry|={np.abs(a).max():.3e}"
        raise NumericalError(f"symmetric eigensolver failed ({diag})") from exc
    return w, v


def fun_sym(m, kind: str, power: float | None = None) -> np.ndarray:
    """Matrix function of a symmetric matrix through its eigendecomposition.

    ``kind`` is one of ``sqrt``, ``exp``, ``pow`` (with exponent ``power``)
    or ``abs``.  For ``sqrt`` and non-integer ``pow`` the input must be
    positive semi-definite: eigenvalues in ``(-tol, 0)`` are clipped to zero,
    anything more negative raises :class:`DomainError`.
    """
    w, v = eigen_sym(m)
    scale = max(np.abs(w).max(), 1.0)
    if kind in ("sqrt", "pow") and not (
        kind == "pow" and power is not None and float(power).is_integer()
    ):
        tol = PSD_CLIP_TOL * scale
        if w[0] < -tol:
            raise DomainError(
                f"matrix {kind} requires positive semi-definiteness; "
                f"smallest eigenvalue is {w[0]:.6e}"
            )
        w = np.maximum(w, 0.0)
    if kind == "sqrt":
        fw = np.sqrt(w)
    elif kind == "exp":
        fw = np.exp(w)
    elif kind == "abs":
        fw = np.abs(w)
    elif kind == "pow":
        if power is None:
            raise DomainError("kind='pow' requires the exponent argument")
        fw = np.power(w, power)
    else:
        raise DomainError(f"unknown matrix function kind {kind!r}")
    out = (v * fw) @ v.T
    return 0.5 * (out + out.T)


def mat_sqrt(m) -> np.ndarray:
    return fun_sym(m, "sqrt")


def mat_exp(m) -> np.ndarray:
    return fun_sym(m, "exp")


def cone_check(m, cone: str, tol: float | None = None) -> bool:
    """Membership test for the PSD / NSD / SPD cones.

    The tolerance is relative to the spectral radius; ``psd`` allows
    eigenvalues down to ``-tol*scale``, ``nsd`` up to ``+tol*scale`` and
    ``spd`` requires eigenvalues strictly above ``+tol*scale``.
    """
    w, _ = eigen_sym(m)
    scale = max(np.abs(w).max(), 1.0)
    if tol is None:
        tol = SPD_TOL if cone == "spd" else PSD_CLIP_TOL
    if cone == "psd":
        return bool(w[0] >= -tol * scale)
    if cone == "nsd":
        return bool(w[-1] <= tol * scale)
    if cone == "spd":
        return bool(w[0] > tol * scale)
    raise DomainError(f"unknown cone {cone!r}")


def is_spd(m, tol: float | None = None) -> bool:
    return cone_check(m, "spd", tol)


def require_spd(m, name: str = "matrix") -> np.ndarray:
    a = sym_mat(m, name)
    if not is_spd(a):
        raise DomainError(f"{name} must be symmetric positive definite")
    return a


def commutes(p, q, tol: float = COMMUTE_TOL) -> bool:
    """True iff ``||pq - qp||_F <= tol * (||p||_F ||q||_F + 1)``."""
    a = as_matrix(p, "p")
    b = as_matrix(q, "q")
    if a.shape != b.shape:
        raise DomainError(f"incompatible shapes {a.shape} and {b.shape}")
    resid = np.linalg.norm(a @ b - b @ a)
    return bool(resid <= tol * (np.linalg.norm(a) * np.linalg.norm(b) + 1.0))


def psd_part(m) -> np.ndarray:
    """Project onto the PSD cone by clipping negative eigenvalues at zero."""
    w, v = eigen_sym(m)
    if w[0] >= 0.0:
        return symmetrize(m)
    out = (v * np.maximum(w, 0.0)) @ v.T
    return 0.5 * (out + out.T)


def log_det_spd(m, name: str = "matrix") -> float:
    """log det of an SPD matrix via slogdet, with a definiteness check."""
    a = symmetrize(m, name)
    sign, ld = np.linalg.slogdet(a)
    if sign <= 0:
        raise DomainError(f"{name} is not positive definite (sign={sign})")
    return float(ld)


def solve_sym(a, b) -> np.ndarray:
    """Solve ``a @ x = b`` and symmetrize the result.

    Intended for products like ``(a^T a)^{-1} u`` inside commuting families,
    where the exact result is symmetric but floating point is not.
    """
    x = np.linalg.solve(as_matrix(a), as_matrix(b, "rhs"))
    return 0.5 * (x + x.T)
