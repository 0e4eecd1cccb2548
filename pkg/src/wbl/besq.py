"""Scalar (n = 1) closed forms via modified Bessel functions.

For the one-dimensional law ``dX = 2 sqrt(X) dW + (2 b X + dim) dt`` with
``b <= 0`` these are the classical squared-Bessel / CIR formulas.  They are
the independent oracles against which every matrix-valued transform is
checked in the ``n = 1`` reduction: no code is shared with the
matrix-argument series machinery.

All expectations below are over the bridge from ``x`` to ``y`` on ``[0, t]``:

* ``bridge_integrated_lt``: E exp(-(gamma^2/2) int_0^t X_s ds)
* ``hartman_watson_lt``:    E exp(-(lam^2/2) int_0^t ds / X_s)
* ``joint_lt``:             both factors at once

with ``mu = dim/2 - 1`` the Bessel index of the law.
"""

from __future__ import annotations

import numpy as np
from scipy.special import ive

from .errors import DomainError


def _log_iv(order: float, z: float) -> float:
    """log I_order(z) for z >= 0 via the exponentially scaled Bessel."""
    if z < 0:
        raise DomainError(f"Bessel argument must be nonnegative, got {z}")
    val = ive(order, z)
    if not np.isfinite(val) or val <= 0.0:
        raise DomainError(f"I_{order}({z}) underflowed or is undefined")
    return float(np.log(val) + z)


def _check_dim(dim: float) -> float:
    mu = 0.5 * dim - 1.0
    if mu < -1.0:
        raise DomainError(f"Bessel index mu = dim/2 - 1 = {mu} is below -1")
    return mu


def _scale_and_shift(x: float, t: float, drift: float) -> tuple[float, float]:
    """Endpoint scale sigma_t and shifted start omega under drift ``b``."""
    if drift == 0.0:
        return t, x
    return float(np.expm1(2.0 * drift * t) / (2.0 * drift)), float(
        np.exp(2.0 * drift * t) * x
    )


def log_density(x: float, y: float, t: float, dim: float, drift: float = 0.0) -> float:
    """Log transition density: (1/(2s)) (y/w)^{mu/2} e^{-(y+w)/(2s)} I_mu(sqrt(wy)/s)
    with s, w the drift-adjusted scale and start."""
    mu = _check_dim(dim)
    if min(x, y, t) <= 0:
        raise DomainError("x, y, t must be positive")
    s, w = _scale_and_shift(x, t, drift)
    z = np.sqrt(w * y) / s
    return (
        -np.log(2.0 * s)
        + 0.5 * mu * (np.log(y) - np.log(w))
        - (y + w) / (2.0 * s)
        + _log_iv(mu, z)
    )


def density(x: float, y: float, t: float, dim: float, drift: float = 0.0) -> float:
    return float(np.exp(log_density(x, y, t, dim, drift)))


def bridge_integrated_lt(
    x: float, y: float, t: float, dim: float, gamma: float, drift: float = 0.0
) -> float:
    """Bridge expectation of exp(-(gamma^2/2) int_0^t X_s ds).

    At zero drift the classical closed form is used:

        (g t / sinh(g t)) exp(((x+y)/2t)(1 - g t coth(g t)))
            I_mu(g sqrt(xy)/sinh(g t)) / I_mu(sqrt(xy)/t)

    (checked in the tests against quadrature of the unconditional
    transform).  With drift the density-ratio representation is used with
    the admissible shift ``delta = -b - sqrt(b^2 + gamma^2)``.
    """
    mu = _check_dim(dim)
    gamma = abs(float(gamma))
    if gamma == 0.0:
        return 1.0
    if drift == 0.0:
        g_t = gamma * t
        z_num = gamma * np.sqrt(x * y) / np.sinh(g_t)
        z_den = np.sqrt(x * y) / t
        log_val = (
            np.log(g_t / np.sinh(g_t))
            + ((x + y) / (2.0 * t)) * (1.0 - g_t / np.tanh(g_t))
            + _log_iv(mu, z_num)
            - _log_iv(mu, z_den)
        )
        return float(np.exp(log_val))
    delta = -drift - float(np.hypot(drift, gamma))
    log_ratio = log_density(x, y, t, dim, drift + delta) - log_density(
        x, y, t, dim, drift
    )
    return float(np.exp(log_ratio - 0.5 * delta * (y - x - dim * t)))


def hartman_watson_lt(
    x: float, y: float, t: float, dim: float, lam: float, drift: float = 0.0
) -> float:
    """Bridge expectation of exp(-(lam^2/2) int_0^t ds/X_s):
    the Bessel-index shift mu -> sqrt(mu^2 + lam^2),

        I_{sqrt(mu^2+lam^2)}(z) / I_mu(z),  z = sqrt(w y)/s.
    """
    mu = _check_dim(dim)
    if mu < 0:
        raise DomainError("Hartman-Watson reduction requires dim >= 2")
    if lam == 0.0:
        return 1.0
    s, w = _scale_and_shift(x, t, drift)
    z = np.sqrt(w * y) / s
    shifted = float(np.hypot(mu, lam))
    return float(np.exp(_log_iv(shifted, z) - _log_iv(mu, z)))


def joint_lt(
    x: float,
    y: float,
    t: float,
    dim: float,
    gamma: float,
    lam: float,
    drift: float = 0.0,
) -> float:
    """Bridge expectation of exp(-(gamma^2/2) int X - (lam^2/2) int 1/X).

    Composition of the index shift and the integrated transform: the
    inverse-integral factor moves the Bessel index to
    ``mu' = sqrt(mu^2 + lam^2)`` and the quadratic factor is then evaluated
    at dimension ``2(mu' + 1)``.
    """
    mu = _check_dim(dim)
    if lam == 0.0:
        return bridge_integrated_lt(x, y, t, dim, gamma, drift)
    shifted_dim = 2.0 * (float(np.hypot(mu, lam)) + 1.0)
    hw = hartman_watson_lt(x, y, t, dim, lam, drift)
    quad = bridge_integrated_lt(x, y, t, shifted_dim, gamma, drift)
    return hw * quad


def besq_oracle(kind: str, **kwargs) -> float:
    """Dispatch by kind: 'density', 'bridge_integrated', 'hartman_watson'
    or 'joint'.  Keyword arguments are passed to the matching function."""
    table = {
        "density": density,
        "bridge_integrated": bridge_integrated_lt,
        "hartman_watson": hartman_watson_lt,
        "joint": joint_lt,
    }
    if kind not in table:
        raise DomainError(f"unknown oracle kind {kind!r}; choose from {sorted(table)}")
    return table[kind](**kwargs)
