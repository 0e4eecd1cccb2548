"""Euler path simulation on the positive semi-definite cone.

The scheme is full truncation: after every Euler update the state is
projected onto the PSD cone (eigenvalues clipped at zero) and the projected
state feeds both the drift and the diffusion coefficient of the next step.
Alongside the states, two path functionals are accumulated by the trapezoid
rule on the grid:

    int_x      = int_0^t X_s ds                     (matrix)
    int_tr_inv = int_0^t tr(a^T a X_s^{-1}) ds      (scalar)

Inverse accumulation floors eigenvalues at 1e-12 * trace and flags the path
when the floor binds; flagged paths are excluded from inverse-functional
estimates by the harness and counted in reports.

Randomness: path ``i`` draws from its own counter-based stream with key
``base_seed XOR i`` (Philox), so any partition of the index range across
workers sees identical increments and a fixed partition reproduces bit
identical results.  In antithetic mode paths ``2i`` and ``2i+1`` share the
stream of pair ``i`` with opposite increment signs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import DomainError, SingularPathError
from .model import WishartParams

_MASK64 = (1 << 64) - 1
_FLOOR_REL = 1e-12


@dataclass(frozen=True)
class SimConfig:
    """Discretization controls for a single simulated path."""

    steps: int
    scheme: str = "euler_full_truncation"
    seed: int = 0
    store_increments: bool = False

    def __post_init__(self):
        if self.steps < 1:
            raise DomainError(f"steps must be >= 1, got {self.steps}")
        if self.scheme != "euler_full_truncation":
            raise DomainError(f"unknown scheme {self.scheme!r}")


@dataclass
class PathSample:
    """A discretized trajectory with accumulated functionals."""

    times: np.ndarray
    states: np.ndarray  # (steps+1, n, n), PSD after projection
    int_x: np.ndarray
    int_tr_inv: float
    increments: np.ndarray | None
    projection_count: int
    min_eig_seen: float
    floored: bool

    @property
    def terminal(self) -> np.ndarray:
        return self.states[-1]


@dataclass
class TerminalBatch:
    """Terminal states and functionals for a batch of paths."""

    x_t: np.ndarray  # (B, n, n)
    int_x: np.ndarray  # (B, n, n)
    int_tr_inv: np.ndarray  # (B,)
    projections: np.ndarray  # (B,) per-path count of clipped steps
    floored: np.ndarray  # (B,) bool
    min_eig: np.ndarray  # (B,) smallest pre-projection eigenvalue seen

    def __len__(self) -> int:
        return self.x_t.shape[0]


def stream_key(base_seed: int, path_index: int) -> int:
    return (int(base_seed) & _MASK64) ^ int(path_index)


def path_rng(base_seed: int, path_index: int) -> np.random.Generator:
    """Counter-based stream for one path (splittable, order-independent)."""
    return np.random.Generator(np.random.Philox(key=stream_key(base_seed, path_index)))


# ---------------------------------------------------------------------------
# spectral kernels: clip to the cone, matrix square root, floored tr(C X^-1)


def _stats_n1(x, ata):
    v = x[:, 0, 0]
    min_eig = v.copy()
    clipped = np.maximum(v, 0.0)
    floor = np.maximum(_FLOOR_REL * clipped, 1e-300)
    floored = clipped < np.maximum(_FLOOR_REL * clipped, 1e-250)
    trinv = ata[0, 0] / np.maximum(clipped, floor)
    out = clipped[:, None, None]
    return out, np.sqrt(out), min_eig, trinv, floored


def _stats_n2(x, ata):
    p = x[:, 0, 0]
    q = x[:, 0, 1]
    r = x[:, 1, 1]
    half_diff = 0.5 * (p - r)
    mean = 0.5 * (p + r)
    s = np.sqrt(half_diff * half_diff + q * q)
    lmin = mean - s
    lmax = mean + s
    min_eig = lmin.copy()

    neg = lmin < 0.0
    if np.any(neg):
        lm, lx = lmin[neg], lmax[neg]
        pp, qq, rr = p[neg], q[neg], r[neg]
        den = lm - lx  # < 0 on this branch
        proj_xx = (pp - lx) / den
        proj_xy = qq / den
        proj_yy = (rr - lx) / den
        dead = lx <= 0.0  # both eigenvalues nonpositive: project to zero
        p = p.copy(); q = q.copy(); r = r.copy()
        p[neg] = np.where(dead, 0.0, pp - lm * proj_xx)
        q[neg] = np.where(dead, 0.0, qq - lm * proj_xy)
        r[neg] = np.where(dead, 0.0, rr - lm * proj_yy)
        lmin = np.maximum(lmin, 0.0)
        lmax = np.maximum(lmax, 0.0)

    trace = p + r
    det = lmin * lmax
    sqrt_det = np.sqrt(det)
    denom = np.sqrt(trace + 2.0 * sqrt_det)
    dead = denom < 1e-150
    denom = np.where(dead, 1.0, denom)
    s_xx = np.where(dead, 0.0, (p + sqrt_det) / denom)
    s_xy = np.where(dead, 0.0, q / denom)
    s_yy = np.where(dead, 0.0, (r + sqrt_det) / denom)

    floor = np.maximum(_FLOOR_REL * trace, 1e-300)
    floored = lmin < floor
    bump = np.where(floored, floor - np.minimum(lmin, floor), 0.0)
    pf = p + bump
    rf = r + bump
    det_f = pf * rf - q * q
    with np.errstate(divide="ignore", invalid="ignore"):
        trinv = (ata[0, 0] * rf - 2.0 * ata[0, 1] * q + ata[1, 1] * pf) / det_f
    trinv = np.where(det_f > 0.0, trinv, np.inf)

    out = np.empty_like(x)
    out[:, 0, 0] = p
    out[:, 0, 1] = q
    out[:, 1, 0] = q
    out[:, 1, 1] = r
    sq = np.empty_like(x)
    sq[:, 0, 0] = s_xx
    sq[:, 0, 1] = s_xy
    sq[:, 1, 0] = s_xy
    sq[:, 1, 1] = s_yy
    return out, sq, min_eig, trinv, floored


def _stats_general(x, ata):
    w, v = np.linalg.eigh(x)
    min_eig = w[:, 0].copy()
    wc = np.maximum(w, 0.0)
    out = np.einsum("bik,bk,bjk->bij", v, wc, v)
    sq = np.einsum("bik,bk,bjk->bij", v, np.sqrt(wc), v)
    trace = wc.sum(axis=1)
    floor = np.maximum(_FLOOR_REL * trace, 1e-300)
    floored = wc[:, 0] < floor
    wf = np.maximum(wc, floor[:, None])
    # tr(C X^-1) = sum_k (v_k^T C v_k) / lambda_k
    quad = np.einsum("bik,ij,bjk->bk", v, ata, v)
    trinv = (quad / wf).sum(axis=1)
    return out, sq, min_eig, trinv, floored


def _spectral_stats(x, ata):
    n = x.shape[-1]
    if n == 1:
        return _stats_n1(x, ata)
    if n == 2:
        return _stats_n2(x, ata)
    return _stats_general(x, ata)


# ---------------------------------------------------------------------------
# stepping


def euler_step(x, params: WishartParams, dt: float, dw) -> np.ndarray:
    """One full-truncation Euler step from PSD ``x`` with raw increment ``dw``
    (entries N(0, dt)).  Returns the projected (PSD) next state."""
    if dt <= 0:
        raise DomainError(f"dt must be positive, got {dt}")
    x = np.asarray(x, dtype=float)[None]
    dw = np.asarray(dw, dtype=float)[None]
    ata = params.ata
    xc, sq, _, _, _ = _spectral_stats(x, ata)
    new = _raw_step(xc, sq, dw, params, dt, ata)
    clipped, _, _, _, _ = _spectral_stats(new, ata)
    return clipped[0]


def _raw_step(xc, sq, dw, params, dt, ata):
    noise = (sq @ dw) @ params.a
    bx = params.b @ xc
    out = xc + noise + noise.swapaxes(-1, -2) + (bx + bx.swapaxes(-1, -2) + params.alpha * ata) * dt
    return out


def _run_block(params, t, steps, dw_block, record=False):
    """Advance a block of paths; ``dw_block`` has shape (B, steps, n, n)."""
    b_size = dw_block.shape[0]
    n = params.n
    dt = t / steps
    ata = params.ata
    x0 = np.broadcast_to(params.x0, (b_size, n, n)).copy()
    xc, sq, min_eig, trinv, fl = _spectral_stats(x0, ata)
    int_x = np.zeros((b_size, n, n))
    int_trinv = np.zeros(b_size)
    projections = np.zeros(b_size, dtype=np.int64)
    floored = fl.copy()
    min_seen = min_eig.copy()
    states = [xc.copy()] if record else None
    half_dt = 0.5 * dt
    for k in range(steps):
        new = _raw_step(xc, sq, dw_block[:, k], params, dt, ata)
        new, sq_new, me, trinv_new, fl = _spectral_stats(new, ata)
        projections += me < 0.0
        np.minimum(min_seen, me, out=min_seen)
        floored |= fl
        int_x += (xc + new) * half_dt
        int_trinv += (trinv + trinv_new) * half_dt
        xc, sq, trinv = new, sq_new, trinv_new
        if record:
            states.append(xc.copy())
    return xc, int_x, int_trinv, projections, floored, min_seen, states


def simulate_path(
    params: WishartParams, t: float, cfg: SimConfig, rng=None
) -> PathSample:
    """Simulate one path on a uniform grid of ``cfg.steps`` steps.

    Deterministic given ``(cfg.seed, params, t, cfg)``: the increments come
    from the stream with key ``cfg.seed`` (path index 0).
    """
    if t <= 0:
        raise DomainError(f"horizon must be positive, got {t}")
    if rng is None:
        rng = path_rng(cfg.seed, 0)
    dt = t / cfg.steps
    dw = rng.standard_normal((1, cfg.steps, params.n, params.n)) * np.sqrt(dt)
    return _finish_path(params, t, cfg.steps, dw, cfg.store_increments)


def simulate_path_from_increments(params: WishartParams, t: float, dw) -> PathSample:
    """Deterministic path from explicit raw increments (steps, n, n).

    Used to couple discretizations: summing consecutive fine-grid increments
    yields the coarse-grid increments of the same underlying noise.
    """
    dw = np.asarray(dw, dtype=float)
    if dw.ndim != 3 or dw.shape[1:] != (params.n, params.n):
        raise DomainError(f"increments must have shape (steps, n, n), got {dw.shape}")
    return _finish_path(params, t, dw.shape[0], dw[None], True)


def _finish_path(params, t, steps, dw, keep_increments) -> PathSample:
    x_t, int_x, int_trinv, projections, floored, min_seen, states = _run_block(
        params, t, steps, dw, record=True
    )
    return PathSample(
        times=np.linspace(0.0, t, steps + 1),
        states=np.concatenate([s[None, 0] for s in states], axis=0),
        int_x=linalg.symmetrize(int_x[0]),
        int_tr_inv=float(int_trinv[0]),
        increments=dw[0].copy() if keep_increments else None,
        projection_count=int(projections[0]),
        min_eig_seen=float(min_seen[0]),
        floored=bool(floored[0]),
    )


def simulate_terminal_batch(
    params: WishartParams,
    t: float,
    steps: int,
    base_seed: int,
    start: int,
    count: int,
    antithetic: bool = False,
    chunk: int = 8192,
) -> TerminalBatch:
    """Terminal states and functionals for paths ``start .. start+count-1``.

    Only O(count) memory is used: increments are generated and consumed in
    chunks, states are never stored.
    """
    if t <= 0:
        raise DomainError(f"horizon must be positive, got {t}")
    n = params.n
    sqrt_dt = np.sqrt(t / steps)
    outs = {
        "x_t": np.empty((count, n, n)),
        "int_x": np.empty((count, n, n)),
        "int_tr_inv": np.empty(count),
        "projections": np.empty(count, dtype=np.int64),
        "floored": np.empty(count, dtype=bool),
        "min_eig": np.empty(count),
    }
    for lo in range(0, count, chunk):
        hi = min(lo + chunk, count)
        idx = np.arange(start + lo, start + hi)
        dw = np.empty((hi - lo, steps, n, n))
        for row, i in enumerate(idx):
            if antithetic:
                g = path_rng(base_seed, i >> 1)
                block = g.standard_normal((steps, n, n))
                dw[row] = block if (i & 1) == 0 else -block
            else:
                dw[row] = path_rng(base_seed, i).standard_normal((steps, n, n))
        dw *= sqrt_dt
        x_t, int_x, int_trinv, proj, fl, mn, _ = _run_block(
            params, t, steps, dw, record=False
        )
        outs["x_t"][lo:hi] = x_t
        outs["int_x"][lo:hi] = int_x
        outs["int_tr_inv"][lo:hi] = int_trinv
        outs["projections"][lo:hi] = proj
        outs["floored"][lo:hi] = fl
        outs["min_eig"][lo:hi] = mn
    return TerminalBatch(
        x_t=outs["x_t"],
        int_x=outs["int_x"],
        int_tr_inv=outs["int_tr_inv"],
        projections=outs["projections"],
        floored=outs["floored"],
        min_eig=outs["min_eig"],
    )


def logdet_residual(path: PathSample, params: WishartParams) -> float:
    """Discretization residual of the log-determinant identity.

    Compares ``ln det X_t - ln det X_0`` against the discretized drift
    integral ``int (alpha-n-1) tr(a^T a X^{-1}) + 2 tr(b) ds`` (trapezoid)
    plus the Ito sum ``sum_k 2 tr(sqrt(X_k^{-1}) dW_k a)`` (left endpoint).
    Returns the absolute residual; the path must be SPD throughout and must
    carry its increments.
    """
    if path.increments is None:
        raise DomainError("logdet_residual needs a path stored with increments")
    states = path.states
    n = params.n
    k_steps = states.shape[0] - 1
    dt = path.times[1] - path.times[0]
    ata = params.ata
    tr_b2 = 2.0 * float(np.trace(params.b))

    trinv = np.empty(k_steps + 1)
    log_dets = np.empty(k_steps + 1)
    inv_sqrts = np.empty_like(states)
    for i, x in enumerate(states):
        w, v = np.linalg.eigh(x)
        if w[0] <= _FLOOR_REL * max(w.sum(), 1e-300):
            raise SingularPathError(
                f"state {i} is numerically singular (min eigenvalue {w[0]:.3e})",
                step_index=i,
            )
        log_dets[i] = np.log(w).sum()
        trinv[i] = float(np.einsum("ik,ij,jk,k->", v, ata, v, 1.0 / w))
        inv_sqrts[i] = (v / np.sqrt(w)) @ v.T

    lhs = log_dets[-1] - log_dets[0]
    drift_vals = (params.alpha - n - 1) * trinv + tr_b2
    drift = float(np.trapezoid(drift_vals, dx=dt))
    stoch = 2.0 * float(
        np.einsum("kij,kjl,li->", inv_sqrts[:-1], path.increments, params.a)
    )
    return abs(lhs - (drift + stoch))
