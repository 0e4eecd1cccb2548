"""Path simulation on the PSD cone."""

import numpy as np
import pytest

from wbl.distribution import laplace
from wbl.errors import DomainError, SingularPathError
from wbl.model import WishartParams, endpoint_spec
from wbl.sim import (
    SimConfig,
    euler_step,
    logdet_residual,
    path_rng,
    simulate_path,
    simulate_path_from_increments,
    simulate_terminal_batch,
)


def params(n=2, alpha=3.0, b=0.0, a=None):
    return WishartParams(
        n=n,
        alpha=alpha,
        a=np.eye(n) if a is None else a,
        b=b * np.eye(n),
        x0=np.eye(n),
    )


class TestEulerStep:
    def test_pure_drift(self):
        p = params(alpha=3.0)
        out = euler_step(np.eye(2), p, 0.01, np.zeros((2, 2)))
        np.testing.assert_allclose(out, np.eye(2) + 0.03 * np.eye(2), rtol=1e-14)

    def test_small_noise_drift_formula(self):
        # a = eps I, b = -I: one step ~ x - 2 x dt + alpha eps^2 dt
        eps, dt, alpha = 1e-3, 0.01, 3.0
        p = params(alpha=alpha, b=-1.0, a=eps * np.eye(2))
        out = euler_step(np.eye(2), p, dt, np.zeros((2, 2)))
        expected = np.eye(2) * (1.0 - 2.0 * dt + alpha * eps**2 * dt)
        np.testing.assert_allclose(out, expected, rtol=1e-12)

    def test_one_step_distributional_mean(self):
        """Mean after one step matches the drift prediction."""
        p = params(alpha=3.0, b=-0.5)
        dt = 0.05
        rng = np.random.default_rng(3)
        total = np.zeros((2, 2))
        n_draws = 100_000
        draws = rng.standard_normal((n_draws, 2, 2)) * np.sqrt(dt)
        for dw in draws:
            total += euler_step(np.eye(2), p, dt, dw)
        mean = total / n_draws
        predicted = np.eye(2) + (-np.eye(2) + 3.0 * np.eye(2)) * dt
        assert np.abs(mean - predicted).max() < 3 * np.sqrt(dt / n_draws) * 3

    def test_invalid_dt(self):
        with pytest.raises(DomainError):
            euler_step(np.eye(2), params(), 0.0, np.zeros((2, 2)))


class TestSimulatePath:
    def test_zero_time_limit(self):
        p = params()
        out = simulate_path(p, 1e-8, SimConfig(steps=1, seed=1))
        assert np.abs(out.states[-1] - np.eye(2)).max() < 1e-3
        assert np.abs(out.int_x - 1e-8 * np.eye(2)).max() < 1e-11

    def test_deterministic_given_seed(self):
        p = params()
        cfg = SimConfig(steps=40, seed=42, store_increments=True)
        s1 = simulate_path(p, 1.0, cfg)
        s2 = simulate_path(p, 1.0, cfg)
        assert np.array_equal(s1.states, s2.states)
        assert np.array_equal(s1.increments, s2.increments)
        assert s1.int_tr_inv == s2.int_tr_inv

    def test_states_stay_psd(self):
        p = params(alpha=3.0)
        out = simulate_path(p, 1.0, SimConfig(steps=200, seed=7))
        for state in out.states:
            assert np.linalg.eigvalsh(state).min() >= 0.0

    def test_endpoint_mean(self):
        """n=2, alpha=3, a=I, b=0, x=I, t=1: E[X_1] = 4 I."""
        p = params(alpha=3.0)
        batch = simulate_terminal_batch(p, 1.0, 200, 11, 0, 20_000)
        emp = batch.x_t.mean(axis=0)
        se = batch.x_t.std(axis=0) / np.sqrt(len(batch))
        assert np.all(np.abs(emp - 4.0 * np.eye(2)) < 3 * se)

    def test_empirical_laplace_vs_closed_form(self):
        p = params(alpha=3.0, b=-0.5)
        batch = simulate_terminal_batch(p, 1.0, 400, 13, 0, 20_000)
        spec = endpoint_spec(p, 1.0)
        for c in (0.1, 0.3):
            u = c * np.eye(2)
            vals = np.exp(-np.einsum("ij,bji->b", u, batch.x_t))
            m, se = vals.mean(), vals.std(ddof=1) / np.sqrt(len(vals))
            assert abs(m - laplace(spec, u)) < 3 * se

    def test_batch_matches_single_paths(self):
        p = params(alpha=4.0, b=-0.5)
        batch = simulate_terminal_batch(p, 1.0, 60, 21, 0, 4)
        for i in range(4):
            single = simulate_path(p, 1.0, SimConfig(steps=60, seed=0), rng=path_rng(21, i))
            assert np.array_equal(single.terminal, batch.x_t[i])
            np.testing.assert_allclose(single.int_x, batch.int_x[i], atol=0, rtol=0)
            assert single.int_tr_inv == batch.int_tr_inv[i]

    def test_antithetic_pairing(self):
        p = params(alpha=4.0)
        batch = simulate_terminal_batch(p, 1.0, 40, 31, 0, 4, antithetic=True)
        # paths 0 and 1 share a stream with opposite signs: their increments
        # differ, so terminal states differ, but pair means are unbiased
        assert not np.array_equal(batch.x_t[0], batch.x_t[1])
        # deterministic regardless of batch composition
        again = simulate_terminal_batch(p, 1.0, 40, 31, 2, 2, antithetic=True)
        assert np.array_equal(batch.x_t[2:], again.x_t)

    def test_invalid_horizon(self):
        with pytest.raises(DomainError):
            simulate_path(params(), 0.0, SimConfig(steps=10, seed=0))

    def test_projection_fraction_vanishes_with_steps(self):
        """n=2, alpha=4, a=I, b=-I/2, x=I, t=1: the fraction of paths ever
        projected decreases with the step count (the discrete chain crosses
        the boundary even though the continuous process never does) and is
        below 5% by 1600 steps.  Measured: 12.6% / 8.6% / 6.2% / 4.9% at
        200 / 400 / 800 / 1600 steps."""
        p = params(alpha=4.0, b=-0.5)
        fractions = []
        for steps in (200, 400, 1600):
            batch = simulate_terminal_batch(p, 1.0, steps, 41, 0, 4000)
            fractions.append((batch.projections > 0).mean())
        assert fractions[0] > fractions[1] > fractions[2]
        assert fractions[2] < 0.05


class TestIncrements:
    def test_explicit_increments_are_reproducible(self):
        p = params(alpha=4.0)
        rng = path_rng(5, 0)
        dw = rng.standard_normal((30, 2, 2)) * np.sqrt(1.0 / 30)
        s1 = simulate_path_from_increments(p, 1.0, dw)
        s2 = simulate_path_from_increments(p, 1.0, dw)
        assert np.array_equal(s1.states, s2.states)
        assert np.array_equal(s1.increments, dw)

    def test_coarsened_increments_couple_paths(self):
        p = params(alpha=4.0, b=-0.5)
        rng = path_rng(6, 0)
        fine = rng.standard_normal((200, 2, 2)) * np.sqrt(1.0 / 200)
        coarse = fine.reshape(100, 2, 2, 2).sum(axis=1)
        s_fine = simulate_path_from_increments(p, 1.0, fine)
        s_coarse = simulate_path_from_increments(p, 1.0, coarse)
        # same underlying noise: moderate strong-error distance, not independence
        assert np.abs(s_fine.terminal - s_coarse.terminal).max() < 1.0

    def test_shape_validation(self):
        with pytest.raises(DomainError, match="shape"):
            simulate_path_from_increments(params(), 1.0, np.zeros((10, 3, 3)))


class TestLogDetResidual:
    def test_requires_increments(self):
        p = params(alpha=4.0)
        path = simulate_path(p, 1.0, SimConfig(steps=20, seed=3))
        with pytest.raises(DomainError, match="increments"):
            logdet_residual(path, p)

    def test_noise_free_limit(self):
        """a = eps I, dW = 0: both sides reduce to 2 tr(b) t up to
        O(eps^2); the residual is the pure second-order discretization
        error 2 tr(b^2) t dt, which halves when steps double."""
        eps = 1e-6
        p = params(alpha=4.0, b=-0.5, a=eps * np.eye(2))
        res = {}
        for steps in (400, 800):
            path = simulate_path_from_increments(p, 1.0, np.zeros((steps, 2, 2)))
            # continuous identity: log det increment == drift integral
            lhs = np.linalg.slogdet(path.terminal)[1] - np.linalg.slogdet(p.x0)[1]
            assert abs(lhs - 2.0 * np.trace(p.b) * 1.0) < 0.01
            res[steps] = logdet_residual(path, p)
        np.testing.assert_allclose(res[400], 2 * np.trace(p.b @ p.b) / 400, rtol=1e-2)
        np.testing.assert_allclose(res[800] / res[400], 0.5, atol=0.02)

    def test_scalar_residual_shrinks_with_steps(self):
        p = WishartParams(n=1, alpha=4.0, a=np.eye(1), b=np.zeros((1, 1)), x0=np.eye(1))
        med = {}
        for steps in (100, 400):
            vals = []
            for i in range(60):
                path = simulate_path(
                    p, 1.0, SimConfig(steps=steps, seed=500 + i, store_increments=True)
                )
                try:
                    vals.append(logdet_residual(path, p))
                except SingularPathError:
                    continue
            med[steps] = np.median(vals)
        assert med[400] < med[100]

    def test_singular_state_raises(self):
        p = WishartParams(n=1, alpha=2.0, a=np.eye(1), b=np.zeros((1, 1)), x0=np.eye(1))
        # force a path through zero with adversarial increments
        dw = np.full((20, 1, 1), -1.0) * np.sqrt(1.0 / 20)
        path = simulate_path_from_increments(p, 1.0, dw)
        if path.min_eig_seen <= 0:
            with pytest.raises(SingularPathError):
                logdet_residual(path, p)


class TestConfig:
    def test_invalid_steps(self):
        with pytest.raises(DomainError):
            SimConfig(steps=0)

    def test_unknown_scheme(self):
        with pytest.raises(DomainError):
            SimConfig(steps=10, scheme="milstein")
