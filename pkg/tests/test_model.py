"""Parameter validation and the deterministic endpoint quantities."""

import numpy as np
import pytest

from oracles import sigma_quad_entry
from wbl import linalg
from wbl.errors import DomainError
from wbl.model import WishartParams, endpoint_spec, sigma_t, validate, validated


def rot(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def make(n=2, alpha=4.0, a=None, b=None, x0=None):
    return WishartParams(
        n=n,
        alpha=alpha,
        a=np.eye(n) if a is None else a,
        b=np.zeros((n, n)) if b is None else b,
        x0=np.eye(n) if x0 is None else x0,
    )


class TestValidate:
    def test_valid_reference(self):
        assert validate(make(n=2, alpha=3.0)) == []

    def test_alpha_boundary(self):
        problems = validate(make(n=2, alpha=2.5))
        assert any("alpha below n+1" in p for p in problems)

    def test_low_rank_regime_rejected(self):
        # alpha in {1, ..., n-1} is out of scope and reported like any
        # other below-threshold value
        problems = validate(make(n=3, alpha=2.0))
        assert any("alpha below n+1" in p for p in problems)

    def test_noncommuting_pair(self):
        b = rot(np.pi / 4) @ np.diag([-1.0, -2.0]) @ rot(-np.pi / 4)
        problems = validate(make(a=np.diag([1.0, 2.0]), b=b))
        assert any("do not commute" in p for p in problems)

    def test_b_must_be_nsd(self):
        problems = validate(make(b=np.diag([0.5, -1.0])))
        assert any("negative semi-definite" in p for p in problems)

    def test_x0_must_be_psd(self):
        problems = validate(make(x0=np.diag([1.0, -0.2])))
        assert any("x0" in p for p in problems)

    def test_singular_a(self):
        problems = validate(make(a=np.array([[1.0, 1.0], [1.0, 1.0]])))
        assert any("singular" in p for p in problems)

    def test_all_violations_reported(self):
        bad = make(alpha=2.0, b=np.diag([1.0, 1.0]), x0=np.diag([-1.0, 1.0]))
        problems = validate(bad)
        assert len(problems) >= 3

    def test_validated_raises(self):
        with pytest.raises(DomainError, match="alpha below n\\+1"):
            validated(make(alpha=2.0))


class TestSigma:
    def test_zero_drift_is_linear(self):
        p = make(a=np.array([[1.0, 0.2], [0.4, 2.0]]))
        np.testing.assert_array_equal(sigma_t(p, 1.7), 1.7 * p.ata)

    def test_scalar_exponential_value(self):
        p = make(b=-np.eye(2))
        expected = (1.0 - np.exp(-2.0)) / 2.0
        np.testing.assert_allclose(sigma_t(p, 1.0), expected * np.eye(2), rtol=1e-14)
        assert abs(expected - 0.432332) < 1e-6

    def test_zero_time_is_exactly_zero(self):
        p = make(b=-0.5 * np.eye(2))
        assert np.array_equal(sigma_t(p, 0.0), np.zeros((2, 2)))

    def test_negative_time_rejected(self):
        with pytest.raises(DomainError):
            sigma_t(make(), -0.1)

    def test_closed_matches_quadrature_oracle(self):
        p = make(a=np.diag([1.0, 2.0]), b=-np.diag([0.4, 0.7]))
        s = sigma_t(p, 0.9)
        for i in range(2):
            for j in range(2):
                ref = sigma_quad_entry(p, 0.9, i, j)
                assert abs(s[i, j] - ref) < 1e-9 * max(abs(ref), 1.0)

    def test_internal_quadrature_fallback_agrees(self):
        p = make(a=np.diag([1.0, 2.0]), b=-np.diag([0.4, 0.7]))
        s_closed = sigma_t(p, 0.9)
        s_quad = sigma_t(p, 0.9, method="quadrature")
        np.testing.assert_allclose(s_closed, s_quad, rtol=1e-9, atol=1e-12)

    def test_psd_order_monotone(self):
        p = make(a=np.diag([1.0, 2.0]), b=-np.diag([0.4, 0.7]))
        for s, t in ((0.1, 0.5), (0.5, 1.0), (1.0, 3.0)):
            diff = sigma_t(p, t) - sigma_t(p, s)
            w, _ = linalg.eigen_sym(diff)
            assert w.min() >= -1e-12

    def test_time_derivative(self):
        p = make(a=np.diag([1.0, 2.0]), b=-np.diag([0.4, 0.7]))
        h, t = 1e-6, 0.8
        fd = (sigma_t(p, t + h) - sigma_t(p, t - h)) / (2 * h)
        ebt = linalg.mat_exp(p.b * t)
        ref = ebt @ p.ata @ ebt
        assert np.abs(fd - ref).max() < 1e-5 * np.abs(ref).max()


class TestEndpoint:
    def test_zero_drift(self):
        p = make(alpha=3.5)
        spec = endpoint_spec(p, 1.0)
        assert spec.dof == 3.5
        np.testing.assert_array_equal(spec.scale, p.ata)
        np.testing.assert_array_equal(spec.noncentrality_mean, p.x0)

    def test_zero_start_is_central(self):
        p = make(x0=np.zeros((2, 2)))
        spec = endpoint_spec(p, 1.0)
        assert not np.any(spec.noncentrality_mean)

    def test_scalar_exponential_case(self):
        p = make(b=-np.eye(2))
        spec = endpoint_spec(p, 1.0)
        np.testing.assert_allclose(
            spec.scale, ((1 - np.exp(-2.0)) / 2.0) * np.eye(2), rtol=1e-14
        )
        np.testing.assert_allclose(
            spec.noncentrality_mean, np.exp(-2.0) * np.eye(2), rtol=1e-14
        )

    def test_zero_time_flagged(self):
        with pytest.raises(DomainError, match="point mass"):
            endpoint_spec(make(), 0.0)

    def test_mean(self):
        p = make(alpha=3.0)
        spec = endpoint_spec(p, 1.0)
        np.testing.assert_allclose(spec.mean(), 4.0 * np.eye(2))


class TestParamsContainer:
    def test_shape_mismatch(self):
        with pytest.raises(DomainError, match="shape"):
            WishartParams(n=3, alpha=4.0, a=np.eye(2), b=np.zeros((2, 2)), x0=np.eye(2))

    def test_shift_helpers(self):
        p = make(alpha=4.0, b=-0.5 * np.eye(2))
        q = p.with_drift_shift(-0.25 * np.eye(2))
        np.testing.assert_array_equal(q.b, -0.75 * np.eye(2))
        r = p.with_index_shift(0.5)
        assert r.alpha == 5.0
