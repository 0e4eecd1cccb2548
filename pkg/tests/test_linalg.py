"""Symmetric-matrix primitive tests."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from wbl import linalg
from wbl.errors import DomainError


def rot(theta):
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def random_sym(rng, n, scale=1.0):
    m = rng.standard_normal((n, n)) * scale
    return 0.5 * (m + m.T)


def random_spd(rng, n):
    g = rng.standard_normal((n + 2, n))
    return g.T @ g + 1e-3 * np.eye(n)


class TestEigen:
    def test_identity(self):
        w, v = linalg.eigen_sym(np.eye(3))
        np.testing.assert_allclose(w, np.ones(3))
        np.testing.assert_allclose(v @ v.T, np.eye(3), atol=1e-12)

    def test_diagonal(self):
        w, v = linalg.eigen_sym(np.diag([4.0, 9.0]))
        np.testing.assert_allclose(w, [4.0, 9.0])
        # permutation-signed identity
        np.testing.assert_allclose(np.abs(v), np.eye(2), atol=1e-12)

    def test_gram_reconstruction(self):
        rng = np.random.default_rng(0)
        for n in (2, 3, 5):
            g = rng.standard_normal((n, n))
            m = g.T @ g
            w, v = linalg.eigen_sym(m)
            rec = (v * w) @ v.T
            assert np.linalg.norm(rec - m) <= 1e-10 * np.linalg.norm(m)
            assert np.linalg.norm(v @ v.T - np.eye(n)) < 1e-10
            assert w.min() >= -1e-12


class TestFunSym:
    def test_diag_sqrt(self):
        np.testing.assert_allclose(
            linalg.fun_sym(np.diag([4.0, 9.0]), "sqrt"), np.diag([2.0, 3.0])
        )

    def test_exp_zero_is_identity(self):
        np.testing.assert_allclose(linalg.fun_sym(np.zeros((3, 3)), "exp"), np.eye(3))

    def test_sqrt_squares_back(self):
        rng = np.random.default_rng(1)
        m = random_spd(rng, 4)
        root = linalg.fun_sym(m, "sqrt")
        assert np.linalg.norm(root @ root - m) < 1e-9 * np.linalg.norm(m)

    def test_sqrt_rejects_negative_eigenvalue(self):
        with pytest.raises(DomainError, match="eigenvalue"):
            linalg.fun_sym(np.diag([1.0, -0.5]), "sqrt")

    def test_sqrt_clips_rounding_noise(self):
        m = np.diag([1.0, -1e-12])
        root = linalg.fun_sym(m, "sqrt")
        assert root[1, 1] == 0.0

    def test_pow_integer_allows_indefinite(self):
        m = np.diag([2.0, -3.0])
        np.testing.assert_allclose(
            linalg.fun_sym(m, "pow", power=2), np.diag([4.0, 9.0])
        )

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_conjugation_equivariance(self, seed):
        """f(Q m Q^T) = Q f(m) Q^T for orthogonal Q."""
        rng = np.random.default_rng(seed)
        n = 3
        m = random_spd(rng, n)
        q, _ = np.linalg.qr(rng.standard_normal((n, n)))
        for kind in ("sqrt", "exp"):
            lhs = linalg.fun_sym(q @ m @ q.T, kind)
            rhs = q @ linalg.fun_sym(m, kind) @ q.T
            assert np.linalg.norm(lhs - rhs) < 1e-9 * max(np.linalg.norm(rhs), 1.0)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_sqrt_of_psd_is_psd(self, seed):
        rng = np.random.default_rng(seed)
        g = rng.standard_normal((2, 3))
        root = linalg.fun_sym(g.T @ g, "sqrt")  # rank-deficient PSD input
        assert linalg.cone_check(root, "psd")


class TestCones:
    def test_psd_identity(self):
        assert linalg.cone_check(np.eye(2), "psd")

    def test_nsd_negative_identity(self):
        assert linalg.cone_check(-np.eye(2), "nsd")

    def test_indefinite_not_psd(self):
        assert not linalg.cone_check(np.diag([1.0, -1.0]), "psd")

    def test_spd_strict(self):
        assert linalg.cone_check(np.eye(2), "spd")
        assert not linalg.cone_check(np.diag([1.0, 0.0]), "spd")

    def test_unknown_cone(self):
        with pytest.raises(DomainError):
            linalg.cone_check(np.eye(2), "psdd")


class TestCommutes:
    def test_diagonals_commute(self):
        assert linalg.commutes(np.diag([1.0, 2.0]), np.diag([3.0, 4.0]))

    def test_identity_commutes_with_anything(self):
        rng = np.random.default_rng(3)
        assert linalg.commutes(np.eye(2), rng.standard_normal((2, 2)))

    def test_rotation_vs_diagonal(self):
        p, q = rot(np.pi / 4), np.diag([1.0, 2.0])
        assert np.linalg.norm(p @ q - q @ p) > 0.1  # direct multiplication
        assert not linalg.commutes(p, q)

    def test_shape_mismatch(self):
        with pytest.raises(DomainError):
            linalg.commutes(np.eye(2), np.eye(3))


class TestConstruction:
    def test_symmetrize(self):
        m = np.array([[1.0, 2.0], [0.0, 1.0]])
        s = linalg.symmetrize(m)
        np.testing.assert_allclose(s, [[1.0, 1.0], [1.0, 1.0]])

    def test_sym_mat_rejects_gross_asymmetry(self):
        with pytest.raises(DomainError, match="symmetric"):
            linalg.sym_mat(np.array([[1.0, 5.0], [0.0, 1.0]]))

    def test_rejects_nonsquare(self):
        with pytest.raises(DomainError, match="square"):
            linalg.as_matrix(np.ones((2, 3)))

    def test_rejects_nonfinite(self):
        with pytest.raises(DomainError, match="finite"):
            linalg.as_matrix(np.array([[np.nan, 0.0], [0.0, 1.0]]))
