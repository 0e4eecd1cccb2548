"""Zonal polynomials and the matrix-argument 0F1 series."""

import numpy as np
import pytest
from scipy.special import hyp0f1 as scipy_hyp0f1

from oracles import hyp0f1_equal_eigs, hyp0f1_o2_identity, zonal_at_identity
from wbl.errors import ConvergenceError, DomainError
from wbl.zonal import (
    gen_pochhammer,
    hyp0f1_eigenvalues,
    partitions,
    zonal_values,
)


class TestZonalPolynomials:
    def test_degree_sums_are_trace_powers(self):
        rng = np.random.default_rng(0)
        for n in (1, 2, 3):
            x = rng.uniform(0.1, 2.0, n)
            for k in range(1, 13 - 3 * n):
                total = sum(zonal_values(k, x).values())
                ref = x.sum() ** k
                assert abs(total - ref) < 1e-9 * abs(ref)

    def test_known_degree_two_forms(self):
        x = np.array([0.7, 1.9])
        tr, tr2 = x.sum(), (x**2).sum()
        vals = zonal_values(2, x)
        np.testing.assert_allclose(vals[(2,)], (tr**2 + 2 * tr2) / 3)
        np.testing.assert_allclose(vals[(1, 1)], (2 / 3) * (tr**2 - tr2))

    def test_identity_matrix_product_formula(self):
        for n in (1, 2, 3):
            for k in range(1, 8):
                vals = zonal_values(k, np.ones(n))
                for kappa, v in vals.items():
                    ref = zonal_at_identity(kappa, n)
                    assert abs(v - ref) < 1e-9 * max(abs(ref), 1.0)

    def test_partition_enumeration(self):
        assert partitions(4, 2) == ((4,), (3, 1), (2, 2))
        assert len(partitions(20, 2)) == 11


class TestHyp0f1:
    def test_zero_argument(self):
        value, err = hyp0f1_eigenvalues(1.7, np.zeros(2))
        assert value == 1.0 and err == 0.0

    def test_scalar_matches_scipy(self):
        for b in (0.7, 1.0, 2.5):
            for x in (0.01, 0.5, 3.0, 10.0):
                v, _ = hyp0f1_eigenvalues(b, [x])
                assert abs(v - scipy_hyp0f1(b, x)) < 1e-10 * scipy_hyp0f1(b, x)

    def test_scalar_bessel_identity(self):
        # 0F1(1; 1) = I_0(2)
        from scipy.special import iv

        v, _ = hyp0f1_eigenvalues(1.0, [1.0])
        np.testing.assert_allclose(v, iv(0, 2.0), rtol=1e-12)

    def test_equal_eigenvalues_vs_bruteforce(self):
        for b in (1.0, 1.5, 2.0):
            for c in (0.1, 0.3, 1.0):
                v, _ = hyp0f1_eigenvalues(b, [c, c])
                ref = hyp0f1_equal_eigs(b, c, 2, degree=20)
                assert abs(v - ref) < 1e-8 * abs(ref)

    def test_o2_group_integral_identity(self):
        for (u, v) in [(0.3, 0.3), (0.5, 2.0), (1e-3, 4.0), (2.5, 2.5)]:
            mine, _ = hyp0f1_eigenvalues(1.0, [u, v])
            ref = hyp0f1_o2_identity(u, v)
            assert abs(mine - ref) < 1e-9 * abs(ref)

    def test_parameter_pole(self):
        with pytest.raises(DomainError):
            hyp0f1_eigenvalues(0.4, [1.0, 1.0])  # needs b > 1/2 for n=2

    def test_negative_eigenvalue_rejected(self):
        with pytest.raises(DomainError):
            hyp0f1_eigenvalues(2.0, [1.0, -0.5])

    def test_convergence_error_carries_estimate(self):
        with pytest.raises(ConvergenceError) as exc_info:
            hyp0f1_eigenvalues(1.0, [40.0], max_degree=5)
        assert exc_info.value.estimate is not None
        assert exc_info.value.estimate > 1e-10


class TestPochhammer:
    def test_matches_gamma_ratio(self):
        from scipy.special import gammaln

        b = 2.3
        for kappa in ((3,), (2, 1), (1, 1, 1)):
            ref = 1.0
            for i, part in enumerate(kappa):
                base = b - 0.5 * i
                ref *= np.exp(gammaln(base + part) - gammaln(base))
            np.testing.assert_allclose(gen_pochhammer(b, kappa), ref, rtol=1e-12)
