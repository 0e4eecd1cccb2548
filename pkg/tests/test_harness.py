"""Verification harness: experiment kinds, reports, determinism."""

import json

import numpy as np
import pytest

from wbl.errors import DomainError
from wbl.harness import (
    Experiment,
    report_csv,
    report_json,
    run_experiment,
    verify_rn_martingale,
    write_report,
)
from wbl.mc import Moments
from wbl.model import WishartParams
from wbl.sim import simulate_terminal_batch


def p1(alpha=2.0, b=0.0):
    return WishartParams(n=1, alpha=alpha, a=np.eye(1), b=b * np.eye(1), x0=np.eye(1))


def p2(alpha=4.0, b=-0.5):
    return WishartParams(n=2, alpha=alpha, a=np.eye(2), b=b * np.eye(2), x0=np.eye(2))


def small(name, kind, params, grid, paths=4000, steps=100, seed=101, **kw):
    return Experiment(
        name=name,
        kind=kind,
        params=params,
        t=1.0,
        grid=grid,
        paths=paths,
        steps=steps,
        base_seed=seed,
        **kw,
    )


class TestMartingale:
    def test_zero_shift_is_exact(self):
        exp = small("m0", "martingale", p1(), ({"u": np.zeros((1, 1))},))
        rep = run_experiment(exp)
        for rec in rep.records:
            assert rec["mc_mean"] == 1.0 and rec["z"] == 0.0
            assert rec["verdict"] == "pass"

    def test_discrimination(self):
        exp = small(
            "m1",
            "martingale",
            p1(2.0, 0.0),
            ({"u": -0.5 * np.eye(1), "expect": {"printed": "fail>5"}},),
            paths=20_000,
            steps=200,
        )
        rep = run_experiment(exp)
        by_label = {r["label"]: r for r in rep.records}
        assert by_label["drift_rn[derived]"]["verdict"] == "pass"
        assert abs(by_label["drift_rn[printed]"]["z"]) > 5.0
        assert rep.passed()

    def test_index_point(self):
        exp = small("m2", "martingale", p1(5.0, -0.3), ({"nu": 0.5},), paths=20_000, steps=200)
        rep = run_experiment(exp)
        (rec,) = rep.records
        assert rec["label"] == "index_rn" and rec["verdict"] == "pass"


class TestEndpointLaplace:
    def test_sign_resolution(self):
        exp = small(
            "lap",
            "endpoint_laplace",
            p2(3.0, -0.5),
            tuple({"u": c * np.eye(2)} for c in (0.05, 0.2)),
            paths=20_000,
        )
        rep = run_experiment(exp)
        derived = [r for r in rep.records if r["label"] == "laplace[derived]"]
        printed = [r for r in rep.records if r["label"] == "laplace[printed]"]
        assert all(r["verdict"] == "pass" for r in derived)
        assert all(abs(r["z"]) > 5.0 for r in printed)
        assert any(r.get("printed_exceeds_one") for r in printed)
        assert rep.passed()


class TestDriftLaw:
    def test_small_grid(self):
        exp = small(
            "dl",
            "drift_law",
            p2(4.0, -0.5),
            ({"u": -0.25 * np.eye(2), "w": 0.1 * np.eye(2)},),
            paths=20_000,
            steps=200,
        )
        rep = run_experiment(exp)
        labels = {r["label"] for r in rep.records}
        assert labels == {"law-vs-rn", "law-vs-exact", "rn-vs-exact"}
        pair = next(r for r in rep.records if r["label"] == "law-vs-rn")
        assert pair["verdict"] == "pass"
        assert "reference_stderr" in pair


class TestIndexLaw:
    def test_small_grid(self):
        exp = small(
            "il",
            "index_law",
            p1(4.0, -0.3),
            ({"nu": 0.5, "w": 0.1 * np.eye(1)},),
            paths=20_000,
            steps=200,
        )
        rep = run_experiment(exp)
        (rec,) = rep.records
        assert rec["verdict"] == "pass"
        assert rep.excluded_path_count < 0.05 * 20_000


class TestJoint:
    def test_trivial_point_is_exact(self):
        exp = small(
            "j0",
            "joint",
            p1(4.0, 0.0),
            ({"v": np.zeros((1, 1)), "lam": 0.0, "g": "one"},),
        )
        rep = run_experiment(exp)
        (rec,) = rep.records
        assert rec["closed_form"] == 1.0 and rec["mc_mean"] == 1.0 and rec["z"] == 0.0

    def test_small_joint(self):
        exp = small(
            "j1",
            "joint",
            p1(4.0, -0.2),
            tuple(
                {"v": v * np.eye(1), "lam": lam, "g": "one"}
                for v, lam in ((0.5, 0.0), (0.0, 0.8), (0.5, 0.8))
            ),
            paths=20_000,
            steps=200,
        )
        rep = run_experiment(exp)
        assert rep.passed()

    def test_expected_failure_of_printed_nu(self):
        exp = small(
            "jp",
            "joint",
            p1(4.0, 0.0),
            ({"v": np.zeros((1, 1)), "lam": 1.0, "g": "one", "expect": "fail>5"},),
            paths=20_000,
            steps=200,
            variant="printed",
        )
        rep = run_experiment(exp)
        (rec,) = rep.records
        assert abs(rec["z"]) > 5.0 and rec["met_expectation"]


class TestReports:
    def test_verdict_recomputable(self):
        exp = small(
            "rc",
            "martingale",
            p1(2.0, -0.5),
            ({"u": -0.25 * np.eye(1)},),
            paths=4000,
        )
        rep = run_experiment(exp)
        for rec in rep.records:
            z = (rec["mc_mean"] - rec["closed_form"]) / rec["mc_stderr"]
            np.testing.assert_allclose(z, rec["z"], rtol=1e-12)
            assert (abs(z) <= 3.0) == (rec["verdict"] == "pass")

    def test_byte_identical_reruns(self, tmp_path):
        exp = small("det", "martingale", p1(2.0, -0.5), ({"u": -0.25 * np.eye(1)},))
        r1, r2 = run_experiment(exp), run_experiment(exp)
        assert report_json(r1) == report_json(r2)
        assert report_csv(r1) == report_csv(r2)
        paths = write_report(r1, tmp_path)
        with open(paths["json"]) as fh:
            doc = json.load(fh)
        assert doc["records"][0]["label"] == "drift_rn[derived]"
        assert "wall_time" not in json.dumps(doc)  # timing lives in the sidecar

    def test_worker_count_does_not_change_records(self):
        exp1 = small("w", "martingale", p1(2.0, -0.5), ({"u": -0.25 * np.eye(1)},), paths=20_000)
        exp2 = small(
            "w", "martingale", p1(2.0, -0.5), ({"u": -0.25 * np.eye(1)},),
            paths=20_000, workers=2,
        )
        r1, r2 = run_experiment(exp1), run_experiment(exp2)
        assert json.dumps(r1.records) == json.dumps(r2.records)

    def test_unknown_kind(self):
        exp = Experiment(
            name="x",
            kind="nope",
            params=p1(),
            t=1.0,
            grid=(),
            paths=1000,
            steps=50,
            base_seed=1,
        )
        with pytest.raises(DomainError, match="unknown experiment kind"):
            run_experiment(exp)

    def test_experiment_guards(self):
        with pytest.raises(DomainError):
            small("x", "martingale", p1(), (), paths=50)
        with pytest.raises(DomainError):
            small("x", "martingale", p1(), (), steps=5)


class TestAntithetic:
    def test_variance_reduction_for_linear_functional(self):
        """Antithetic pairing on tr(X_t): the paired estimator's variance is
        well under 0.9x the independent one at equal path budget."""
        p = p2(3.0, 0.0)
        paths = 8192
        anti = simulate_terminal_batch(p, 1.0, 100, 7, 0, paths, antithetic=True)
        indep = simulate_terminal_batch(p, 1.0, 100, 7, 0, paths, antithetic=False)
        tr_anti = np.einsum("bii->b", anti.x_t)
        tr_ind = np.einsum("bii->b", indep.x_t)
        pair_means = tr_anti.reshape(-1, 2).mean(axis=1)
        # SE^2 of the antithetic estimator vs the independent one
        var_anti = pair_means.var(ddof=1) / (paths / 2)
        var_ind = tr_ind.var(ddof=1) / paths
        assert var_anti / var_ind < 0.9


class TestDensityBridge:
    def test_kernel_conditioned_estimates(self):
        exp = small(
            "db",
            "density_bridge",
            p2(5.0, -0.5),
            (
                {"form": "quadratic", "v": 0.3 * np.eye(2), "lam": 0.0, "y": np.eye(2)},
                {"form": "hw", "v": None, "lam": 0.8, "y": np.eye(2)},
            ),
            paths=20_000,
            steps=200,
        )
        rep = run_experiment(exp)
        assert rep.passed()
        for rec in rep.records:
            assert rec["count"] >= 200  # kernel occupancy
            assert "bias_allowance" in rec

    def test_dimension_guard(self):
        p3 = WishartParams(n=3, alpha=5.0, a=np.eye(3), b=np.zeros((3, 3)), x0=np.eye(3))
        exp = small(
            "db3",
            "density_bridge",
            p3,
            ({"form": "hw", "v": None, "lam": 0.5, "y": np.eye(3)},),
        )
        with pytest.raises(DomainError, match="n <= 2"):
            run_experiment(exp)
