"""
End-to-end runs of the Ramsey pipeline and the certificate suite on sample models.
"""
import numpy as np
import pytest

from core.errors import AssumptionError
from core.pipeline import METHODS, RamseyPipeline
from core.quality_gates import SOLVER_CHECKS, CertificateSuite
from solvers.model import Partition, build_nkpc, build_problem

MIXED_BLOCKS = {
    "A_yy": [[0.9, 0.1], [0.2, 1.1]],
    "A_yz": [[0.0], [-1.0]],
    "A_zz": [[0.7]],
    "B_yu": [[1.0], [-0.3]],
    "Q_yy": [[0.5, 0.0], [0.0, 1.0]],
    "Q_yz": [[0.1], [0.0]],
    "Q_zz": [[0.2]],
    "R_uu": [[0.1]],
}

NKPC_BLOCKS = build_nkpc().blocks()

SCENARIOS = [
    {"id": "nkpc", "name": "Cost-push shock, inflation anchor", "build": lambda: build_nkpc()},
    {"id": "nkpc_low_persistence", "name": "Short-lived cost-push shock", "build": lambda: build_nkpc(rho=0.5)},
    {"id": "nkpc_slow_shock", "name": "Near-unit-root cost-push shock", "build": lambda: build_nkpc(rho=0.99)},
    {
        "id": "nkpc_iid_shock",
        "name": "Serially uncorrelated cost-push shock",
        "build": lambda: build_problem(dict(NKPC_BLOCKS, A_zz=[[0.0]]), 0.99, Partition(n_k=0, n_x=1, n_z=1, n_u=1)),
    },
    {
        "id": "mixed",
        "name": "Capital stock with one forward-looking price",
        "build": lambda: build_problem(MIXED_BLOCKS, 0.97, Partition(n_k=1, n_x=1, n_z=1, n_u=1)),
    },
]


@pytest.mark.parametrize("scenario", SCENARIOS, ids=[s["id"] for s in SCENARIOS])
class TestScenarios:
    def test_pipeline(self, scenario):
        problem = scenario["build"]()
        result = RamseyPipeline().run(problem, None, np.ones(problem.partition.n_z))

        assert result.solution.converged
        assert result.cross_check_gap <= 1e-9
        assert result.welfare.welfare <= 1e-12
        assert result.mirror is not None and result.mirror.passed

    def test_certificates(self, scenario):
        problem = scenario["build"]()
        report = CertificateSuite().run(problem)

        assert report["failed"] == []
        assert report["passed"]
        names = [check["name"] for check in report["checks"]]
        assert names[:2] == ["controllability", "shock_stability"]
        assert set(SOLVER_CHECKS) <= set(names)

    @pytest.mark.parametrize("method", METHODS)
    def test_methods_agree(self, scenario, method):
        problem = scenario["build"]()
        reference = RamseyPipeline("full").run(problem).welfare
        result = RamseyPipeline(method).run(problem).welfare
        assert result.welfare == pytest.approx(reference.welfare, rel=1e-8, abs=1e-12)
        np.testing.assert_allclose(result.S, reference.S, atol=1e-8)


class TestSlowClosedLoop:
    def test_oracle_horizon_follows_closed_loop_decay(self):
        report = CertificateSuite().run(build_nkpc(rho=0.99))
        oracle = next(c for c in report["checks"] if c["name"] == "oracle_gap")
        assert oracle["passed"]
        assert int(oracle["detail"].split()[0]) > 200

    def test_fast_model_keeps_default_horizon(self):
        report = CertificateSuite().run(build_nkpc())
        oracle = next(c for c in report["checks"] if c["name"] == "oracle_gap")
        assert oracle["detail"] == "200 periods"

    def test_iid_shock_mirror_roots_pass(self):
        problem = build_problem(dict(NKPC_BLOCKS, A_zz=[[0.0]]), 0.99, Partition(n_k=0, n_x=1, n_z=1, n_u=1))
        report = CertificateSuite().run(problem)
        assert "mirror_roots" not in report["failed"]
        mirror = next(c for c in report["checks"] if c["name"] == "mirror_roots")
        assert mirror["detail"] == "2 pairs, 0 unpaired"


class TestRandomInstances:
    def test_pipeline_consistency(self, random_instances):
        rng = np.random.default_rng(5)
        for problem in random_instances[:25]:
            part = problem.partition
            result = RamseyPipeline("blocks").run(problem, rng.normal(size=part.n_k), rng.normal(size=part.n_z))
            assert result.cross_check_gap <= 1e-9
            assert result.welfare.welfare <= 1e-12
            assert result.welfare.naive_welfare >= result.welfare.welfare - 1e-12


class TestFailureModes:
    def test_pipeline_rejects_uncontrollable_model(self):
        blocks = dict(MIXED_BLOCKS, B_yu=[[0.0], [0.0]])
        problem = build_problem(blocks, 0.97, Partition(n_k=1, n_x=1, n_z=1, n_u=1))
        with pytest.raises(AssumptionError, match="controllability"):
            RamseyPipeline().run(problem)

    def test_pipeline_rejects_explosive_shock(self):
        blocks = dict(MIXED_BLOCKS, A_zz=[[1.05]])
        problem = build_problem(blocks, 0.97, Partition(n_k=1, n_x=1, n_z=1, n_u=1))
        with pytest.raises(AssumptionError, match="Shock stability"):
            RamseyPipeline().run(problem)

    def test_certificates_skip_solver_after_assumption_failure(self):
        blocks = dict(MIXED_BLOCKS, A_zz=[[1.05]])
        problem = build_problem(blocks, 0.97, Partition(n_k=1, n_x=1, n_z=1, n_u=1))
        report = CertificateSuite().run(problem)

        assert not report["passed"]
        assert "shock_stability" in report["failed"]
        skipped = [c for c in report["checks"] if c.get("detail", "").startswith("skipped")]
        assert [c["name"] for c in skipped] == list(SOLVER_CHECKS)
