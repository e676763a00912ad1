import json
import logging

import pandas as pd
import pytest

from cli.main import main
from conftest import NKPC_P
from core.config import reset_settings
from core.errors import EXIT_ASSUMPTION, EXIT_CHECK_FAILED, EXIT_INVALID_INPUT, EXIT_NOT_CONVERGED, EXIT_OK


@pytest.fixture(autouse=True)
def detach_log_handlers():
    yield
    # main() binds the root handler to the captured stderr of this test
    root = logging.getLogger()
    for handler in list(root.handlers):
        if type(handler) is logging.StreamHandler:
            root.removeHandler(handler)


@pytest.fixture
def nkpc_file(tmp_path):
    path = tmp_path / "nkpc.json"
    assert main(["example", "nkpc", "--out", str(path)]) == EXIT_OK
    return path


def edited_model(tmp_path, source, **changes):
    data = json.loads(source.read_text())
    data.update(changes)
    path = tmp_path / "edited.json"
    path.write_text(json.dumps(data))
    return path


def run_json(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip() else None)


class TestExample:
    def test_nkpc_calibration(self, capsys):
        code, model = run_json(capsys, ["example", "nkpc"])
        assert code == EXIT_OK
        assert model["R_uu"][0][0] == pytest.approx(0.02125)
        assert model["A_zz"] == [[0.8]]
        assert model["beta"] == 0.99
        assert (model["n_k"], model["n_x"], model["n_z"], model["n_u"]) == (0, 1, 1, 1)

    def test_parameter_override(self, capsys):
        code, model = run_json(capsys, ["example", "nkpc", "--rho", "0.5"])
        assert code == EXIT_OK
        assert model["A_zz"] == [[0.5]]

    def test_unknown_example(self, capsys):
        assert main(["example", "foo"]) == EXIT_INVALID_INPUT
        assert "foo" in capsys.readouterr().err

    def test_out_of_range_parameter(self):
        assert main(["example", "nkpc", "--beta", "1.5"]) == EXIT_INVALID_INPUT


class TestSolve:
    def test_nkpc_report(self, nkpc_file, capsys):
        code, report = run_json(capsys, ["solve", str(nkpc_file)])
        assert code == EXIT_OK
        for got_row, want_row in zip(report["P"]["full"], NKPC_P.tolist()):
            for got, want in zip(got_row, want_row):
                assert got == pytest.approx(want, abs=1e-5)
        assert report["anchor"]["G_z"][0][0] == pytest.approx(0.6504, abs=1e-3)
        assert report["welfare"] == pytest.approx(-2.688, abs=5e-3)
        assert report["naive_welfare"] > 0
        assert report["diagnostics"]["converged"] is True
        assert report["diagnostics"]["cross_check_gap"] <= 1e-9
        assert report["diagnostics"]["mirror_roots_passed"] is True
        assert report["problem"]["z0"] == [1.0]

    def test_zero_shock(self, nkpc_file, capsys):
        code, report = run_json(capsys, ["solve", str(nkpc_file), "--z0", "0"])
        assert code == EXIT_OK
        assert report["welfare"] == 0.0

    @pytest.mark.parametrize("method", ["blocks", "scaled"])
    def test_alternative_methods(self, nkpc_file, capsys, method):
        code, report = run_json(capsys, ["solve", str(nkpc_file), "--method", method])
        assert code == EXIT_OK
        assert report["diagnostics"]["method"] == method
        assert report["diagnostics"]["last_update"] < 1e-12
        assert report["P"]["full"][0][0] == pytest.approx(NKPC_P[0, 0], abs=1e-5)

    def test_report_file(self, nkpc_file, tmp_path):
        out = tmp_path / "report.json"
        assert main(["solve", str(nkpc_file), "--out", str(out)]) == EXIT_OK
        assert json.loads(out.read_text())["welfare"] == pytest.approx(-2.688, abs=5e-3)

    def test_malformed_json(self, tmp_path, capsys):
        path = tmp_path / "broken.json"
        path.write_text('{"n_k": 0,\n "n_x": }')
        assert main(["solve", str(path)]) == EXIT_INVALID_INPUT
        assert "line 2" in capsys.readouterr().err

    def test_unknown_field(self, nkpc_file, tmp_path):
        path = edited_model(tmp_path, nkpc_file, gamma=1.0)
        assert main(["solve", str(path)]) == EXIT_INVALID_INPUT

    def test_shape_mismatch(self, nkpc_file, tmp_path):
        path = edited_model(tmp_path, nkpc_file, A_zz=[[0.8, 0.0]])
        assert main(["solve", str(path)]) == EXIT_INVALID_INPUT

    def test_missing_file(self, tmp_path):
        assert main(["solve", str(tmp_path / "absent.json")]) == EXIT_INVALID_INPUT

    def test_uncontrollable_model(self, nkpc_file, tmp_path, capsys):
        path = edited_model(tmp_path, nkpc_file, B_yu=[[0.0]])
        assert main(["solve", str(path)]) == EXIT_ASSUMPTION
        assert "controllability" in capsys.readouterr().err

    def test_iteration_cap(self, nkpc_file, monkeypatch):
        monkeypatch.setenv("RAMSEY_MAX_ITER", "5")
        reset_settings()
        assert main(["solve", str(nkpc_file)]) == EXIT_NOT_CONVERGED

    def test_invalid_environment(self, nkpc_file, monkeypatch):
        monkeypatch.setenv("RAMSEY_DAMPING", "2.0")
        reset_settings()
        assert main(["solve", str(nkpc_file)]) == EXIT_INVALID_INPUT


class TestVerify:
    def test_nkpc_passes(self, nkpc_file, capsys):
        code, report = run_json(capsys, ["verify", str(nkpc_file)])
        assert code == EXIT_OK
        assert report["passed"] is True
        assert report["failed"] == []

    def test_explosive_shock_fails(self, nkpc_file, tmp_path, capsys):
        path = edited_model(tmp_path, nkpc_file, A_zz=[[1.2]], beta=1.0)
        code, report = run_json(capsys, ["verify", str(path)])
        assert code == EXIT_CHECK_FAILED
        assert "shock_stability" in report["failed"]

    def test_uncontrollable_fails(self, nkpc_file, tmp_path, capsys):
        path = edited_model(tmp_path, nkpc_file, B_yu=[[0.0]])
        code, report = run_json(capsys, ["verify", str(path)])
        assert code == EXIT_CHECK_FAILED
        assert "controllability" in report["failed"]


class TestSimulate:
    def test_trajectory_csv(self, nkpc_file, tmp_path, capsys):
        csv = tmp_path / "path.csv"
        code, summary = run_json(capsys, ["simulate", str(nkpc_file), "--periods", "200", "--csv", str(csv)])
        assert code == EXIT_OK
        frame = pd.read_csv(csv)
        assert len(frame) == 201
        assert frame["x_1"].iloc[0] == pytest.approx(0.650, abs=1e-3)
        assert frame["z_1"].iloc[0] == 1.0
        assert summary["periods"] == 200
        assert summary["gap"] <= 1e-8 * abs(summary["W_riccati"])
        assert frame["discounted_cumulative"].iloc[-1] == pytest.approx(-summary["W_sim"], rel=1e-12)

    def test_zero_periods(self, nkpc_file, tmp_path, capsys):
        csv = tmp_path / "path.csv"
        code, summary = run_json(capsys, ["simulate", str(nkpc_file), "--periods", "0", "--csv", str(csv)])
        assert code == EXIT_OK
        assert len(pd.read_csv(csv)) == 1
        assert summary["periods"] == 0
