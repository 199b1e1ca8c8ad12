import json

import pytest

from entrosteer.main import EXIT_COMPUTATION, EXIT_CONFIG, EXIT_OK, run
from entrosteer.services.quantum_core import dump_density
from entrosteer.services.states import werner


def run_json(capsys, *argv):
    assert run([*argv, "--format", "json"]) == EXIT_OK
    return json.loads(capsys.readouterr().out)


def test_entropy_csv(capsys):
    assert run(["entropy", "--probs", "0.5,0.5", "--q", "2", "--format", "csv"]) == EXIT_OK
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "quantity,value"
    assert "shannon,0.6931471806" in out
    assert "tsallis(q=2),0.5" in out


def test_entropy_rejects_bad_distribution(capsys):
    assert run(["entropy", "--probs", "0.5,0.6"]) == EXIT_COMPUTATION
    assert "sum to" in capsys.readouterr().err
    assert run(["entropy", "--probs", "a,b"]) == EXIT_CONFIG


def test_bound_command(capsys):
    report = run_json(capsys, "bound", "--criterion", "tsallis", "--q", "2", "--d", "2", "--m", "3")
    assert report["value"] == pytest.approx(1.0)
    assert report["provenance"] == "analytic"
    composite = run_json(capsys, "bound", "--d", "2", "--m", "3", "--scenario", "separable")
    assert composite["value"] == pytest.approx(4 * 0.6931471805599453)


def test_check_werner(capsys):
    report = run_json(capsys, "check", "--family", "werner", "--w", "0.9", "--criterion", "tsallis", "--q", "2")
    assert report["violated"] is True
    assert report["lhs"] == pytest.approx(1.5 * (1 - 0.81))


def test_check_isotropic_qutrits(capsys):
    report = run_json(capsys, "check", "--family", "isotropic", "--d", "3", "--alpha", "0.6",
                      "--criterion", "tsallis", "--q", "2")
    assert report["violated"] is True


def test_check_state_file(capsys, tmp_path):
    path = tmp_path / "rho.json"
    dump_density(werner(0.3), path)
    report = run_json(capsys, "check", "--state", str(path), "--dims", "2,2", "--criterion", "shannon")
    assert report["violated"] is False
    assert run(["check", "--state", str(path), "--criterion", "shannon"]) == EXIT_CONFIG


def test_configuration_errors(capsys):
    assert run(["check", "--family", "werner", "--w", "0.9", "--criterion", "tsallis"]) == EXIT_CONFIG
    assert run(["check", "--family", "nonsense", "--w", "0.9"]) == EXIT_CONFIG
    assert run(["check", "--family", "werner"]) == EXIT_CONFIG
    assert run(["threshold", "--family", "werner", "--threads", "0"]) == EXIT_CONFIG
    assert run(["check", "--family", "ghz", "--gamma", "0.9"]) == EXIT_CONFIG
    assert run(["check", "--family", "isotropic", "--d", "3", "--alpha", "0.5", "--criterion", "linear"]) == EXIT_CONFIG


def test_out_of_range_noise_is_a_config_error(capsys):
    assert run(["check", "--family", "werner", "--w", "1.5"]) == EXIT_CONFIG


def test_threshold_writes_out_file(tmp_path, capsys):
    out = tmp_path / "nested" / "werner.csv"
    code = run(["threshold", "--family", "werner", "--criterion", "tsallis", "--q", "2",
                "--resolution", "1e-3", "--format", "csv", "--out", str(out)])
    assert code == EXIT_OK
    assert capsys.readouterr().out == ""
    header, row = out.read_text().splitlines()
    assert header.startswith("family,criterion,parameter,critical")
    assert float(row.split(",")[3]) == pytest.approx(0.5774, abs=1e-3)


def test_threshold_without_violation(capsys):
    assert run(["threshold", "--family", "bes", "--m2", "0.3", "--criterion", "tsallis", "--q", "2",
                "--meas", "bes", "--resolution", "1e-2"]) == EXIT_COMPUTATION


def test_tripartite_check(capsys):
    report = run_json(capsys, "check", "--family", "ghz", "--gamma", "1", "--meas", "a-bc-2",
                      "--criterion", "shannon")
    assert report["criterion"] == "a-to-bc"
    assert report["violated"] is True


def test_sweep_command(capsys):
    curve = run_json(capsys, "sweep", "--family", "werner", "--criterion", "tsallis", "--q", "2",
                     "--grid", "2,3", "--resolution", "1e-3")
    assert [p["parameter"] for p in curve["points"]] == [2.0, 3.0]


def test_survey_command(capsys):
    assert run(["survey", "--n", "200", "--batch-size", "100"]) == EXIT_OK
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "# n: 200"
    assert out[2] == "category,count,fraction,ci_low,ci_high"


def test_reproduce_fig1(capsys):
    assert run(["reproduce", "fig1"]) == EXIT_OK
    assert capsys.readouterr().out.startswith("# figure: fig1")


def test_optimize_command(capsys):
    result = run_json(capsys, "optimize", "--family", "werner", "--w", "0.9", "--criterion", "tsallis", "--q", "2",
                      "--restarts", "2", "--maxiter", "100")
    assert result["report"]["lhs"] <= result["start_lhs"] + 1e-12
    assert result["report"]["violated"] is True


def test_record_and_history(capsys, ledger):
    assert run(["bound", "--d", "3", "--m", "4", "--record"]) == EXIT_OK
    capsys.readouterr()
    history = run_json(capsys, "history")
    assert len(history["runs"]) == 1
    run_id = history["runs"][0]["id"]
    assert history["runs"][0]["subcommand"] == "bound"

    assert run(["history", "--show", str(run_id), "--format", "csv"]) == EXIT_OK
    shown = capsys.readouterr().out
    assert '"provenance": "analytic"' in shown
    assert run(["history", "--show", "999"]) == EXIT_CONFIG
