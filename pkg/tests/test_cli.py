import csv
import io
import json

import pytest

import runner
from detection.sampling import FUZZ_STREAM, philox
from fuzz_runner import replay_bundle
from main import main
from quantum.random_ops import constructed_kernel_effect, random_state
from scenarios.presets import ScenarioReport
from tools.report import Check


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for name in ("INTERFEROMETRY_SEED", "INTERFEROMETRY_WORKERS", "INTERFEROMETRY_FORMAT"):
        monkeypatch.delenv(name, raising=False)


def run_json(tmp_path, *argv, name="report.json"):
    out = tmp_path / name
    code = main([*argv, "--output", str(out)])
    return code, json.loads(out.read_text())


def test_coincidence_run_reports_zero(tmp_path):
    code, report = run_json(
        tmp_path, "run", "--scenario", "coincidence_b", "--trials", "1000000", "--seed", "42"
    )
    assert code == 0
    assert report["seed"] == 42
    assert report["tables"]["counts"]["coincidence"] == 0
    assert report["config"]["params"]["trials"] == 1_000_000
    assert all(c["pass"] for c in report["checks"])
    assert {"name", "pass", "residual"} == set(report["checks"][0])


def test_fringe_csv_has_one_row_per_phase(tmp_path):
    out = tmp_path / "fringe.csv"
    code = main(
        ["run", "--scenario", "mach_zehnder_a", "--phase-steps", "64", "--format", "csv",
         "--seed", "1", "--trials", "1000", "--output", str(out)]
    )
    assert code == 0
    rows = list(csv.reader(io.StringIO(out.read_text())))
    assert rows[0] == ["phase", "probability"]
    assert len(rows) == 65


def test_csv_matches_json(tmp_path):
    common = ["run", "--scenario", "mach_zehnder_a", "--phase-steps", "32", "--seed", "2"]
    _, report = run_json(tmp_path, *common)
    out = tmp_path / "fringe.csv"
    assert main([*common, "--format", "csv", "--output", str(out)]) == 0
    rows = list(csv.reader(io.StringIO(out.read_text())))[1:]
    assert [[float(x) for x in row] for row in rows] == report["tables"]["fringe"]


def test_serial_run_matches_outcome_tree(tmp_path):
    code, report = run_json(
        tmp_path, "run", "--scenario", "serial_c", "--eta1", "0.5", "--eta2", "0.5", "--seed", "3"
    )
    assert code == 0
    checks = {c["name"]: c for c in report["checks"]}
    assert checks["outcome_tree"]["pass"]
    assert checks["outcome_tree"]["residual"] <= 1e-12


def test_reports_are_byte_identical(tmp_path):
    argv = ["run", "--scenario", "two_slit", "--seed", "9", "--trials", "5000"]
    main([*argv, "--output", str(tmp_path / "a.json")])
    main([*argv, "--output", str(tmp_path / "b.json"), "--workers", "1"])
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


def test_worker_count_only_changes_the_recorded_config(tmp_path):
    argv = ["run", "--scenario", "coincidence_b", "--seed", "9", "--trials", "300000"]
    reports = [run_json(tmp_path, *argv, "--workers", str(w), name=f"{w}.json")[1] for w in (1, 2, 4)]
    assert reports[0]["tables"] == reports[1]["tables"] == reports[2]["tables"]


def test_config_file_is_applied(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("scenario = serial_c\nseed = 4\ntrials = 100\nweight_i = 0.25\n")
    code, report = run_json(tmp_path, "run", "--config", str(cfg), "--seed", "5")
    assert code == 0
    assert report["seed"] == 5
    assert report["config"]["params"]["weight_i"] == 0.25


def test_usage_errors_exit_2(tmp_path):
    assert main(["run", "--scenario", "nope", "--seed", "1"]) == 2
    assert main(["run", "--scenario", "serial_c", "--eta1", "2", "--seed", "1"]) == 2
    assert main(["run", "--scenario", "serial_c", "--tolerance", "bogus=1"]) == 2
    assert main(["run", "--config", str(tmp_path / "missing.cfg")]) == 2
    assert main(["fuzz", "--dims", "1..40"]) == 2
    with pytest.raises(SystemExit) as excinfo:
        main(["run", "--workers", "many"])
    assert excinfo.value.code == 2


def test_failed_check_exits_1_and_still_writes(tmp_path, monkeypatch):
    def failing_scenario(name, params, seed, workers, tol):
        return ScenarioReport(name, {"trials": 0}, seed, {}, [Check("forced", False, 1.0)])

    monkeypatch.setattr(runner, "run_scenario", failing_scenario)
    code, report = run_json(tmp_path, "run", "--scenario", "serial_c", "--seed", "1")
    assert code == 1
    assert report["checks"] == [{"name": "forced", "pass": False, "residual": 1.0}]


def test_fuzz_small_range(tmp_path):
    code, report = run_json(
        tmp_path, "fuzz", "--dims", "2..4", "--trials", "20", "--seed", "7", "--samples", "64"
    )
    assert code == 0
    assert [row["dim"] for row in report["tables"]["aggregate"]] == [2, 3, 4]
    for row in report["tables"]["aggregate"]:
        assert row["instances"] == 20
        assert row["failures"] == 0
        assert row["max_normalized_expectation"] <= 1e-10
        assert row["max_normalized_kernel_residual"] <= 1e-10


def test_fuzz_acceptance_run(tmp_path):
    code, report = run_json(tmp_path, "fuzz", "--dims", "2..8", "--trials", "1000", "--seed", "7")
    assert code == 0
    assert len(report["tables"]["aggregate"]) == 7


def test_fuzz_zero_trials(tmp_path):
    code, report = run_json(tmp_path, "fuzz", "--trials", "0", "--seed", "1")
    assert code == 0
    assert report["tables"]["aggregate"] == []
    assert report["checks"] == []


def test_fuzz_negative_control_produces_replay_bundle(tmp_path):
    code, report = run_json(
        tmp_path, "fuzz", "--trials", "0", "--seed", "1", "--inject-indefinite"
    )
    assert code == 1
    failure = report["tables"]["first_failure"]
    assert failure["reason"].startswith("rejected")
    replay = failure["replay"]
    assert replay["seed"] == 1
    assert replay["A"] == [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [-1.0, 0.0]]]
    assert {"psi1", "psi2", "substream"} <= set(replay)
    injected = [c for c in report["checks"] if c["name"] == "injected_indefinite"]
    assert injected[0]["residual"] >= 0.5


def test_fuzz_csv_failure_writes_replay_sidecar(tmp_path):
    out = tmp_path / "fuzz.csv"
    argv = ["fuzz", "--trials", "0", "--seed", "1", "--inject-indefinite", "--format", "csv"]
    assert main([*argv, "--output", str(out)]) == 1
    assert out.read_text().startswith("dim,instances,")
    failure = json.loads((tmp_path / "fuzz.csv.replay.json").read_text())
    assert failure["reason"].startswith("rejected")
    assert failure["replay"]["seed"] == 1
    assert failure["replay"]["A"] == [[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [-1.0, 0.0]]]


def test_fuzz_csv_to_stdout_puts_replay_on_stderr(capsys):
    argv = ["fuzz", "--trials", "0", "--seed", "1", "--inject-indefinite", "--format", "csv"]
    assert main(argv) == 1
    captured = capsys.readouterr()
    assert captured.out.startswith("dim,instances,")
    assert '"replay"' in captured.err
    assert '"psi1"' in captured.err


def test_replaying_the_negative_control_fails_again(tmp_path):
    code, first = run_json(
        tmp_path, "fuzz", "--trials", "0", "--seed", "1", "--inject-indefinite", name="first.json"
    )
    assert code == 1
    code, replayed = run_json(
        tmp_path, "fuzz", "--replay", str(tmp_path / "first.json"), name="replayed.json"
    )
    assert code == 1
    assert replayed["tables"]["replay"]["reason"].startswith("rejected")
    assert replayed["tables"]["replay"]["bundle"] == first["tables"]["first_failure"]["replay"]
    assert replayed["config"]["replay"] == str(tmp_path / "first.json")


def test_replaying_a_sound_instance_passes(tmp_path):
    rng = philox(11, FUZZ_STREAM, 3, 0)
    psi1, psi2 = random_state(rng, 3), random_state(rng, 3)
    effect = constructed_kernel_effect(rng, psi1, psi2)
    bundle = tmp_path / "bundle.replay.json"
    bundle.write_text(json.dumps(replay_bundle(11, 3, 0, effect.op, psi1, psi2)))
    code, report = run_json(tmp_path, "fuzz", "--replay", str(bundle))
    assert code == 0
    assert report["checks"][0]["name"] == "replay"
    assert report["checks"][0]["pass"]
    assert report["tables"]["aggregate"][0]["dim"] == 3


def test_unreadable_replay_bundle_is_a_usage_error(tmp_path):
    assert main(["fuzz", "--replay", str(tmp_path / "missing.json")]) == 2
    junk = tmp_path / "junk.json"
    junk.write_text(json.dumps({"tables": {"aggregate": []}}))
    assert main(["fuzz", "--replay", str(junk)]) == 2
