import csv
import json
import subprocess
import sys
import time

import pytest

from ntuple_erm import __version__
from ntuple_erm.cli import main, parse_args

SMALL = ["--tuples", "300", "--unlabeled", "300", "--test", "2000", "--epochs", "5"]


def run(argv):
    try:
        return main(argv)
    except SystemExit as exc:
        return exc.code


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_version_and_help_exit_zero(capsys):
    assert run(["--version"]) == 0
    assert __version__ in capsys.readouterr().out
    assert run(["train", "--help"]) == 0


@pytest.mark.parametrize("argv", [
    [],
    ["train", "--arch", "cnn"],
    ["bounds", "--delta", "abc"],
    ["nosuchcommand"],
    ["verify-coeffs", "--n-min", "1"],
])
def test_usage_errors_exit_two(argv, capsys):
    assert run(argv) == 2


def test_runtime_error_is_json_on_stderr(tmp_path, capsys):
    code = run(["eval", "--out", str(tmp_path)])
    assert code == 1
    record = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert record["error"] == "FileNotFoundError"
    assert "checkpoint" in record["message"]


def test_singular_training_setup_exits_one(tmp_path, capsys):
    code = run(["train", "--scenario", "mix", "--n", "2", "--tau", "0.5", "--out", str(tmp_path)] + SMALL)
    assert code == 1
    assert json.loads(capsys.readouterr().err.strip())["error"] == "SingularMixture"


def test_verify_coeffs_default_grid(tmp_path, capsys):
    start = time.perf_counter()
    assert run(["verify-coeffs", "--out", str(tmp_path)]) == 0
    assert time.perf_counter() - start < 5
    rows = read_csv(tmp_path / "verify_coeffs.csv")
    assert len({(r["kind"], r["N"], r["tau_plus"]) for r in rows}) == 4 * 7 * 9
    statuses = {r["status"] for r in rows}
    assert statuses <= {"OK", "SINGULAR"} and "SINGULAR" in statuses
    # the Mix pair at the balanced prior is the textbook singular case
    row = next(r for r in rows if (r["kind"], r["N"], r["tau_plus"]) == ("mix", "2", "0.5"))
    assert row["status"] == "SINGULAR"
    ok = [r for r in rows if r["status"] == "OK"]
    assert max(float(r["max_identity_residual"]) for r in ok) <= 1e-10
    assert capsys.readouterr().out.splitlines()[0].startswith("kind,N,tau_plus")
    assert json.loads((tmp_path / "manifest_verify_coeffs.json").read_text())["command"] == "verify-coeffs"


def test_verify_coeffs_large_n_skips_enumeration(capsys):
    assert run(["verify-coeffs", "--kinds", "sim", "--n-min", "25", "--n-max", "25", "--taus", "0.3"]) == 0
    rows = list(csv.DictReader(capsys.readouterr().out.splitlines()))
    assert rows[0]["status"] == "ENUM_TOO_LARGE"


def test_verify_coeffs_custom_subset(tmp_path, capsys):
    subset = tmp_path / "subset.txt"
    subset.write_text("N=2\n1,-1\n-1,1\n")
    assert run(["verify-coeffs", "--kinds", "sim", "--n-max", "2", "--taus", "0.3",
                "--subset-file", str(subset)]) == 0
    rows = list(csv.DictReader(capsys.readouterr().out.splitlines()))
    assert [r["kind"] for r in rows] == ["sim", "sim", "custom", "custom"]


def test_gen_file_contract(tmp_path):
    assert run(["gen", "--out", str(tmp_path), "--tuples", "7", "--unlabeled", "5", "--test", "4",
                "--n", "3"]) == 0
    names = sorted(p.name for p in tmp_path.iterdir())
    assert names == ["manifest_gen.json", "test.csv", "tuples.csv", "tuples.hidden.csv",
                     "unlabeled.csv", "unlabeled.hidden.csv"]
    tuples = read_csv(tmp_path / "tuples.csv")
    assert list(tuples[0]) == ["tuple_id", "slot", "f0", "f1"]
    assert len(tuples) == 21 and len({r["tuple_id"] for r in tuples}) == 7
    assert len(read_csv(tmp_path / "unlabeled.csv")) == 5
    assert "label" in read_csv(tmp_path / "test.csv")[0]
    manifest = json.loads((tmp_path / "manifest_gen.json").read_text())
    assert manifest["seed"] == 0 and manifest["version"] == __version__
    assert "time" not in json.dumps(manifest)


def test_train_then_eval(tmp_path, capsys):
    assert run(["train", "--out", str(tmp_path)] + SMALL) == 0
    for name in ("metrics.jsonl", "epochs.jsonl", "checkpoint.json", "train_summary.json", "manifest_train.json"):
        assert (tmp_path / name).exists()
    steps = [json.loads(line) for line in (tmp_path / "metrics.jsonl").read_text().splitlines()]
    assert set(steps[0]) == {"step", "tuple_term", "unlabeled_term", "raw", "corrected"}
    assert [s["step"] for s in steps] == list(range(len(steps)))
    capsys.readouterr()
    assert run(["eval", "--out", str(tmp_path)]) == 0
    result = json.loads(capsys.readouterr().out)
    assert result["n_test"] == 2000
    assert result["accuracy"] >= result["supervised_accuracy"] - 0.03
    row = read_csv(tmp_path / "eval.csv")[0]
    assert float(row["accuracy"]) == pytest.approx(result["accuracy"])


def test_train_from_generated_data(tmp_path):
    data = tmp_path / "data"
    assert run(["gen", "--out", str(data), "--seed", "4"] + SMALL[:6]) == 0
    out = tmp_path / "run"
    assert run(["train", "--data-dir", str(data), "--out", str(out), "--seed", "4"] + SMALL) == 0
    summary = json.loads((out / "train_summary.json").read_text())
    assert summary["abs"]["test_accuracy"] > 0.8


def test_repeat_runs_are_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert run(["train", "--out", str(d), "--seed", "9", "--arch", "mlp", "--hidden", "4"] + SMALL) == 0
    for name in ("metrics.jsonl", "epochs.jsonl", "checkpoint.json", "manifest_train.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_config_precedence(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"tau": 0.4, "epochs": 7, "lr": 0.01}))
    args = parse_args(["train", "--config", str(cfg), "--epochs", "3"])
    assert (args.tau, args.epochs, args.lr) == (0.4, 3, 0.01)
    assert parse_args(["train"]).tau == 0.7


def test_bundled_config_by_name():
    args = parse_args(["train", "--config", "correction_demo"])
    assert (args.scenario, args.arch, args.hidden) == ("notallneg", "mlp", 100)


def test_unknown_config_key_is_a_usage_error(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"learning_rate_typo": 1}))
    assert run(["train", "--config", str(cfg)]) == 2


def test_manifest_reproduces_the_run(tmp_path):
    first = tmp_path / "first"
    assert run(["train", "--out", str(first), "--seed", "3", "--tau", "0.4"] + SMALL) == 0
    second = tmp_path / "second"
    assert run(["train", "--config", str(first / "manifest_train.json"), "--out", str(second)]) == 0
    assert (first / "checkpoint.json").read_bytes() == (second / "checkpoint.json").read_bytes()
    assert (first / "metrics.jsonl").read_bytes() == (second / "metrics.jsonl").read_bytes()


def test_compare_corrections_writes_both_curves(tmp_path):
    assert run(["train", "--out", str(tmp_path), "--compare-corrections", "none,abs"] + SMALL) == 0
    for c in ("none", "abs"):
        assert (tmp_path / f"metrics_{c}.jsonl").exists()
        assert (tmp_path / f"epochs_{c}.jsonl").exists()
    assert set(json.loads((tmp_path / "train_summary.json").read_text())) == {"none", "abs"}


def test_bounds_and_unbiasedness(tmp_path):
    assert run(["bounds", "--out", str(tmp_path), "--sizes", "100,200"]) == 0
    rows = read_csv(tmp_path / "bounds.csv")
    assert float(rows[0]["bound"]) / float(rows[1]["bound"]) == pytest.approx(2 ** 0.5, rel=1e-12)
    assert run(["unbiasedness", "--out", str(tmp_path), "--n-b", "500", "--n-u", "500", "--repeats", "10",
                "--supervised-size", "20000"]) == 0
    report = json.loads((tmp_path / "unbiasedness.json").read_text())
    assert report["z_score"] <= 3 and report["repeats"] == 10


def test_curve_needs_three_sizes(tmp_path):
    assert run(["curve", "--out", str(tmp_path), "--sizes", "10,20"]) == 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "ntuple_erm", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and __version__ in proc.stdout
