import json
import subprocess
import sys

import pytest

from mixedquiver.cli import main
from mixedquiver.quiver import model_quiver


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_trstar_worked_example(capsys):
    code, out, _ = run(capsys, "trstar", "--r", "7", "--s", "2", "--perm", "(1 4 5)(2 6 7)", "--passive", "2,3")
    assert code == 0
    assert out.strip() == "(1 7 ~2 ~4)(~5 6)(3)"


def test_sigma_rs_emit(capsys):
    code, out, _ = run(capsys, "sigma-rs", "--r", "2", "--s", "1")
    assert (code, out.strip()) == (0, "-1 (Y Z) + (Y ~Z)")
    code, out, _ = run(capsys, "sigma-rs", "--r", "2", "--s", "1", "--emit", "latex")
    assert out.strip() == r"-\operatorname{tr}(Y_{Y} Y_{Z}) + \operatorname{tr}(Y_{Y} Y_{Z}^{T})"


def test_cycles_from_file(capsys, tmp_path):
    path = tmp_path / "q.json"
    path.write_text(json.dumps(model_quiver().to_json()))
    code, out, _ = run(capsys, "cycles", "--quiver", str(path), "--max-len", "2")
    assert code == 0
    assert out.split("\n")[:4] == ["(X)", "(X X)  (not primitive)", "(Y Z)", "(Y ~Z)"]


def test_cayley_hamilton_d1(capsys):
    code, out, _ = run(capsys, "verify", "relations", "--r", "2", "--s", "0", "--dims", "1:1", "--trials", "30", "--seed", "1")
    assert code == 0 and out.startswith("PASS")


def test_failed_assertion_exits_1(capsys):
    code, out, _ = run(
        capsys, "verify", "relations", "--r", "1", "--dims", "1:1", "--trials", "5", "--seed", "1", "--expect", "vanish"
    )
    assert code == 1 and out.startswith("FAIL")


def test_report_is_reproducible(tmp_path, capsys):
    paths = []
    for k in range(2):
        out = tmp_path / f"r{k}.json"
        code, _, _ = run(
            capsys, "verify", "relations", "--r", "3", "--s", "1", "--dims", "1:2,2:2",
            "--trials", "20", "--seed", "7", "--field", "fp:2305843009213693951", "--out", str(out),
        )
        assert code == 0
        paths.append(out)
    a, b = (json.loads(p.read_text()) for p in paths)
    assert set(a) >= {"items", "timing", "passed"}
    a.pop("timing"), b.pop("timing")
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)
    item = a["items"][0]
    assert {"expr", "trials", "outcome", "prob_bound"} <= set(item)
    assert "ms" not in item


def test_counterexample_report_has_witness(tmp_path, capsys):
    out = tmp_path / "r.json"
    code, _, _ = run(capsys, "verify", "relations", "--r", "2", "--s", "1", "--dims", "1:2,2:2", "--seed", "3", "--out", str(out))
    assert code == 0  # r <= d, so a counterexample is the expected outcome
    item = json.loads(out.read_text())["items"][0]
    assert item["outcome"] == "counterexample" and "witness" in item


def test_config_file_and_precedence(tmp_path, capsys):
    cfg = tmp_path / "c.toml"
    cfg.write_text('seed = 4\ntrials = 7\n[verify.relations]\ndims = "1:1"\n')
    out = tmp_path / "r.json"
    code, _, _ = run(capsys, "verify", "relations", "--config", str(cfg), "--r", "2", "--out", str(out))
    assert code == 0
    assert json.loads(out.read_text())["items"][0]["trials"] == 7
    code, _, _ = run(capsys, "verify", "relations", "--config", str(cfg), "--r", "2", "--trials", "9", "--out", str(out))
    assert json.loads(out.read_text())["items"][0]["trials"] == 9


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "relations", "--r", "2", "--dims", "1:1"],  # no seed
        ["verify", "relations", "--r", "2", "--dims", "1:1", "--seed", "1", "--field", "gf4"],
        ["verify", "relations", "--r", "2", "--dims", "1:1", "--seed", "1", "--trials", "0"],
        ["trstar", "--r", "3", "--perm", "(1 2"],
        ["cycles", "--quiver", "/nonexistent.json"],
        ["sigma-rs", "--r", "9", "--r-cap", "8"],
        ["identities", "--N", "3", "--n", "2", "--r", "2", "--which", "genvanish"],
        ["verify", "relations", "--r", "3", "--dims", "1:2", "--seed", "1", "--field", "fp:2"],  # 1/6 has no value mod 2
    ],
)
def test_config_errors_exit_2(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert json.loads(err)["error"]


def test_bad_toml_exits_2(tmp_path, capsys):
    cfg = tmp_path / "bad.toml"
    cfg.write_text('seed = "x\n')
    assert run(capsys, "verify", "relations", "--config", str(cfg), "--r", "2")[0] == 2


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_identities(capsys):
    code, out, _ = run(capsys, "identities", "--which", "genvanish", "--N", "6", "--n", "3", "--r", "5")
    assert code == 0
    lines = out.strip().split("\n")
    assert len(lines) == 11 and all(line.startswith("PASS") for line in lines)


def test_ortho_and_suitable_and_span(capsys):
    code, out, _ = run(capsys, "ortho", "--m", "2", "--d", "2", "--len", "3", "--trials", "3", "--words", "2", "--seed", "1")
    assert code == 0 and "FAIL" not in out
    code, out, _ = run(capsys, "verify", "suitable", "--r", "3", "--s", "1", "--dims", "1:2,2:2", "--layout", "q0:3", "--trials", "10", "--seed", "2")
    assert code == 0 and out.startswith("PASS")
    code, out, _ = run(capsys, "span", "--rbar", "X:1,Y:1,Z:1", "--dims", "1:2,2:2", "--points", "12", "--seed", "1")
    assert (code, out.strip()) == (0, "5")


def test_invariance_suite(capsys):
    code, out, _ = run(capsys, "verify", "invariance", "--dims", "1:2,2:2", "--max-len", "2", "--r", "2", "--s", "1", "--trials", "5", "--seed", "1", "--format", "json")
    assert code == 0
    report = json.loads(out)
    assert report["passed"] and all(i["outcome"] == "invariant" for i in report["items"])


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "mixedquiver", "trstar", "--r", "7", "--s", "2", "--perm", "(1 4 5)(2 6 7)", "--passive", "2,3"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0 and proc.stdout.strip() == "(1 7 ~2 ~4)(~5 6)(3)"
