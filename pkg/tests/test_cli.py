import json
import subprocess
import sys

import pytest

from powertower.cli import main


def run(capsys, *argv):
    try:
        code = main(list(argv))
    except SystemExit as exc:  # argparse usage errors
        code = exc.code
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("text", [
    "2^^3 * 2^^3 = 4^^2",
    "(1/2)^^3 * (1/2)^^3 = (1/4)^^3",
    "(2^(-1/2))^^2 * (2^(-1/2))^^2 = (1/2)^^3",
])
def test_verify_identities_exit_zero(capsys, text):
    code, out, _ = run(capsys, "--format", "json", "verify", text)
    assert code == 0
    data = json.loads(out)
    assert data["verdict"] == "Equal" and data["exact"] is True
    assert data["method"] != "IntervalSeparation"


def test_verify_not_equal_and_parse_error(capsys):
    code, out, _ = run(capsys, "verify", "2^^2 * 2^^2 = 4^^2")
    assert code == 1 and out.startswith("NotEqual")
    code, _, err = run(capsys, "verify", "2^^")
    assert code == 3
    assert "line 1, column 4" in err
    code, _, _ = run(capsys, "verify", "2^^3")
    assert code == 3
    code, _, err = run(capsys, "verify", "3^^2 * 2^^2 = 2^^2")
    assert code == 3 and "not an integer power" in err


def test_verify_unknown_exit_two(capsys):
    # a true identity (2^(2^(1/2)) = 2 * 2^(2^(1/2) - 1) one level down) that the
    # structural rules do not see, so only intervals remain and they cannot prove it
    code, out, _ = run(capsys, "verify", "2^(2^(2^(2^(1/2)))) = 2^(2^(2*2^(2^(1/2))*2^(-1)))")
    assert code == 2
    assert out.startswith("Unknown [IntervalSeparation]")


def test_eval_examples(capsys):
    code, out, _ = run(capsys, "eval", "2^^3")
    assert code == 0
    assert out.splitlines() == ["[16, 16]", "canonical: 2^4"]
    code, out, _ = run(capsys, "--format", "json", "eval", "--bits", "128", "(1/2)^^3")
    data = json.loads(out)
    assert data["lo"].startswith("0.61254732") and data["hi"].startswith("0.61254732")
    assert data["canonical"] == "2^(-1*2^(-1/2))"
    code, out, _ = run(capsys, "--format", "json", "eval", "2^^6")
    assert code == 4
    assert json.loads(out)["error"] == "MagnitudeError"


def test_canonical(capsys):
    code, out, _ = run(capsys, "canonical", "(1/2)^^3 * (1/2)^^3")
    assert code == 0 and out.strip() == "2^(-2*2^(-1/2))"


def test_search_and_files(capsys, tmp_path):
    out_path = tmp_path / "res.jsonl"
    code, out, _ = run(capsys, "search", "--k", "3", "--m", "3", "--n", "3", "--max-num", "4",
                       "--max-den", "4", "--output", str(out_path), "--checkpoint", str(tmp_path / "ck"))
    assert code == 0
    assert "(-1, -1, -2)" in out
    summary = json.loads((tmp_path / "res.jsonl.summary.json").read_text())
    assert ["-1/1", "-1/1", "-2/1"] in summary["nontrivial"]


def test_search_error_codes(capsys, tmp_path):
    ck = tmp_path / "bad.ckpt"
    ck.write_text("garbage\n")
    code, _, _ = run(capsys, "search", "--k", "2", "--m", "2", "--n", "2", "--max-num", "1", "--max-den", "1",
                     "--output", str(tmp_path / "o.jsonl"), "--checkpoint", str(ck))
    assert code == 6
    blocker = tmp_path / "file"
    blocker.write_text("")
    code, _, _ = run(capsys, "search", "--k", "2", "--m", "2", "--n", "2", "--max-num", "1", "--max-den", "1",
                     "--output", str(blocker / "sub" / "o.jsonl"))
    assert code == 5
    code, _, _ = run(capsys, "search", "--k", "1", "--m", "2", "--n", "2", "--max-num", "1", "--max-den", "1")
    assert code == 3


def test_family_scan_and_solve_gamma(capsys):
    code, out, _ = run(capsys, "family-scan", "--heights", "2,2,3", "--max-num", "20", "--max-den", "6")
    assert code == 0 and out.strip() == "{-1/2, 0}"
    code, out, _ = run(capsys, "--format", "json", "solve-gamma", "--a", "-1/2", "--b", "-1/2",
                       "--k", "2", "--m", "2", "--n", "3")
    assert code == 0 and json.loads(out)["solutions"] == ["-1"]
    code, out, _ = run(capsys, "solve-gamma", "--a", "1", "--b", "1", "--k", "2", "--m", "2", "--n", "4")
    assert code == 2


def test_usage_errors_exit_three(capsys):
    assert run(capsys, "--base", "4", "verify", "2=2")[0] == 3
    assert run(capsys, "eval", "--bits", "8", "2")[0] == 3
    assert run(capsys)[0] == 3


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "powertower", "verify", "2^^3 * 2^^3 = 4^^2"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("Equal")
