import json
import subprocess
import sys

import pytest

from mwproblem.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_eval_exact(capsys):
    assert run(capsys, "eval", "derham:p=1/3", "1/8") == (0, "1/27\n", "")
    assert run(capsys, "eval", "avg:m=2:P=0,0,1/3,2/3", "1/2")[1] == "1/6\n"
    assert run(capsys, "eval", "derham:p=1/3", "3/2^2")[1] == "5/9\n"


def test_eval_enclosure(capsys):
    code, out, _ = run(capsys, "eval", "derham:p=1/2", "1/3", "--digits", "20", "--format", "json")
    payload = json.loads(out)
    assert code == 0 and payload["width"] == "1/1048576"
    code, out, _ = run(capsys, "eval", "derham:p=1/3", "1/3", "--digits", "2")
    assert out == "[1/9, 1/3]\n"


def test_eval_density(capsys):
    code, out, _ = run(capsys, "eval", "int:density=uniform", "1/4", "--format", "json")
    payload = json.loads(out)
    assert code == 0 and payload["quadrature_tol"] > 0


def test_table(capsys, tmp_path):
    code, out, _ = run(capsys, "table", "derham:p=1/3", "--level", "2")
    rows = out.splitlines()
    assert rows[0] == "x_num,x_den,value_num,value_den,value_float"
    assert [r.split(",")[2:4] for r in rows[1:]] == [["0", "1"], ["1", "9"], ["1", "3"], ["5", "9"], ["1", "1"]]
    dest = tmp_path / "t.csv"
    assert main(["table", "derham:p=1/3", "--level", "2", "--out", str(dest)]) == 0
    assert dest.read_text() == out


def test_attractor(capsys):
    code, out, _ = run(capsys, "attractor", "m=2:K=2,3", "2")
    assert out == "lo_num,lo_den,hi_num,hi_den\n5,8,3,4\n7,8,1,1\n"
    assert run(capsys, "attractor", "m=2:P=0,0,1/3,2/3", "1", "--format", "text")[1] == "[1/2, 1/1]\n"


def test_moments(capsys):
    code, out, err = run(capsys, "moments", "avg:m=2:P=0,0,1/3,2/3", "--N", "12", "--limit")
    assert code == 0 and out.splitlines()[-1] == "12,-1,1,-1.0"
    code, out, err = run(capsys, "moments", "int:atoms=(1/2:1)", "--N", "6")
    assert "verdict: PASS" in err and out.startswith("k,n,delta_num")
    code, out, _ = run(capsys, "moments", "avg:m=2:P=0,0,1/3,2/3", "--N", "8", "--format", "text")
    assert "verdict: FAIL" in out and "Delta(0,7) = -1/6 < 0" in out


def test_verify(capsys, tmp_path):
    code, out, _ = run(capsys, "verify", "--suite", "derham", "--format", "json")
    assert code == 0 and json.loads(out)["suite_id"] == "derham"
    code, out, _ = run(capsys, "verify", "--suite", "solutions", "--samples", "5", "--mutate", "half-value")
    assert code == 1 and "FAIL" in out


@pytest.mark.parametrize("argv,code", [
    (["eval", "derham:p=2", "1/2"], 3),
    (["eval", "derham:q=2", "1/2"], 2),
    (["eval", "derham:p=1/3", "abc"], 2),
    (["eval", "derham:p=1/3", "3/2"], 3),
    (["table", "derham:p=1/3", "--level", "40"], 2),
    (["attractor", "m=2:K=0,2", "30"], 3),
    (["moments", "derham:p=1/3", "--N", "4", "--K", "3", "--Nmax", "3"], 3),
    (["table", "derham:p=1/3", "--out", "/nonexistent/dir/x.csv"], 4),
    (["verify", "--mutate", "bogus"], 2),
])
def test_exit_codes(capsys, argv, code):
    try:
        got = main(argv)
    except SystemExit as exc:
        got = exc.code
    assert got == code


def test_parse_error_shows_caret(capsys):
    code, _, err = run(capsys, "eval", "derham:q=2", "1/2")
    assert code == 2 and err.splitlines()[-1].strip() == "^"


def test_console_script_entry():
    proc = subprocess.run([sys.executable, "-m", "mwproblem.cli", "eval", "derham:p=1/3", "1/8"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "1/27\n"
