import json
import subprocess
import sys

import pytest

from qperiod.cli import main
from qperiod.series import Series

BLOWUP = """\
rays:
  1 -1
  0 1
  -1 2
  -2 1
cones:
  1 2
  2 3
  3 4
  4 1
weights:
  3 0 1 1
  -1 1 -1 0
extend:
  -1 1
"""


@pytest.fixture
def blowup(tmp_path):
    path = tmp_path / "blowup.qp"
    path.write_text(BLOWUP)
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_fan_ages(capsys, blowup):
    code, out, _ = run(capsys, "fan", blowup, "--box")
    assert code == 0
    assert out.splitlines()[0] == "ages: 0, 2/3, 4/3"


def test_fan_p1xp1(capsys, tmp_path):
    path = tmp_path / "p1p1.qp"
    path.write_text("rays:\n  1 0\n  0 1\n  -1 0\n  0 -1\ncones:\n  1 2\n  2 3\n  3 4\n  4 1\n")
    code, out, _ = run(capsys, "fan", str(path), "--box")
    assert out.splitlines() == ["ages: 0", "  box (0, 0) age 0"]


def test_fan_quartic_ambient(capsys):
    code, out, _ = run(capsys, "fan", "B_{1,16/3}", "--box", "--fano")
    assert out.splitlines()[0] == "ages: 0, 1, 2"


def test_period_regularised(capsys, blowup):
    code, out, _ = run(capsys, "period", blowup, "--order", "6", "--regularize")
    assert code == 0
    assert out.splitlines()[-1] == "t^6: 20*x^3 + 120*x"


def test_period_order_zero(capsys, blowup):
    assert run(capsys, "period", blowup, "--order", "0")[1] == "t^0: 1\n"


def test_period_json_round_trip(capsys, blowup):
    code, out, _ = run(capsys, "period", blowup, "--order", "6", "--json")
    s = Series.from_json(json.loads(out))
    _, text, _ = run(capsys, "period", blowup, "--order", "6")
    assert "\n".join(s.lines()) + "\n" == text


def test_period_is_deterministic(capsys, blowup):
    a = run(capsys, "period", blowup, "--order", "8", "--json")[1]
    b = run(capsys, "period", blowup, "--order", "8", "--json")[1]
    assert a == b


def test_lift_two_is_a_shape_error(capsys):
    code, _, err = run(capsys, "period", "B_{1,16/3}", "--lift", "2")
    assert code == 3
    assert "asymptotic shape violation" in err


def test_laurent_document(capsys, tmp_path):
    path = tmp_path / "p2.qp"
    path.write_text("laurent: x + y + 1/(x*y)\n")
    assert run(capsys, "period", str(path), "--order", "6")[1] == "t^0: 1\nt^3: 6\nt^6: 90\n"


def test_order_cap(capsys, blowup, monkeypatch):
    monkeypatch.setenv("QP_ORDER_CAP", "5")
    code, _, err = run(capsys, "period", blowup, "--order", "6")
    assert code == 2 and "QP_ORDER_CAP" in err


def test_input_error_exit_code(capsys, tmp_path):
    path = tmp_path / "bad.qp"
    path.write_text("rays:\n  1 x\n")
    code, _, err = run(capsys, "fan", str(path))
    assert code == 2 and "line 2" in err


def test_unknown_family(capsys):
    assert run(capsys, "match", "X_{9,9}")[0] == 2


def test_match_pass(capsys):
    code, out, _ = run(capsys, "match", "X_{1,7/3}", "--order", "4", "--show")
    assert code == 0
    assert out.splitlines()[0].startswith("X_{1,7/3}: pass")
    assert out.splitlines()[1:] == ["t^0: 1", "t^2: 112", "t^3: 1650", "t^4: 48048"]


def test_match_skipped(capsys):
    code, out, _ = run(capsys, "match", "X_{5,5/3}")
    assert (code, out) == (0, "X_{5,5/3}: skipped: missing good model\n")


def test_table_order_two(capsys):
    code, out, _ = run(capsys, "table", "--order", "2")
    assert code == 0
    assert out.splitlines()[-1] == "summary: pass 25, quantum-only 1, skipped 3"


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "qperiod", "match", "P(1,1,3)", "--order", "4"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith("P(1,1,3): pass")
