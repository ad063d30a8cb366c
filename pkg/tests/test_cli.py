import json
import subprocess
import sys

import pytest

from sessenc.cli import main

from conftest import PROGRAMS

SYS = str(PROGRAMS / "sys.spi")


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_encode_type(capsys):
    assert run(capsys, "encode-type", "rec X.+{l:X}")[:2] == (0, "rec X.lo[<l:~X>]\n")
    assert run(capsys, "encode-type", "rec X.&{l:X}")[:2] == (0, "rec X.li[<l:X>]\n")
    assert run(capsys, "encode-type", "end")[1] == "empty[]\n"


def test_relations(capsys):
    assert run(capsys, "dual", "rec X.&{l:X}", "rec X.+{l:X}")[:2] == (0, "true\n")
    assert run(capsys, "dual", "end", "!unit.end")[:2] == (1, "false\n")
    assert run(capsys, "dual-pi", "rec X.li[<l:X>]", "rec X.lo[<l:~X>]")[:2] == (0, "true\n")
    assert run(capsys, "sub", "+{l:end, m:end}", "+{l:end}")[0] == 0
    assert run(capsys, "sub", "--pi", "li[unit]", "lo[unit]")[0] == 1
    assert run(capsys, "equiv", "rec X.!unit.X", "!unit.rec X.!unit.X")[0] == 0


def test_complement(capsys):
    assert run(capsys, "complement", "!unit.end")[1] == "?unit.end\n"
    assert run(capsys, "complement", "--pi", "li[unit]")[1] == "lo[unit]\n"
    assert run(capsys, "complement", "#unit")[0] == 2


def test_check_and_check_pi(capsys, tmp_path):
    code, out, _ = run(capsys, "check", SYS)
    assert code == 0 and out.startswith("accepted")
    for rule in ("T-Rep", "T-In", "T-Select", "T-Out", "T-Nil"):
        assert f"[{rule}]" in out
    assert "rec X.+{l:X} ≼s +{l:rec X.+{l:X}}" in out
    assert run(capsys, "check-pi", SYS)[0] == 0
    assert run(capsys, "check-pi", str(PROGRAMS / "sys_encoded.pi"))[0] == 0
    bad = tmp_path / "bad.spi"
    bad.write_text("(new x y:!unit.end)(x!().0 | x!().0 | y?(z:unit).0)")
    code, out, _ = run(capsys, "check", str(bad))
    assert code == 1 and out.startswith("rejected: linearity")
    free = tmp_path / "free.spi"
    free.write_text("a!().0")
    assert run(capsys, "check", str(free))[0] == 1
    assert run(capsys, "check", str(free), "--ctx", "a:#unit")[0] == 0


def test_encode(capsys):
    code, out, _ = run(capsys, "encode", SYS)
    assert code == 0 and out.strip() == (PROGRAMS / "sys_encoded.pi").read_text().strip()


def test_run_sys(capsys):
    code, out, _ = run(capsys, "run", SYS, "--steps", "4", "--rules-only")
    assert code == 0
    assert "rounds: R-ChanCom a || R-ChanCom b -> R-Sel v/w l -> ≡ start" in out
    code, out, _ = run(capsys, "run", SYS, "--encode", "--rules-only")
    assert "rounds: R-Com a || R-Com b -> R-Com c0 -> ↪ start" in out
    code, out, _ = run(capsys, "run", SYS, "--steps", "1")
    assert out.count("--rule") == 1


def test_run_reports_faults(capsys, tmp_path):
    f = tmp_path / "bad.pi"
    f.write_text("a!((), ()).0 | a?(x).0")
    code, out, _ = run(capsys, "run", str(f))
    assert code == 1 and "arity mismatch" in out


def test_correspond(capsys):
    code, out, _ = run(capsys, "correspond", SYS, "--depth", "2")
    assert code == 0
    assert out.splitlines() == ["PASS typing seed=None", "PASS soundness seed=None",
                                "PASS completeness seed=None", "PASS subject-reduction seed=None"]


def test_fuzz_seed_from_environment(capsys, monkeypatch):
    monkeypatch.setenv("SESSC_SEED", "42")
    code, out, _ = run(capsys, "--json", "fuzz", "--n", "3", "--depth", "2")
    data = json.loads(out)
    assert code == 0 and data["seed"] == 42 and data["failures"] == 0
    code, out, _ = run(capsys, "fuzz", "--n", "2", "--seed", "5", "--depth", "1")
    assert out.strip().endswith("over 2 processes, seed=5")
    monkeypatch.setenv("SESSC_SEED", "x")
    assert run(capsys, "fuzz", "--n", "1")[0] == 2


def test_json_output(capsys):
    code, out, _ = run(capsys, "dual", "--json", "end", "end")
    assert json.loads(out) == {"command": "dual", "ok": True, "relation": "dual", "verdict": True}
    code, out, _ = run(capsys, "--json", "run", SYS, "--steps", "4")
    data = json.loads(out)
    assert data["chain"][:3] == ["R-ChanCom", "R-ChanCom", "R-Sel"]
    assert data["returns_after"] == 3 and data["returns_up_to"] == "≡"
    assert data["rounds"] == [["R-ChanCom", "R-ChanCom"], ["R-Sel"]]


@pytest.mark.parametrize("argv", [
    ["encode-type", "!unit"],
    ["dual", "end", "rec X.X"],
    ["check", "/nonexistent.spi"],
    ["check", str(PROGRAMS / "sys_encoded.pi")],
    ["encode-type", "li[unit]"],
    ["frobnicate"],
    [],
])
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_parse_error_json(capsys):
    code, out, err = run(capsys, "--json", "encode-type", "!unit")
    assert code == 2 and "error" in json.loads(out) and "line 1" in err


def test_parse_pretty_prints(capsys):
    code, out, _ = run(capsys, "parse", SYS)
    assert code == 0 and out.startswith("(newc a:#(rec X.+{l:X}))")
    assert run(capsys, "parse", "--pi", "l#[unit]")[1] == "l#[unit]\n"


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "sessenc", "dual", "end", "end"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0 and res.stdout == "true\n"
