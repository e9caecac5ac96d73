import json
import subprocess
import sys

import pytest

from heckecv.cli import SweepRecord, admissible_cases, build_parser, main


def run_cli(*argv):
    proc = subprocess.run([sys.executable, "-m", "heckecv.cli", *argv],
                          capture_output=True, text=True, timeout=600)
    return proc.returncode, proc.stdout, proc.stderr


def test_value_command_inprocess(capsys):
    rc = main(["value", "--disc", "7", "--twist", "1", "--weight", "1"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "W = +1" in out
    assert "0.966655852808" in out


def test_value_json_output(capsys):
    rc = main(["value", "--disc", "7", "--json"])
    out = capsys.readouterr().out
    assert rc == 0
    rec = SweepRecord.from_json(out.strip())
    assert rec.W == 1 and rec.value_kind == "L"


def test_invalid_discriminant_exit_2(capsys):
    rc = main(["value", "--disc", "12"])
    err = capsys.readouterr().err
    assert rc == 2
    assert "not a valid discriminant" in err


def test_derivative_warns_on_even_sign(capsys):
    rc = main(["derivative", "--disc", "7", "--twist", "1", "--weight", "1"])
    captured = capsys.readouterr()
    assert rc == 0
    assert "not meaningful" in captured.err
    assert "L'(k)" in captured.out


def test_rootnumber_command(capsys):
    rc = main(["rootnumber", "--disc", "11"])
    out = capsys.readouterr().out
    assert rc == 0
    data = json.loads(out)
    assert data["W"] == -1


def test_charsum_command(tmp_path, capsys):
    out_file = tmp_path / "survey.csv"
    rc = main(["charsum", "--disc", "7", "--twist", "1", "--samples", "5",
               "--seed", "3", "--out", str(out_file)])
    captured = capsys.readouterr()
    assert rc == 0
    lines = out_file.read_text().strip().split("\n")
    assert lines[0] == "D,d,v,M,w,S,bound_ratio"
    assert len(lines) == 6
    summary = json.loads(captured.out.strip().split("\n")[-1])
    assert summary["seed"] == 3


def test_sweep_roundtrip_and_resume(tmp_path, capsys):
    out = tmp_path / "sweep.jsonl"
    rc = main(["sweep", "--dmax", "25", "--twists", "1,5", "--weights", "1",
               "--out", str(out)])
    capsys.readouterr()
    assert rc == 0
    first = out.read_text()
    recs = [SweepRecord.from_json(l) for l in first.strip().split("\n")]
    keys = [r.key for r in recs]
    assert len(set(keys)) == len(keys)
    assert keys == [c for c in admissible_cases(25, [1, 5], [1])]
    # resume adds nothing
    rc = main(["sweep", "--dmax", "25", "--twists", "1,5", "--weights", "1",
               "--out", str(out), "--resume"])
    capsys.readouterr()
    assert rc == 0
    assert out.read_text() == first
    # round trip identity
    for r in recs:
        assert SweepRecord.from_json(r.to_json()) == r


def test_sweep_rejects_unknown_fields():
    rec = SweepRecord.from_json(
        '{"D":7,"W":1,"W_residual":1e-14,"d":1,"h":1,"k":1,"predicted_order":"0",'
        '"scale":0.48,"schema_version":1,"tol":1e-08,"trunc":{},"value":0.96,'
        '"value_kind":"L","variant":0}')
    assert rec.D == 7
    with pytest.raises(ValueError, match="unknown fields"):
        SweepRecord.from_json(rec.to_json()[:-1] + ',"extra":1}')
    with pytest.raises(ValueError, match="missing fields"):
        SweepRecord.from_json('{"schema_version":1}')


def test_sweep_thread_determinism(tmp_path, capsys):
    a = tmp_path / "a.jsonl"
    b = tmp_path / "b.jsonl"
    args = ["--dmax", "40", "--twists", "1,-3", "--weights", "1,2"]
    assert main(["sweep", *args, "--out", str(a), "--threads", "1"]) == 0
    capsys.readouterr()
    assert main(["sweep", *args, "--out", str(b), "--threads", "4"]) == 0
    capsys.readouterr()
    assert a.read_bytes() == b.read_bytes()


def test_admissible_cases_filtering():
    cases = admissible_cases(25, [1], [1, 2])
    Ds = {c[0] for c in cases}
    assert Ds == {7, 8, 11, 15, 19, 23, 24}
    # h(-23) = 3 kills k = 2 there
    assert (23, 1, 2, 0) not in cases
    assert (23, 1, 1, 0) in cases
    # div-8 fields carry two variants
    assert (8, 1, 1, 0) in cases and (8, 1, 1, 1) in cases


def test_parser_covers_subcommands():
    ap = build_parser()
    for cmd in ("value", "derivative", "rootnumber", "charsum", "sweep", "selftest"):
        assert cmd in ap.format_help()


def test_cli_subprocess_smoke():
    rc, out, err = run_cli("value", "--disc", "8", "--twist", "1", "--weight", "1",
                           "--variant", "1", "--json")
    assert rc == 0, err
    rec = json.loads(out)
    assert rec["W"] == -1
