import json
import subprocess
import sys

import pytest

from fptrace import average_signature, load_code
from fptrace.cli import run


def _run(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_gen_then_verify(tmp_path, capsys):
    path = tmp_path / "c.code"
    assert _run(capsys, "gen", "random", "--n", "24", "--cols", "6", "--seed", "1", "--out", str(path))[0] == 0
    code = load_code(path)
    assert (code.n, code.M) == (24, 6)
    status, out, _ = _run(capsys, "verify", "--code", str(path), "--t", "2", "--T", "1")
    doc = json.loads(out)
    assert doc["property"] == "hamming_ltc"
    assert status == (0 if doc["holds"] else 1)


def test_verify_negative_exit(tmp_path, capsys):
    path = tmp_path / "id.code"
    path.write_text("2 2\n10\n01\n")
    status, out, _ = _run(capsys, "verify", "--code", str(path), "--t", "2", "--T", "1")
    assert status == 1
    assert json.loads(out)["witness"]["I1"] == [1]
    status, out, _ = _run(capsys, "verify", "--code", str(path), "--t", "2", "--mode", "euclidean", "--delta-sq", "1/4")
    assert status == 1 and json.loads(out)["delta_sq"] == "1/4"


def test_bad_row_exact(capsys):
    status, out, _ = _run(capsys, "estimate", "bad-row", "--q", "2", "--r", "2", "--k", "0", "--exact")
    assert status == 0 and out == "3/8\n"


def test_bad_row_table_csv(capsys):
    status, out, _ = _run(capsys, "estimate", "bad-row", "--max-q", "2", "--trials", "50", "--csv")
    assert status == 0
    assert out.splitlines()[0] == "q,r,k,exact_num,exact_den,mc_freq,mc_stderr,trials"
    assert len(out.splitlines()) == 1 + 5


def test_convert(capsys):
    assert _run(capsys, "convert", "--t", "2", "--T", "1")[1] == "delta_sq = 1/8\n"
    assert _run(capsys, "convert", "--delta-sq", "9/4")[1] == "T = 4\n"
    status, out, _ = _run(capsys, "convert", "--t", "3", "--T", "2", "--json")
    assert json.loads(out)["delta_sq"] == "1/36"
    assert _run(capsys, "convert", "--t", "1", "--T", "2")[0] == 2


def test_rate_and_expectation(capsys):
    status, out, _ = _run(capsys, "estimate", "rate", "--t", "2", "--tau", "0", "--json")
    assert json.loads(out)[0]["r_hat"] == 0.25
    status, out, _ = _run(capsys, "estimate", "rate", "--t", "1", "2", "--tau", "0", "0.1", "--csv")
    assert len(out.splitlines()) == 5
    status, out, _ = _run(capsys, "estimate", "expectation", "--n", "10", "--cols", "2", "--t", "1", "--tau", "0", "--json")
    assert json.loads(out)["log2_expected_bad_pairs"] == pytest.approx(-8.0)


def test_attack_trace_pipeline(tmp_path, capsys):
    code_path = tmp_path / "c.code"
    status, _, err = _run(capsys, "search", "--n", "24", "--cols", "6", "--t", "2", "--T", "1",
                          "--seed", "1", "--out", str(code_path))
    assert status == 0 and "found" in err
    syn = tmp_path / "s.json"
    assert _run(capsys, "attack", "--code", str(code_path), "--coalition", "2,5",
                "--noise", "sparse:T=1,mag=4", "--seed", "3", "--out", str(syn))[0] == 0
    doc = json.loads(syn.read_text())
    assert doc["n"] == 24 and len(doc["s"]) == 24
    status, out, _ = _run(capsys, "trace", "--code", str(code_path), "--syndrome", str(syn), "--t", "2")
    res = json.loads(out)
    assert status == 0
    assert res["coalition"] == [2, 5] and res["metric"] == "hamming" and res["candidates"] == 21
    assert not res["ambiguous"]


def test_noiseless_attack_matches_signature(tmp_path, capsys):
    code_path = tmp_path / "b.code"
    _run(capsys, "gen", "bch", "--m", "4", "--t", "2", "--out", str(code_path))
    status, out, _ = _run(capsys, "attack", "--code", str(code_path), "--coalition", "1,7")
    s = json.loads(out)["s"]
    sigma = average_signature(load_code(code_path), [1, 7]).to_float()
    assert max(abs(a - b) for a, b in zip(s, sigma)) < 1e-9


def test_trace_ambiguous_exit(tmp_path, capsys):
    code_path = tmp_path / "dup.code"
    code_path.write_text("1 2\n11\n")
    syn = tmp_path / "s.json"
    syn.write_text('{"n": 1, "s": [1.0]}')
    status, out, _ = _run(capsys, "trace", "--code", str(code_path), "--syndrome", str(syn), "--t", "1")
    assert status == 1 and json.loads(out)["ambiguous"]


def test_search_exhausted(capsys):
    status, out, err = _run(capsys, "search", "--n", "2", "--cols", "100", "--t", "2", "--T", "1", "--attempts", "5")
    assert status == 1 and out == ""


@pytest.mark.parametrize(
    "argv",
    [
        ["frobnicate"],
        ["verify", "--code"],
        ["verify", "--code", "x", "--t", "two"],
        ["convert", "--t", "2", "--T", "1", "--delta-sq", "1/2"],
        ["gen", "random", "--n", "3", "--cols", "3", "--bogus", "1"],
        ["attack", "--code", "x", "--coalition", "1,,2"],
        ["estimate", "bad-row", "--q", "1"],
    ],
)
def test_usage_errors(argv, capsys):
    status, out, err = _run(capsys, *argv)
    assert status == 2 and err


def test_file_errors(tmp_path, capsys):
    status, _, err = _run(capsys, "verify", "--code", str(tmp_path / "missing"), "--t", "1")
    assert status == 2 and "error" in err
    bad = tmp_path / "bad.code"
    bad.write_text("2 3\n10\n010\n")
    status, _, err = _run(capsys, "verify", "--code", str(bad), "--t", "1")
    assert status == 2 and "row 1" in err


def test_every_subcommand_has_help(capsys):
    for argv in (["gen", "random"], ["gen", "bch"], ["verify"], ["attack"], ["trace"],
                 ["estimate", "bad-row"], ["estimate", "rate"], ["estimate", "expectation"],
                 ["search"], ["convert"]):
        assert run(argv + ["--help"]) == 0
        out = capsys.readouterr().out
        assert "usage: fptrace" in out and "--seed" in out


def test_identical_config_identical_output(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    argv = ["estimate", "bad-row", "--q", "3", "--r", "2", "--k", "1", "--trials", "2000", "--seed", "11", "--json"]
    run(argv + ["--config-out", str(cfg)])
    first = capsys.readouterr().out
    replay = json.loads(cfg.read_text())["argv"]
    run(replay)
    assert capsys.readouterr().out == first


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "fptrace.cli", "convert", "--t", "2", "--T", "1"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "delta_sq = 1/8\n"
