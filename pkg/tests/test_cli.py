import json
import subprocess
import sys
from pathlib import Path

import pytest

from omegalab.cli import main

DATA = Path(__file__).parent / "data"
CORPORA = ["corpus_small", "corpus_big", "corpus_mixed"]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_len_example(capsys):
    assert run(capsys, "len", "100", "--units", "bits") == (0, "13\n", "")
    code, out, _ = run(capsys, "len", "1", "4", "16")
    assert out.split() == ["1", "6", "11"]
    code, out, _ = run(capsys, "len", "5", "--code", "gamma", "--output", "csv")
    assert out == "n,length\n5,5\n"


def test_len_chain(capsys):
    code, out, _ = run(capsys, "len", "16", "--chain", "--output", "csv")
    assert out.splitlines()[1] == "16,11,16 4 2"


def test_kraft_examples(capsys):
    code, out, _ = run(capsys, "kraft", "--max-beta", "3", "--digits", "4")
    assert code == 0
    assert "exact = 13/2^4\n" in out and "decimal = 0.8125\n" in out
    code, out, _ = run(capsys, "kraft", "--max-beta", "12", "--brute", "4095")
    assert "brute_agrees = true" in out


def test_kraft_full_range(capsys):
    code, out, _ = run(capsys, "kraft", "--max-beta", "16777216", "--digits", "10")
    assert code == 0 and "decimal = 0.9697265625\n" in out


@pytest.mark.parametrize("name", CORPORA)
def test_encode_matches_golden(name, tmp_path, capsys):
    out = tmp_path / "x.omga"
    assert run(capsys, "encode", "--in", str(DATA / f"{name}.txt"), "--out", str(out))[0] == 0
    assert out.read_bytes() == (DATA / f"{name}.omga").read_bytes()


@pytest.mark.parametrize("name", CORPORA)
def test_decode_golden(name, tmp_path, capsys):
    out = tmp_path / "x.txt"
    assert run(capsys, "decode", "--in", str(DATA / f"{name}.omga"), "--out", str(out))[0] == 0
    expected = [int(v) for v in (DATA / f"{name}.txt").read_text().split()]
    assert [int(v) for v in out.read_text().split()] == expected


@pytest.mark.parametrize("code", ["omega", "gamma", "delta"])
def test_bits_round_trip(code, tmp_path, capsys):
    src = tmp_path / "in.txt"
    src.write_text("1\n2\n3\n1000\n")
    bits = tmp_path / "b.txt"
    run(capsys, "encode", "--code", code, "--bits", "--in", str(src), "--out", str(bits))
    code_, out, _ = run(capsys, "decode", "--code", code, "--in", str(bits))
    assert out == "1\n2\n3\n1000\n"


def test_decode_ascii_example(tmp_path, capsys):
    f = tmp_path / "b.txt"
    f.write_text("0100110\n")
    assert run(capsys, "decode", "--in", str(f))[1] == "1\n2\n3\n"


def test_data_errors_exit_2(tmp_path, capsys):
    f = tmp_path / "b.txt"
    f.write_text("10\n")
    code, _, err = run(capsys, "decode", "--in", str(f))
    assert code == 2 and err
    bad = tmp_path / "bad.omga"
    bad.write_bytes(b"OMGA\x09" + bytes(20))
    assert run(capsys, "decode", "--in", str(bad))[0] == 2
    f.write_text("3\n0\n")
    assert run(capsys, "encode", "--in", str(f))[0] == 2
    assert run(capsys, "decode", "--in", str(tmp_path / "missing"))[0] == 2
    assert run(capsys, "kraft", "--max-beta", "2048", "--max-blocks", "1024")[0] == 2


def test_usage_errors_exit_1(capsys):
    for argv in (["len"], ["len", "0"], ["kraft"], ["nosuch"], ["flow"],
                 ["flow", "--x", "0.5"], ["flow", "--x", "3", "--init", "cube"]):
        with pytest.raises(SystemExit) as info:
            if main(argv) == 1:
                raise SystemExit(1)
        assert info.value.code == 1, argv
        assert "usage" in capsys.readouterr().err


def test_flow_outputs(capsys):
    code, out, _ = run(capsys, "flow", "--x", "15.154262241479262", "--init", "const:3",
                       "--report", "gap", "--output", "csv")
    header, row = out.splitlines()
    assert header == "x,iters,depth,gap,tail,f0_tail"
    fields = row.split(",")
    assert float(fields[3]) == pytest.approx(3.0) and fields[2] == "2"
    code, out, _ = run(capsys, "flow", "--x", "1:1e300:5", "--output", "csv")
    assert len(out.splitlines()) == 6
    code, out, err = run(capsys, "flow", "--x", "1e6", "--iters", "9")
    assert code == 2 and "needs argument >= 1" in err


def test_law_check(tmp_path, capsys):
    good = tmp_path / "good.json"
    good.write_text(json.dumps({"atoms": [{"w": 1, "p": 0.5}],
                                "segments": [{"kind": "const", "a": 2, "b": 3, "rho": 0.5}]}))
    code, out, _ = run(capsys, "law", "--check", str(good))
    assert code == 0 and "status = ok" in out
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"atoms": [{"w": 1}], "segments": [{"kind": "const", "a": 2}]}))
    code, _, err = run(capsys, "law", "--check", str(bad))
    assert code == 2
    assert err.splitlines() == ["atoms[0].p: missing", "segments[0].b: missing",
                                "segments[0].rho: missing"]
    broken = tmp_path / "broken.json"
    broken.write_text("{")
    assert run(capsys, "law", "--check", str(broken))[0] == 2


def test_quantize_uniform(tmp_path, capsys):
    f = tmp_path / "law.json"
    f.write_text(json.dumps({
        "segments": [{"kind": "const", "a": 1, "b": 3, "rho": 0.5}],
        "cells": [{"a": 1, "b": 2}, {"a": 2, "b": 3}],
    }))
    code, out, _ = run(capsys, "quantize", "--law", str(f))
    assert code == 0
    pairs = dict(line.split(" = ", 1) for line in out.splitlines())
    assert float(pairs["quantized_kraft"]) == pytest.approx(1.0)
    assert float(pairs["lbar_base_D"]) == pytest.approx(1.0)
    assert float(pairs["kD_ln_W"]) == pytest.approx(1.0)
    code, out, _ = run(capsys, "quantize", "--law", str(f), "--output", "csv")
    assert out.splitlines()[0].startswith("quantized_kraft,avg_len")


def test_quantize_separate_file_and_negative(tmp_path, capsys):
    law = tmp_path / "law.json"
    law.write_text(json.dumps({"segments": [{"kind": "linear", "a": 1, "b": 2, "rho_a": 0, "rho_b": 2}]}))
    q = tmp_path / "q.json"
    q.write_text(json.dumps({"cells": [{"a": 1, "b": 2}]}))
    assert run(capsys, "quantize", "--law", str(law), "--quant", str(q))[0] == 2
    code, out, _ = run(capsys, "quantize", "--law", str(law), "--quant", str(q), "--allow-negative")
    assert code == 0 and "identity_b_residual = " in out


@pytest.mark.parametrize("suite", ["identities", "flow", "kraft"])
def test_suite_deterministic(suite, capsys):
    outs = {run(capsys, "suite", suite, "--seed", "7", "--instances", "12",
                "--workers", str(w))[1] for w in (1, 4)}
    assert len(outs) == 1
    assert run(capsys, "suite", suite, "--seed", "7", "--instances", "12")[1] in outs


def test_suite_seed_changes_output(capsys):
    a = run(capsys, "suite", "identities", "--seed", "1", "--instances", "3")[1]
    b = run(capsys, "suite", "identities", "--seed", "2", "--instances", "3")[1]
    assert a != b


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "omegalab", "len", "100"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 0 and res.stdout == "13\n"
    res = subprocess.run([sys.executable, "-m", "omegalab", "len", "x"],
                         capture_output=True, text=True, check=False)
    assert res.returncode == 1
