import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from rtlmosaic.cli import run

FIXTURES = Path(__file__).parent / "fixtures"


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def cli_process(*argv, cwd=None):
    return subprocess.run([sys.executable, "-m", "rtlmosaic", *argv],
                          capture_output=True, text=True, cwd=cwd)


def test_sat_unsat_exit_codes():
    code, out, _ = call("sat", "p & !p")
    assert code == 20 and json.loads(out)["status"] == "unsat"
    code, out, _ = call("sat", "p", "--json")
    body = json.loads(out)
    assert code == 10 and body["status"] == "sat" and "certificate" in body
    code, out, _ = call("sat", "p")
    assert code == 10 and "certificate" not in json.loads(out)


def test_valid_exit_codes():
    assert call("valid", "F p -> F F p")[0] == 10
    code, out, _ = call("valid", "p", "--json")
    assert code == 20 and json.loads(out)["status"] == "invalid"


def test_formula_from_file(tmp_path):
    f = tmp_path / "f.txt"
    f.write_text("U(p, p & !p)\n")
    assert call("sat", f"@{f}")[0] == 20


@pytest.mark.parametrize("argv", [
    ("sat", "U(p q)"), ("sat", "@/nonexistent/file"), ("check", "/nonexistent.json"),
    ("encode-tm", "/nonexistent.tm"), ("frobnicate",), ("oracle", "p", "--max-regions", "0"),
])
def test_errors_exit_one(argv):
    code, _, err = call(*argv)
    assert code == 1


def test_check_round_trip_in_separate_process(tmp_path):
    cert = tmp_path / "cert.json"
    p = cli_process("sat", "S(p, q) & !q", "--cert", str(cert))
    assert p.returncode == 10, p.stderr
    p = cli_process("check", str(cert))
    assert p.returncode == 0 and p.stdout.strip() == "accepted"
    p = cli_process("check", str(cert), "--formula", "S(p, q) & !q")
    assert p.returncode == 0


def test_check_mutated_certificate(tmp_path):
    code, out, _ = call("sat", "p", "--json")
    cert = json.loads(out)["certificate"]
    cert["nodes"][0]["mosaic"]["cover"].pop()
    path = tmp_path / "mutated.json"
    path.write_text(json.dumps(cert))
    code, out, _ = call("check", str(path))
    assert code == 2 and out.startswith("rejected at $.nodes[0]")
    code, out, _ = call("check", str(path), "--json")
    body = json.loads(out)
    assert code == 2 and not body["accepted"] and body["path"].startswith("$.nodes[0]")


def test_oracle_command():
    code, out, _ = call("oracle", "F p & G !q", "--max-regions", "3")
    assert code == 10 and "@ region" in out
    code, out, _ = call("oracle", "p & !p")
    assert code == 20 and out.strip() == "none"
    code, out, _ = call("oracle", "p", "--json")
    assert json.loads(out)["model"] == "( {p} )"


def test_encode_tm_command():
    code, out, _ = call("encode-tm", str(FIXTURES / "accept.tm"))
    assert code == 0 and "tick" in out and "star" in out
    code, _, err = call("encode-tm", str(FIXTURES / "accept.tm").replace("accept", "nope"))
    assert code == 1


def test_stats_command():
    code, out, _ = call("stats", "U(p,q)")
    assert code == 0
    assert "closure_size:" in out and "level 0:" in out
    code, out, _ = call("stats", "U(p,q)", "--json")
    body = json.loads(out)
    assert body["status"] == "sat" and body["core_closure_size"] == 6


def test_byte_identical_outputs():
    a = cli_process("sat", "S(p, q) & !q", "--json", "--seed", "3")
    b = cli_process("sat", "S(p, q) & !q", "--json", "--seed", "3")
    assert a.returncode == b.returncode == 10
    assert a.stdout == b.stdout


def test_threads_flag_accepted():
    assert call("sat", "p", "--threads", "4")[0] == 10
