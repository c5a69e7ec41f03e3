import json
import os
import subprocess
import sys

import pytest

from sym2moments.cli import main, parse_weights
from sym2moments.errors import DomainError


def run(args, cache):
    env = dict(os.environ, CACHE_DIR=str(cache))
    return subprocess.run([sys.executable, "-m", "sym2moments.cli", *args], capture_output=True, text=True, env=env)


@pytest.fixture(scope="module")
def cache(tmp_path_factory):
    return tmp_path_factory.mktemp("cli-cache")


def test_parse_weights():
    assert parse_weights("12:20:4") == [12, 16, 20]
    assert parse_weights("12:16") == [12, 14, 16]
    assert parse_weights("14:14:1") == [14]
    for bad in ("20:12", "12:x", "13:13", "12:20:0", "1:2:3:4"):
        with pytest.raises(DomainError):
            parse_weights(bad)


def test_eigen(cache):
    r = run(["eigen", "--weight", "12", "--terms", "100"], cache)
    assert r.returncode == 0
    assert "dim=1" in r.stdout and "lambda(2)=-0.53033008588991" in r.stdout
    assert (cache / "weight_0012.json").exists()
    r = run(["eigen", "--weight", "14"], cache)
    assert r.returncode == 0 and "dim=0" in r.stdout
    assert run(["eigen", "--weight", "13"], cache).returncode == 2


def test_every_numeric_line_has_bound(cache):
    for args in (["delta", "--weight", "12"], ["lvalue", "--weight", "12", "--s", "2"], ["moment", "--weight", "12", "--k", "0.25"]):
        r = run(args, cache)
        assert r.returncode == 0, r.stderr
        for line in r.stdout.strip().split("\n"):
            if line.startswith("note:"):
                continue
            assert "±" in line or "exact" in line, line


def test_delta_weight200(cache):
    r = run(["delta", "--weight", "200", "--m", "1", "--n", "1", "--no-spectral"], cache)
    assert r.returncode == 0
    value = float(r.stdout.split(" = ")[1].split("±")[0])
    assert abs(value - 1) < 1e-10


def test_moment_k0_matches_delta(cache):
    m = run(["moment", "--weight", "12", "--k", "0"], cache).stdout
    d = run(["delta", "--weight", "12"], cache).stdout
    hm = float(m.split("harmonic moment = ")[1].split("±")[0])
    sp = float(d.split("lambda(n) = ")[1].split("±")[0])
    assert hm == pytest.approx(sp, rel=1e-15)


def test_moment_json(cache):
    r = run(["--format", "json", "moment", "--weight", "16", "--k", "1"], cache)
    doc = json.loads(r.stdout)
    assert doc["dim"] == 1 and doc["kappa"] == 16


def test_scan(cache, tmp_path):
    out = tmp_path / "scan.csv"
    svg = tmp_path / "scan.svg"
    r = run(["scan", "--weights", "12:28:4", "--k", "0.5", "--out", str(out), "--plot", str(svg)], cache)
    assert r.returncode == 0, r.stderr
    assert len(out.read_text().strip().split("\n")) == 6
    assert "k(2k+1) = 1.0" in r.stderr
    assert svg.read_text().startswith("<svg")
    empty = tmp_path / "empty.csv"
    r = run(["scan", "--weights", "14:14:1", "--k", "0.5", "--out", str(empty)], cache)
    assert r.returncode == 0 and "notice" in r.stderr
    assert empty.read_text().strip().startswith("kappa,dim")
    assert len(empty.read_text().strip().split("\n")) == 1
    assert run(["scan", "--weights", "12:28:4", "--k", "-1"], cache).returncode == 2
    assert run(["scan", "--weights", "28:12:4", "--k", "1"], cache).returncode == 2


def test_scan_bytes_independent_of_threads(cache, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run(["--threads", "1", "scan", "--weights", "12:24:4", "--k", "0.25", "--out", str(a)], cache)
    run(["--threads", "2", "scan", "--weights", "12:24:4", "--k", "0.25", "--out", str(b)], cache)
    assert a.read_bytes() == b.read_bytes()


def test_verify_holder_prints_each_check(cache):
    r = run(["verify", "--suite", "holder", "--weights", "12:16"], cache)
    assert r.returncode == 0
    assert "lhs=" in r.stdout and "rhs=" in r.stdout and "margin=" in r.stdout
    summary = json.loads(r.stdout.strip().split("\n")[-1])
    assert summary["passed"] is True


def test_verify_hecke_json(cache, tmp_path):
    out = tmp_path / "v.json"
    r = run(["verify", "--suite", "hecke", "--weights", "12:16", "--json", str(out)], cache)
    assert r.returncode == 0
    doc = json.loads(out.read_text())
    assert all("margin" in c for s in doc["suites"] for c in s["checks"])


def test_config_errors(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("precision_bits = 8\n")
    assert main(["--config", str(bad), "eigen", "--weight", "12"]) == 2
    assert main(["--precision", "16", "eigen", "--weight", "12"]) == 2
