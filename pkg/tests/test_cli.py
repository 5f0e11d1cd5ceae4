import json

import pytest

from quasifree import config as cfgmod
from quasifree.cli import run

MATRIX = {"window": {"model": "finite", "lo": 1, "hi": 6},
          "kernel": {"family": "cd", "params": {"weight": {"family": "uniform"}, "N": 2}},
          "seed": 5}


@pytest.fixture
def cfgfile(tmp_path):
    def make(cfg, name="cfg.json"):
        p = tmp_path / name
        p.write_text(json.dumps(cfg))
        return str(p)
    return make


def _body(text):
    return [l for l in text.splitlines() if not l.startswith("#")]


def test_config_schema_rejects_unknown_keys():
    with pytest.raises(cfgmod.ConfigError):
        cfgmod.validate({"kernel": {"family": "sine", "params": {"phi": 1.0}}, "extra": 1})
    with pytest.raises(cfgmod.ConfigError):
        cfgmod.validate({"kernel": {"family": "sine", "params": {"phi": 1.0, "r": 2}}})
    with pytest.raises(cfgmod.ConfigError):
        cfgmod.validate({"kernel": {"family": "warp"}})
    cfgmod.validate(MATRIX)


def test_config_builds_and_hashes():
    K = cfgmod.kernel_matrix(MATRIX)
    assert K.rank() == 2
    assert cfgmod.hash_of(MATRIX) == cfgmod.hash_of(json.loads(json.dumps(MATRIX)))
    assert cfgmod.policy_of({"tolerances": {"equivalence_eps": 1e-4}}).equivalence_eps == 1e-4


def test_kernel_csv(cfgfile, capsys):
    assert run(["kernel", "--kernel", cfgfile(MATRIX)]) == 0
    out = capsys.readouterr().out
    assert out.startswith("# config_sha256: " + cfgmod.hash_of(MATRIX))
    assert "# policy: " in out
    assert _body(out)[0] == "row,col,value"
    assert len(_body(out)) == 1 + 36


def test_correlations_default_kernel(capsys):
    assert run(["correlations", "--points", "1,3,5"]) == 0
    rows = _body(capsys.readouterr().out)
    assert rows[0] == "points,n,rho"
    assert rows[1] == "1,1,0.5"
    assert len(rows) == 1 + 7


def test_sample_is_byte_identical(cfgfile, tmp_path):
    c = cfgfile(MATRIX)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(["sample", "--kernel", c, "--n", "300", "--seed", "42", "--out", str(a)]) == 0
    assert run(["sample", "--kernel", c, "--n", "300", "--seed", "42", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    rows = _body(a.read_text())
    assert rows[0] == "index,mask,sites" and len(rows) == 301
    assert all(len(r.split(",")[2].split(";")) == 2 for r in rows[1:])


def test_reduce(cfgfile, capsys):
    assert run(["reduce", "--kernel", cfgfile(MATRIX), "--occupied", "2", "--vacant", "5"]) == 0
    out = capsys.readouterr().out
    assert "# trace: " in out
    assert len(_body(out)) == 1 + 16
    assert run(["reduce", "--kernel", cfgfile(MATRIX), "--occupied", "2", "--order", "3"]) == 2


def test_verify_reports(capsys):
    assert run(["verify", "car", "--max-sites", "3", "--max-n", "2"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["passed"] and rep["max_residual"] <= 1e-12
    assert run(["verify", "perfect", "--max-sites", "5", "--max-n", "2"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["suite"] == "perfect" and rep["max_residual"] <= 1e-9


def test_verify_failure_exit_code(monkeypatch, capsys):
    from quasifree import suites
    monkeypatch.setitem(suites.SUITES, "car", lambda **kw: {"suite": "car", "passed": False,
                                                        "max_residual": 1.0})
    assert run(["verify", "car"]) == 1


def test_equivalence_json(cfgfile, tmp_path):
    j0 = cfgfile({"kernel": {"family": "discrete_jacobi_symmetric", "params": {"a": 0}}}, "a.json")
    j1 = cfgfile({"kernel": {"family": "discrete_jacobi_symmetric", "params": {"a": 1}}}, "b.json")
    out = tmp_path / "v.json"
    assert run(["equivalence", "--k1", j0, "--k2", j1, "--cutoffs", "64,256,1024",
                "--out", str(out)]) == 0
    v = json.loads(out.read_text())
    assert v["verdict"] == "equivalent"
    assert set(v) >= {"verdict", "S", "cauchy_gap", "index", "policy"}


def test_limits(capsys):
    assert run(["limits", "charlier-to-sine", "--phi", "1.5707963", "--N", "100,200,400"]) == 0
    rows = _body(capsys.readouterr().out)[1:]
    errs = [float(r.split(",")[1]) for r in rows]
    assert errs == sorted(errs, reverse=True)
    assert run(["limits", "jacobi-ratio", "--n", "100", "--m", "100"]) == 0
    row = _body(capsys.readouterr().out)[1].split(",")
    assert abs(float(row[4]) - 1) < 0.05


def test_error_exit_codes(cfgfile, tmp_path, capsys):
    assert run(["kernel", "--kernel", cfgfile(MATRIX), "--bogus"]) == 2
    assert run(["nonsense"]) == 2
    assert run(["kernel", "--kernel", str(tmp_path / "missing.json")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(["kernel", "--kernel", str(bad)]) == 2
    assert run(["kernel", "--kernel", cfgfile({"kernel": {"family": "sine"}})]) == 2
    assert run(["verify", "car", "--tol", "nope=1"]) == 2
    assert run(["verify", "car", "--instances", "3"]) == 2
    err = capsys.readouterr().err
    assert "error" in err.lower()


def test_tolerance_override_in_header(cfgfile, capsys):
    assert run(["kernel", "--kernel", cfgfile(MATRIX), "--tol", "spectrum=1e-6"]) == 0
    assert '"spectrum":1e-06' in capsys.readouterr().out
