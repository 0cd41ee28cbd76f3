import json

import numpy as np
import pytest

from tomophase import io as tio
from tomophase.cli import main
from tomophase.core import Object3D
from tomophase.schemes import Scheme


def run(*argv):
    return main([str(a) for a in argv])


@pytest.fixture
def workspace(tmp_path):
    assert run("gen-object", "--n", 3, "--seed", 4, "--out", tmp_path / "f.tph") == 0
    assert run("gen-scheme", "--n", 3, "--seed", 2, "--extra", "0.3,0.8", "--out", tmp_path / "s.tph") == 0
    assert run("gen-mask", "--p", 5, "--seed", 1, "--out", tmp_path / "m.tph") == 0
    assert run("project", "--object", tmp_path / "f.tph", "--scheme", tmp_path / "s.tph",
               "--out-dir", tmp_path / "proj") == 0
    return tmp_path


def rows(path):
    return {r["name"]: r for r in tio.read_report(path)}


def test_check_scheme_zero_slopes(tmp_path, capsys):
    tio.save(Scheme("z", np.zeros((3, 2)), 3), tmp_path / "z.tph")
    assert run("check-scheme", "--scheme", tmp_path / "z.tph", "--report", tmp_path / "r.csv") == 1
    r = rows(tmp_path / "r.csv")
    assert r["strong_ct_worst_count"]["value"] == "1" and r["strong_ct_worst_count"]["pass"] == "false"
    assert "FAIL" in capsys.readouterr().out


def test_reconstruct_end_to_end(workspace, capsys):
    w = workspace
    code = run("reconstruct", "--projections-dir", w / "proj", "--scheme", w / "s.tph",
               "--out", w / "g.tph", "--reference", w / "f.tph", "--report", w / "rec.csv")
    assert code == 0
    err = float(rows(w / "rec.csv")["reconstruction_error"]["value"])
    assert err <= 1e-8
    assert "reconstruction_error" in capsys.readouterr().out
    f, g = tio.load(w / "f.tph", Object3D), tio.load(w / "g.tph", Object3D)
    assert np.max(np.abs(f.values - g.values)) <= 1e-8


def test_verify_slice(workspace):
    w = workspace
    assert run("verify-slice", "--object", w / "f.tph", "--scheme", w / "s.tph", "--report", w / "v.csv") == 0
    assert all(float(r["value"]) <= 1e-9 for r in rows(w / "v.csv").values())


def test_pipeline_commands(workspace):
    w = workspace
    assert run("diffract", "--projections-dir", w / "proj", "--mask", w / "m.tph", "--out-dir", w / "pat") == 0
    assert len(list((w / "pat").glob("pattern_*.tph"))) == 4
    assert run("recover-autocorr", "--pattern", w / "pat" / "pattern_000.tph", "--out", w / "r.tph") == 0
    assert run("classify-ambiguity", "--projections-dir", w / "proj", "--scheme", w / "s.tph",
               "--report", w / "a.csv") == 0
    assert rows(w / "a.csv")["verdict"]["value"] == "unique_up_to_phase"
    assert run("verify-uniqueness", "--object", w / "f.tph", "--mask", w / "m.tph", "--scheme", w / "s.tph",
               "--report", w / "u.csv") == 0
    assert run("physics-demo", "--object", w / "f.tph", "--report", w / "ph.csv") == 0


def test_irregular_grid(workspace):
    w = workspace
    from tomophase.diffraction import regular_nodes

    np.savetxt(w / "nodes.txt", regular_nodes(5) + 0.01)
    assert run("diffract", "--projections-dir", w / "proj", "--mask", w / "m.tph",
               "--grid", f"irregular:{w / 'nodes.txt'}", "--out-dir", w / "ipat") == 0
    np.savetxt(w / "bad.txt", regular_nodes(5) + 0.05)
    assert run("diffract", "--projections-dir", w / "proj", "--mask", w / "m.tph",
               "--grid", f"irregular:{w / 'bad.txt'}", "--out-dir", w / "bpat") == 1
    assert run("diffract", "--projections-dir", w / "proj", "--mask", w / "m.tph",
               "--grid", "hex", "--out-dir", w / "bpat") == 64


def test_oracle_command(tmp_path):
    (tmp_path / "sup.json").write_text(json.dumps([[0, 0, 0], [-1, 0, 0], [0, -1, 0], [0, 0, -1]]))
    (tmp_path / "al.json").write_text(json.dumps([0, [1, 0], [0, 1], [-1, 0], [0, -1]]))
    assert run("gen-scheme", "--n", 2, "--seed", 3, "--extra", "0.37,0.81", "--out", tmp_path / "s.tph") == 0
    assert run("gen-mask", "--p", 3, "--seed", 1, "--out", tmp_path / "m.tph") == 0
    args = ["oracle", "--support-file", tmp_path / "sup.json", "--alphabet-file", tmp_path / "al.json",
            "--mask", tmp_path / "m.tph", "--scheme", tmp_path / "s.tph"]
    assert run(*args, "--report", tmp_path / "o.csv") == 0
    assert rows(tmp_path / "o.csv")["anomalies"]["value"] == "0"
    assert run(*args, "--budget", 10) == 1


def test_deterministic_outputs(tmp_path):
    for tag in ("a", "b"):
        assert run("gen-object", "--n", 3, "--seed", 9, "--out", tmp_path / f"f{tag}.tph") == 0
        assert run("gen-scheme", "--n", 3, "--seed", 9, "--out", tmp_path / f"s{tag}.tph") == 0
        assert run("verify-slice", "--object", tmp_path / f"f{tag}.tph", "--scheme", tmp_path / f"s{tag}.tph",
                   "--report", tmp_path / f"v{tag}.csv") == 0
    for stem in ("f", "s"):
        assert (tmp_path / f"{stem}a.tph").read_bytes() == (tmp_path / f"{stem}b.tph").read_bytes()
    assert (tmp_path / "va.csv").read_bytes() == (tmp_path / "vb.csv").read_bytes()


def test_env_seed(tmp_path, monkeypatch):
    monkeypatch.setenv("TOMOPHASE_SEED", "9")
    assert run("gen-object", "--n", 2, "--out", tmp_path / "e.tph") == 0
    assert run("gen-object", "--n", 2, "--seed", 9, "--out", tmp_path / "s.tph") == 0
    assert run("gen-object", "--n", 2, "--seed", 1, "--out", tmp_path / "o.tph") == 0
    assert (tmp_path / "e.tph").read_bytes() == (tmp_path / "s.tph").read_bytes()
    assert (tmp_path / "e.tph").read_bytes() != (tmp_path / "o.tph").read_bytes()


def test_usage_and_validation_codes(tmp_path, capsys):
    assert run("bogus") == 64
    assert run("gen-object", "--n") == 64
    assert "usage" in capsys.readouterr().err
    assert run("gen-scheme", "--n", 2, "--rotation", "1.5,2", "--out", tmp_path / "x.tph") == 1
    assert run("check-scheme", "--scheme", tmp_path / "missing.tph") == 1
    (tmp_path / "bad.tph").write_bytes(b"TOMOPHASE 1\n{")
    assert run("check-scheme", "--scheme", tmp_path / "bad.tph") == 1


def test_numerical_failure_code(tmp_path, monkeypatch):
    import tomophase.cli as cli
    from tomophase.errors import SingularNodes

    def boom(*args, **kwargs):
        raise SingularNodes("coincident nodes")

    tio.save(Scheme("z", np.zeros((2, 2)), 2), tmp_path / "z.tph")
    monkeypatch.setattr(cli, "check_strong_ct", boom)
    assert run("check-scheme", "--scheme", tmp_path / "z.tph") == 2
