import io
import json
from pathlib import Path

import pytest

from bottforge import cli

GOLDEN = Path(__file__).parent / "golden"


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture(scope="module")
def kitaev_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "a.json"
    code, _, err = run("example", "kitaev-diii", "--res", "16", "--out", str(path))
    assert code == 0, err
    return path


def test_example_then_verify(kitaev_file):
    code, out, _ = run("verify", str(kitaev_file))
    assert code == 0
    assert json.loads(out)["ok"] is True


def test_round_trip_is_idempotent(kitaev_file, tmp_path):
    b = cli.load_bundle(kitaev_file)
    again = tmp_path / "again.json"
    cli.save_bundle(b, again)
    assert again.read_bytes() == kitaev_file.read_bytes()


def test_suspend_then_kane_mele(kitaev_file, tmp_path):
    b_path = tmp_path / "b.json"
    code, out, err = run("suspend", str(kitaev_file), "--kind", "momentum", "--out", str(b_path))
    assert code == 0, err
    assert json.loads(out)["class"] == "AII"
    code, out, _ = run("invariant", str(b_path), "--kind", "kane-mele")
    assert code == 0
    res = json.loads(out)
    assert res["nontrivial"] is True
    assert -1.570796 in res["zero_k0"] and 1.570796 in res["zero_k0"]


def test_suspended_file_matches_library(kitaev_file, tmp_path):
    from bottforge import examples

    b_path = tmp_path / "b.json"
    run("suspend", str(kitaev_file), "--kind", "momentum", "--out", str(b_path))
    b = cli.load_bundle(b_path)
    ref = examples.build_diii_to_aii(16).bundle
    assert max(f.distance(g) for f, g in zip(b.fibers, ref.fibers)) < 1e-10


def test_position_suspend(kitaev_file, tmp_path):
    out_path = tmp_path / "p.json"
    code, out, err = run("suspend", str(kitaev_file), "--kind", "position", "--out", str(out_path))
    assert code == 0, err
    info = json.loads(out)
    assert (info["dx"], info["dk"], info["class"]) == (1, 1, "D")
    assert run("verify", str(out_path))[0] == 0


def test_invariants_on_files(kitaev_file, tmp_path):
    code, out, _ = run("invariant", str(kitaev_file), "--kind", "class-d")
    assert code == 0
    assert all(v["value"] == 1 for v in json.loads(out).values())
    b_path = tmp_path / "b.json"
    run("suspend", str(kitaev_file), "--kind", "momentum", "--out", str(b_path))
    csv_path = tmp_path / "curv.csv"
    code, out, _ = run("invariant", str(b_path), "--kind", "chern", "--sector", "up", "--csv", str(csv_path))
    assert code == 0 and json.loads(out)["value"] == 1
    assert csv_path.read_text().startswith("point,")
    pf_path = tmp_path / "pf.csv"
    run("invariant", str(b_path), "--kind", "kane-mele", "--csv", str(pf_path))
    assert pf_path.read_text().splitlines()[0] == "point,k0,k1,abs_pf"


def test_table_matches_golden():
    code, out, _ = run("table")
    assert code == 0 and out == (GOLDEN / "periodic_table.txt").read_text()
    code, out, _ = run("table", "--format", "csv")
    assert out == (GOLDEN / "periodic_table.csv").read_text()
    code, out, _ = run("table", "--which", "unstable")
    assert out == (GOLDEN / "unstable_cases.txt").read_text()


def test_bounds_command():
    code, out, _ = run("bounds", "--class", "BDI", "--n", "40")
    assert code == 0
    data = json.loads(out)
    assert data["bounds"]["d1"] == 10 and data["bounds"]["d2"] == 4
    assert {"dx": 0, "dk": 1, "condition": "r=1", "annotation": "Z -> Z"} in data["unstable_cases"]
    code, _, err = run("bounds", "--class", "AII", "--n", "4", "--p", "3", "--q", "1")
    assert code == 1 and "inconsistent" in err


def test_usage_errors():
    assert run("frobnicate")[0] == 2
    assert run("table", "--format", "xml")[0] == 2
    assert run("verify")[0] == 2


def test_malformed_files(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = run("verify", str(bad))
    assert code == 1 and "malformed JSON" in err
    bad.write_text(json.dumps({"schema_version": 1, "n": 2, "generators": [], "space": {}, "frames": []}))
    code, _, err = run("invariant", str(bad), "--kind", "winding")
    assert code == 1


def test_tampered_frames_fail_validation(kitaev_file, tmp_path):
    data = json.loads(kitaev_file.read_text())
    data["frames"][3] = data["frames"][5]
    bad = tmp_path / "tampered.json"
    bad.write_text(json.dumps(data))
    code, _, err = run("suspend", str(bad), "--kind", "momentum", "--out", str(tmp_path / "x.json"))
    assert code == 1 and "equivariance" in err
    code, out, _ = run("verify", str(bad))
    assert code == 1 and json.loads(out)["ok"] is False


def test_deterministic_output(tmp_path):
    a, b = tmp_path / "1.json", tmp_path / "2.json"
    run("example", "qsh", "--res", "8", "--out", str(a))
    run("example", "qsh", "--res", "8", "--out", str(b))
    assert a.read_bytes() == b.read_bytes()
