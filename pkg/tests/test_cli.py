import json
import math
import shutil
import subprocess
import sys

import pytest

from cayleynorms import InputError, free_product
from cayleynorms.cli import main, parse_group, parse_set

from conftest import SQRT3_2


def run(capsys, *argv):
    rc = main(list(argv))
    out, err = capsys.readouterr()
    return rc, out, err


def test_parse_group():
    assert parse_group("free:2").is_free
    assert parse_group("abelian:3").name == parse_group("free_abelian:3").name
    assert parse_group("free_product:2,3").n_symbols == 3
    for bad in ("foo:2", "free:x", "free_product:a"):
        with pytest.raises(InputError):
            parse_group(bad)


def test_parse_group_from_file(tmp_path):
    path = tmp_path / "g.json"
    path.write_text(json.dumps(free_product(2, 3).to_spec()))
    assert parse_group(str(path)).n_symbols == 3


def test_parse_set(F2_ball8):
    ball_for = lambda r: F2_ball8  # noqa: E731
    assert len(parse_set(ball_for, "sphere:2")) == 12
    assert len(parse_set(ball_for, "ball:2")) == 17
    assert len(parse_set(ball_for, "annulus:3:1")) == 12 + 36 + 108
    for bad in ("sphere", "ball:x", "cube:2", "annulus:2"):
        with pytest.raises(InputError):
            parse_set(ball_for, bad)


def test_enumerate(capsys):
    rc, out, _ = run(capsys, "enumerate", "--group", "free:2", "--radius", "3")
    assert rc == 0
    lines = out.strip().splitlines()
    assert lines[0].split("\t") == ["n", "sphere_size", "ball_size", "ratio_to_exp"]
    assert [l.split("\t")[1] for l in lines[1:]] == ["1", "4", "12", "36"]


def test_norm_json(capsys):
    rc, out, _ = run(capsys, "norm", "--group", "free:2", "--set", "sphere:1", "--p", "2", "--R", "6")
    assert rc == 0
    d = json.loads(out)
    assert d["converged"] and d["size"] == 4 and d["set"] == "sphere:1"
    assert 0.8 < d["value"] < SQRT3_2


def test_norm_extrapolate(capsys):
    rc, out, _ = run(capsys, "norm", "--group", "abelian:2", "--set", "sphere:1", "--R", "12",
                     "--extrapolate", "6,8,10,12")
    assert rc == 0
    d = json.loads(out)
    assert d["radii"] == [6, 8, 10, 12] and len(d["estimates"]) == 4
    assert d["extrapolated"] == pytest.approx(1.0, abs=5e-3)


def test_cocycle_bound(capsys):
    rc, out, _ = run(capsys, "cocycle-bound", "--group", "free:2", "--set", "sphere:1", "--p", "2")
    d = json.loads(out)
    assert rc == 0 and d["bound"] == pytest.approx(SQRT3_2, abs=1e-9)
    assert d["exactness"] == "exact-tree" and d["trivial_lower"] == pytest.approx(0.5)
    assert d["delta"] == pytest.approx(math.log(3))
    rc, out, _ = run(capsys, "cocycle-bound", "--group", "free:2", "--set", "sphere:2", "--p", "1.5",
                     "--eps", "opt")
    d_opt = json.loads(out)
    rc, out, _ = run(capsys, "cocycle-bound", "--group", "free:2", "--set", "sphere:2", "--p", "1.5",
                     "--eps", "paper")
    assert d_opt["bound"] <= json.loads(out)["bound"] + 1e-12
    rc, out, _ = run(capsys, "cocycle-bound", "--group", "free:2", "--set", "sphere:1", "--p", "2",
                     "--eps", "0.2746530721670274", "--delta", "1.0986")
    assert rc == 0 and json.loads(out)["eps"] == pytest.approx(math.log(3) / 4)


def test_expansion_outputs(capsys, tmp_path):
    rc, out, _ = run(capsys, "expansion", "--group", "free:2", "--set", "sphere:1",
                     "--witness-radius", "3", "--out", str(tmp_path))
    assert rc == 0
    d = json.loads((tmp_path / "expansion.json").read_text())
    assert d["exact_min"] == 3.25 and d["lower_bound"] >= 4 / 3
    tsv = (tmp_path / "expansion.tsv").read_text().splitlines()
    assert tsv[0].split("\t")[0] == "S" and len(tsv) == 2
    rc, out, _ = run(capsys, "expansion", "--group", "free:2", "--set", "sphere:1",
                     "--ground-radius", "-1", "--witnesses", "balls,random:5:1", "--delta", "none")
    assert rc == 0 and '"exact_min": null' in out


def test_report_writes_files(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n_range": [1, 2], "R_schedule": [4]}))
    rc, out, _ = run(capsys, "--config", str(cfg), "--out", str(tmp_path / "o"), "report", "radial-factor")
    assert rc == 0 and out.startswith("n\tsize")
    d = json.loads((tmp_path / "o" / "radial-factor.json").read_text())
    assert d["recipe"] == "radial-factor" and len(d["rows"]) == 2
    assert d["meta"]["config"]["R_schedule"] == [4]


def test_global_flags_after_subcommand(capsys, tmp_path):
    rc, _, _ = run(capsys, "--seed", "5", "enumerate", "--group", "free:1", "--radius", "2",
                   "--out", str(tmp_path))
    assert rc == 0 and (tmp_path / "enumerate.tsv").exists()


def test_report_rejects_non_free(capsys):
    rc, _, err = run(capsys, "report", "cohen", "--group", "abelian:2")
    assert rc == 2 and "free group" in err


@pytest.mark.parametrize("argv,code", [
    (["enumerate", "--group", "foo:2"], 2),
    (["norm", "--group", "free:2", "--set", "sphere:1", "--p", "0.5"], 2),
    (["norm", "--group", "free:2", "--set", "cube:1"], 2),
    (["bogus"], 2),
    (["expansion", "--group", "free:2", "--set", "sphere:1", "--ground-radius", "5",
      "--max-size", "6", "--delta", "none"], 3),
    (["report", "main-theorem", "--config", "/nonexistent.json"], 2),
])
def test_exit_codes(capsys, argv, code):
    assert run(capsys, *argv)[0] == code


def test_help_is_ok(capsys):
    assert run(capsys, "--help")[0] == 0


@pytest.mark.skipif(shutil.which("cayleynorms") is None, reason="entry point not installed")
def test_console_script():
    r = subprocess.run(["cayleynorms", "enumerate", "--group", "free:2", "--radius", "1"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.splitlines()[2].split("\t")[1] == "4"
    r = subprocess.run([sys.executable, "-m", "cayleynorms.cli", "enumerate", "--group", "x"],
                       capture_output=True, text=True)
    assert r.returncode == 2
