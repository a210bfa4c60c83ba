import io

import numpy as np
import pytest

from domwave import cli
from domwave.cli import run_cli
from domwave.errors import InvariantViolation
from domwave.imageio import GrayImage, write_pgm

from .conftest import synthetic_faces, write_tree


def run(*argv):
    out = io.StringIO()
    code = run_cli([str(a) for a in argv], out)
    return code, out.getvalue()


def table(text, header):
    """Rows of the tab-separated table that starts at ``header``."""
    lines = text.splitlines()
    start = lines.index(header) + 1
    return [line.split("\t") for line in lines[start:]]


@pytest.fixture
def cfg_file(tmp_path, small_cfg):
    path = tmp_path / "small.cfg"
    path.write_text(small_cfg.to_text())
    return path


@pytest.fixture
def tree(tmp_path):
    return write_tree(tmp_path / "faces", synthetic_faces(3, 4, seed=31, noise=0.0))


def test_usage_errors(capsys):
    assert run()[0] == 1
    assert run("frobnicate")[0] == 1
    assert run("evaluate", "somewhere")[0] == 1  # --config missing
    assert "usage" in capsys.readouterr().err


def test_extract_needs_config_or_db(tree):
    assert run("extract", tree / "s1" / "1.pgm")[0] == 1


def test_extract(tree, cfg_file, small_cfg):
    code, out = run("extract", tree / "s1" / "1.pgm", "--config", cfg_file)
    assert code == 0
    assert f"fingerprint\t{small_cfg.fingerprint()}" in out
    length = int(dict(line.split("\t", 1) for line in out.splitlines()[:2])["length"])
    assert len(table(out, "band_rank\tmodule\tsubband\tposition\tvalue")) == length


def test_enroll_recognize_extract_db(tmp_path, tree, cfg_file):
    db = tmp_path / "t.db"
    code, out = run("enroll", tree, "--config", cfg_file, "--out", db)
    assert code == 0 and db.is_file() and "3 classes" in out
    code, out = run("recognize", tree / "s2" / "3.pgm", "--db", db)
    assert code == 0
    assert out.splitlines()[0] == "predicted_class\t2"
    assert len(table(out, "class_id\tlabel\tdistance")) == 3
    code, out = run("extract", tree / "s2" / "3.pgm", "--db", db)
    assert code == 0 and "retained_dim" in out


def test_recognize_geometry_mismatch(tmp_path, tree, cfg_file, capsys):
    db = tmp_path / "t.db"
    run("enroll", tree, "--config", cfg_file, "--out", db)
    odd = tmp_path / "odd.pgm"
    write_pgm(GrayImage(np.zeros((30, 30))), odd)
    assert run("recognize", odd, "--db", db)[0] == 2
    err = capsys.readouterr().err
    assert "30x30" in err and "40x48" in err


def test_missing_db_and_image(tmp_path, tree):
    assert run("recognize", tree / "s1" / "1.pgm", "--db", tmp_path / "missing.db")[0] == 2
    assert run("extract", tmp_path / "missing.pgm", "--config", "orl")[0] == 2


def test_evaluate_report_file_deterministic(tmp_path, tree, cfg_file):
    r1, r2 = tmp_path / "r1.tsv", tmp_path / "r2.tsv"
    code, out = run("evaluate", tree, "--config", cfg_file, "--report", r1)
    assert code == 0 and out.startswith("accuracy\t1\t(12/12)")
    run("evaluate", tree, "--config", cfg_file, "--report", r2, "--jobs", "2")
    assert r1.read_bytes() == r2.read_bytes()


def test_evaluate_stdout_generic_layout(tmp_path, cfg_file):
    root = write_tree(tmp_path / "gen", synthetic_faces(2, 3, seed=32, noise=0.0), layout="{c}/{p}.pgm")
    code, out = run("evaluate", root, "--config", cfg_file)
    assert code == 0
    assert "accuracy\t1\n" in out


def test_inspect_entropy(tree, small_cfg):
    path = tree / "s1" / "1.pgm"
    cfg = tree.parent / "c.cfg"
    cfg.write_text(small_cfg.to_text())
    code, out = run("inspect-entropy", path, "--config", cfg)
    rows = table(out, "band_index\trow_start\trow_end\tentropy\tselected_rank")
    assert code == 0 and len(rows) == 48 // 8
    assert sorted(int(r[4]) for r in rows if r[4] != "0") == [1, 2]


def test_inspect_similarity_self(tree):
    a = tree / "s1" / "1.pgm"
    code, out = run("inspect-similarity", a, a, "--config", "orl")
    assert code == 0
    summary = dict(line.split("\t") for line in out.splitlines()[:5])
    assert float(summary["ncc_peak"]) == pytest.approx(1.0)
    assert summary["peak_lag"] == "0"
    assert float(summary["euclidean_distance"]) == 0.0
    code, out = run("inspect-similarity", a, tree / "s2" / "1.pgm", "--config", "orl", "--no-illum")
    assert code == 0 and "illumination_adjusted\tfalse" in out


def test_inspect_similarity_size_mismatch(tmp_path, tree):
    odd = tmp_path / "odd.pgm"
    write_pgm(GrayImage(np.zeros((30, 30))), odd)
    assert run("inspect-similarity", tree / "s1" / "1.pgm", odd, "--config", "orl")[0] == 2


def test_inspect_separability(tree, cfg_file):
    code, out = run("inspect-separability", tree, "--config", cfg_file)
    assert code == 0 and "modularized\ttrue" in out
    code, out = run("inspect-separability", tree, "--config", cfg_file, "--no-modularize")
    assert code == 0 and "module_width\t40" in out
    assert len(table(out, "class_a\tclass_b\tbetween_class_separation\tfisher_ratio")) >= 3


def test_invariant_violation_exit_code(monkeypatch, tree, cfg_file):
    def broken(*args, **kwargs):
        raise InvariantViolation("confusion counts do not sum")

    monkeypatch.setattr(cli, "leave_one_out", broken)
    assert run("evaluate", tree, "--config", cfg_file)[0] == 3
