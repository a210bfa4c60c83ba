import runpy
from pathlib import Path

import numpy as np
import pytest

from domwave.imageio import load_dataset

Image = pytest.importorskip("PIL.Image")
SCRIPT = Path(__file__).resolve().parents[1] / "scripts" / "convert_yale.py"


def test_converted_tree_loads(tmp_path):
    mod = runpy.run_path(str(SCRIPT))
    src = tmp_path / "yalefaces"
    src.mkdir()
    rng = np.random.default_rng(0)
    originals = {}
    for s in (1, 2, 10):
        for e in mod["EXPRESSIONS"]:
            px = rng.integers(0, 256, size=(12, 10), dtype=np.uint8)
            originals[(s, e)] = px
            suffix = ".gif" if s == 2 else ""
            Image.fromarray(px, mode="L").save(src / f"subject{s:02d}.{e}{suffix}", format="GIF")
    (src / "Readme.txt").write_text("ignored")

    mod["main"]([str(src), str(tmp_path / "out")])
    ds = load_dataset(tmp_path / "out", "<class>/<pose>.pgm")
    assert ds.p == 3 and all(r.q == 11 for r in ds.persons)
    assert [r.label for r in ds.persons] == ["subject01", "subject02", "subject10"]
    # pose 3 is "happy"
    np.testing.assert_array_equal(ds.persons[2].poses[2].pixels, originals[(10, "happy")])


def test_missing_expression_rejected(tmp_path):
    mod = runpy.run_path(str(SCRIPT))
    src = tmp_path / "src"
    src.mkdir()
    Image.fromarray(np.zeros((4, 4), np.uint8), mode="L").save(src / "subject01.happy", format="GIF")
    with pytest.raises(SystemExit, match="missing expressions"):
        mod["convert"](src, tmp_path / "out")
