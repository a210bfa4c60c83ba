import os
from pathlib import Path

import numpy as np
import pytest

from domwave.config import PcaPolicy, PipelineConfig
from domwave.imageio import GrayImage, write_pgm

ORL_ROOT = Path(os.environ.get("DOMWAVE_ORL_ROOT", "/root/data/orl"))
YALE_ROOT = Path(os.environ.get("DOMWAVE_YALE_ROOT", "/root/data/yale"))


def have_orl() -> bool:
    return (ORL_ROOT / "s1" / "1.pgm").is_file()


requires_orl = pytest.mark.skipif(not have_orl(), reason=f"ORL dataset not found at {ORL_ROOT}")


@pytest.fixture(scope="session")
def orl():
    if not have_orl():
        pytest.skip(f"ORL dataset not found at {ORL_ROOT}")
    from domwave.imageio import load_dataset

    return load_dataset(ORL_ROOT)


def synthetic_faces(n_classes=3, n_poses=4, shape=(48, 40), seed=0, noise=2.0):
    """Per-class random base images plus small per-pose noise, integer-valued in [0, 255]."""
    rng = np.random.default_rng(seed)
    classes = []
    for _ in range(n_classes):
        base = rng.integers(20, 236, size=shape).astype(float)
        poses = [np.clip(np.round(base + rng.normal(0, noise, size=shape)), 0, 255) for _ in range(n_poses)]
        classes.append(poses)
    return classes


def write_tree(root: Path, classes, layout="s{c}/{p}.pgm"):
    for c, poses in enumerate(classes, start=1):
        for p, px in enumerate(poses, start=1):
            path = root / layout.format(c=c, p=p)
            path.parent.mkdir(parents=True, exist_ok=True)
            write_pgm(GrayImage(px), path)
    return root


@pytest.fixture
def synth_tree(tmp_path):
    return write_tree(tmp_path / "synth", synthetic_faces())


@pytest.fixture
def small_cfg():
    return PipelineConfig(n_bands=2, band_height=8, module_width=8, pca=PcaPolicy("variance", 0.99))
