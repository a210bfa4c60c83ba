import numpy as np
import pytest

from domwave.errors import DataError
from domwave.harness import evaluate_fold, format_report, leave_one_out
from domwave.imageio import dataset_from_arrays

from .conftest import synthetic_faces


@pytest.fixture
def identical_poses():
    # three classes with identical poses; any held-out pose matches its class exactly
    return dataset_from_arrays(synthetic_faces(3, 4, seed=21, noise=0.0), name="identical")


@pytest.fixture
def noisy():
    return dataset_from_arrays(synthetic_faces(4, 4, seed=22, noise=25.0), name="noisy")


def test_identical_poses_perfect(identical_poses, small_cfg):
    rep = leave_one_out(identical_poses, small_cfg)
    assert rep.total_probes == 12
    assert rep.accuracy == 1.0
    assert all(p.best_distance == pytest.approx(0.0, abs=1e-9) for p in rep.probes)


def test_deterministic_report(noisy, small_cfg):
    a = format_report(leave_one_out(noisy, small_cfg))
    b = format_report(leave_one_out(noisy, small_cfg, jobs=3))
    assert a == b


def test_folds_independent(noisy, small_cfg):
    rep = leave_one_out(noisy, small_cfg)
    for probe in rep.probes[::3]:
        assert evaluate_fold(noisy, small_cfg, probe.class_id, probe.pose) == probe


def test_marginals_and_confusion(noisy, small_cfg):
    rep = leave_one_out(noisy, small_cfg)
    conf = rep.confusion()
    assert sum(n for *_, n in conf) == rep.total_probes == 16
    for cid, n, hits, acc in rep.per_class_accuracy():
        assert n == 4
        assert hits == sum(c for t, p, c in conf if t == cid and p == cid)
        assert acc == hits / n
    assert rep.correct == sum(p.correct for p in rep.probes)


def test_report_sections(noisy, small_cfg):
    text = format_report(leave_one_out(noisy, small_cfg))
    blocks = text.strip("\n").split("\n\n")
    assert [b.split("\n")[0].split("\t")[0] for b in blocks] == ["key", "class_id", "true_class", "class_id"]
    assert len(blocks[3].split("\n")) == 17
    assert "wall_time" not in text


def test_single_pose_rejected(small_cfg):
    classes = synthetic_faces(2, 2, seed=23)
    classes[1] = classes[1][:1]
    with pytest.raises(DataError, match="single-pose"):
        leave_one_out(dataset_from_arrays(classes), small_cfg)


def test_progress_callback(identical_poses, small_cfg):
    seen = []
    leave_one_out(identical_poses, small_cfg, progress=seen.append)
    assert sorted((p.class_id, p.pose) for p in seen) == [(c, k) for c in (1, 2, 3) for k in (1, 2, 3, 4)]


def test_unequal_pose_counts(small_cfg):
    classes = synthetic_faces(3, 4, seed=24)
    classes[0] = classes[0][:2]
    rep = leave_one_out(dataset_from_arrays(classes), small_cfg)
    assert rep.total_probes == 10
    assert [n for _, n, _, _ in rep.per_class_accuracy()] == [2, 4, 4]
    assert np.isfinite(rep.accuracy)
