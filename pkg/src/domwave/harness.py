"""Leave-one-out evaluation and report formatting."""

from __future__ import annotations

import time
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .config import PipelineConfig
from .errors import DataError, InvariantViolation
from .imageio import Dataset
from .pca import project
from .recognize import MatchResult, build_template_db, classify, dataset_features, db_from_features, recognize_image


@dataclass(frozen=True)
class ProbeResult:
    class_id: int
    pose: int  # 1-based
    predicted: int
    best_distance: float
    margin: float

    @property
    def correct(self) -> bool:
        return self.class_id == self.predicted


@dataclass(frozen=True)
class EvaluationReport:
    dataset: str
    config: PipelineConfig
    probes: tuple[ProbeResult, ...]
    labels: dict = field(default_factory=dict)
    wall_time: float = 0.0

    @property
    def total_probes(self) -> int:
        return len(self.probes)

    @property
    def correct(self) -> int:
        return sum(p.correct for p in self.probes)

    @property
    def accuracy(self) -> float:
        return self.correct / self.total_probes

    def per_class_accuracy(self) -> list[tuple[int, int, int, float]]:
        """(class_id, probes, correct, accuracy) per class."""
        rows = []
        for cid in sorted({p.class_id for p in self.probes}):
            mine = [p for p in self.probes if p.class_id == cid]
            hits = sum(p.correct for p in mine)
            rows.append((cid, len(mine), hits, hits / len(mine)))
        return rows

    def confusion(self) -> list[tuple[int, int, int]]:
        """(true class, predicted class, count), non-zero cells only, sorted."""
        counts = Counter((p.class_id, p.predicted) for p in self.probes)
        return sorted((t, p, n) for (t, p), n in counts.items())


def _fold(feats, labels, cfg, geometry, cid, pose) -> ProbeResult:
    db = db_from_features(feats, labels, cfg, geometry, exclude=(cid, pose))
    probe = feats[cid][pose - 1]
    return _probe_result(cid, pose, classify(db, project(db.pca_model, probe)))


def _probe_result(cid: int, pose: int, match: MatchResult) -> ProbeResult:
    return ProbeResult(cid, pose, match.predicted_class, match.distances[0][1], match.margin)


def evaluate_fold(dataset: Dataset, cfg: PipelineConfig, class_id: int, pose: int) -> ProbeResult:
    """Run a single fold from scratch, without the shared feature cache."""
    db = build_template_db(dataset, cfg, exclude=(class_id, pose))
    img = dataset.person(class_id).poses[pose - 1]
    return _probe_result(class_id, pose, recognize_image(db, img))


def leave_one_out(dataset: Dataset, cfg: PipelineConfig, jobs: int = 1, progress=None) -> EvaluationReport:
    """Hold out every pose once; PCA and templates are rebuilt from the rest each fold.

    Feature extraction has no trained state, so each image is extracted once
    and reused across folds.
    """
    short = [rec.label for rec in dataset.persons if rec.q < 2]
    if short:
        raise DataError(f"leave-one-out needs >= 2 poses per class; single-pose classes: {short}")
    start = time.perf_counter()
    feats = dataset_features(dataset, cfg)
    labels = {rec.class_id: rec.label for rec in dataset.persons}
    folds = [(rec.class_id, k) for rec in dataset.persons for k in range(1, rec.q + 1)]

    def run(fold):
        res = _fold(feats, labels, cfg, dataset.geometry, *fold)
        if progress is not None:
            progress(res)
        return res

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            probes = list(pool.map(run, folds))
    else:
        probes = [run(f) for f in folds]
    probes.sort(key=lambda p: (p.class_id, p.pose))
    report = EvaluationReport(dataset.name, cfg, tuple(probes), labels, time.perf_counter() - start)
    _check_report(report, dataset)
    return report


def _check_report(report: EvaluationReport, dataset: Dataset) -> None:
    if sum(n for _, _, n in report.confusion()) != report.total_probes:
        raise InvariantViolation("confusion counts do not sum to the number of probes")
    marginals = Counter()
    for t, _, n in report.confusion():
        marginals[t] += n
    expected = {rec.class_id: rec.q for rec in dataset.persons}
    if dict(marginals) != expected:
        raise InvariantViolation("confusion row sums differ from per-class pose counts")


def _num(x: float) -> str:
    return format(x, ".17g")


def format_report(report: EvaluationReport) -> str:
    """Tab-delimited report. Wall time is left out so reruns compare byte-for-byte."""
    out = ["key\tvalue"]
    out.append(f"dataset\t{report.dataset}")
    out.append(f"config\t{report.config.canonical()}")
    out.append(f"fingerprint\t{report.config.fingerprint()}")
    out.append(f"total_probes\t{report.total_probes}")
    out.append(f"correct\t{report.correct}")
    out.append(f"accuracy\t{_num(report.accuracy)}")
    out.append("")
    out.append("class_id\tlabel\tprobes\tcorrect\taccuracy")
    for cid, n, hits, acc in report.per_class_accuracy():
        out.append(f"{cid}\t{report.labels.get(cid, cid)}\t{n}\t{hits}\t{_num(acc)}")
    out.append("")
    out.append("true_class\tpredicted_class\tcount")
    out += [f"{t}\t{p}\t{n}" for t, p, n in report.confusion()]
    out.append("")
    out.append("class_id\tpose\tpredicted\tcorrect\tbest_distance\tmargin")
    for p in report.probes:
        out.append(f"{p.class_id}\t{p.pose}\t{p.predicted}\t{int(p.correct)}\t{_num(p.best_distance)}\t{_num(p.margin)}")
    return "\n".join(out) + "\n"
