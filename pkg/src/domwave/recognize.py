"""Template storage and average sum-squares distance classification."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from urllib.parse import quote, unquote

import numpy as np

from . import kernels
from .config import PipelineConfig
from .errors import DataError, GeometryError
from .features import FeatureVector, extract_features
from .imageio import Dataset, GrayImage
from .pca import PcaModel, fit_pca, project

MAGIC = "WFDB"
FORMAT_VERSION = 1


@dataclass(frozen=True, eq=False)
class TemplateClass:
    class_id: int
    label: str
    vectors: np.ndarray  # (q, retained_dim)

    @property
    def q(self) -> int:
        return self.vectors.shape[0]


@dataclass(frozen=True, eq=False)
class TemplateDb:
    classes: tuple[TemplateClass, ...]
    pca_model: PcaModel
    config: PipelineConfig
    geometry: tuple[int, int]  # (width, height) of enrolled images
    format_version: int = FORMAT_VERSION

    def __post_init__(self):
        if not self.classes:
            raise DataError("template database has no classes")
        ids = [c.class_id for c in self.classes]
        if len(set(ids)) != len(ids):
            raise DataError(f"duplicate class ids: {ids}")
        dim = self.pca_model.retained_dim
        for c in self.classes:
            if c.q == 0:
                raise DataError(f"class {c.class_id} has no templates")
            if c.vectors.shape[1] != dim:
                raise DataError(f"class {c.class_id} vectors have length {c.vectors.shape[1]}, expected {dim}")
        # flattened view for the distance kernel
        order = sorted(range(len(self.classes)), key=lambda i: self.classes[i].class_id)
        object.__setattr__(self, "_ids", np.array([self.classes[i].class_id for i in order]))
        object.__setattr__(self, "_stack", np.vstack([self.classes[i].vectors for i in order]))
        object.__setattr__(self, "_offsets", np.cumsum([0] + [self.classes[i].q for i in order]))

    @property
    def class_ids(self) -> list[int]:
        return self._ids.tolist()

    def get(self, class_id: int) -> TemplateClass:
        for c in self.classes:
            if c.class_id == class_id:
                return c
        raise DataError(f"unknown class {class_id}")

    def check_dim(self, test) -> np.ndarray:
        test = np.asarray(test, dtype=np.float64)
        if test.shape != (self.pca_model.retained_dim,):
            raise DataError(
                f"test vector has shape {test.shape}, expected ({self.pca_model.retained_dim},)"
            )
        return test


@dataclass(frozen=True)
class MatchResult:
    predicted_class: int
    distances: tuple[tuple[int, float], ...]  # ascending by distance, ties by class id
    margin: float  # second-best minus best; inf with a single class


def avg_sum_squares_distance(db: TemplateDb, class_id: int, test) -> float:
    """Mean over the class's templates of the squared Euclidean distance to ``test``."""
    test = db.check_dim(test)
    cls = db.get(class_id)
    return float(kernels.class_distances(cls.vectors, np.array([0, cls.q]), test)[0])


def all_class_distances(db: TemplateDb, test) -> np.ndarray:
    """Distances for every class, aligned with ``db.class_ids``."""
    test = db.check_dim(test)
    return kernels.class_distances(db._stack, db._offsets, test)


def classify(db: TemplateDb, test) -> MatchResult:
    deltas = all_class_distances(db, test)
    ids = db._ids
    # lexsort: last key is primary
    order = np.lexsort((ids, deltas))
    table = tuple((int(ids[i]), float(deltas[i])) for i in order)
    margin = table[1][1] - table[0][1] if len(table) > 1 else float("inf")
    return MatchResult(table[0][0], table, margin)


# ---------------------------------------------------------------------------
# enrollment


def db_from_features(features: dict, labels: dict, cfg: PipelineConfig, geometry,
                     exclude: tuple[int, int] | None = None) -> TemplateDb:
    """Fit PCA and store projected templates from precomputed feature vectors.

    ``features[class_id]`` is a list of FeatureVectors in pose order; ``exclude``
    is ``(class_id, pose_index)`` with a 1-based pose index.
    """
    kept = {}
    for cid in sorted(features):
        vecs = [v for k, v in enumerate(features[cid], start=1) if exclude != (cid, k)]
        if vecs:
            kept[cid] = vecs
    training = [v for cid in kept for v in kept[cid]]
    if not training:
        raise DataError("no enrollment images left after exclusion")
    model = fit_pca(training, cfg.pca, config_fingerprint=cfg.fingerprint())
    classes = []
    for cid, vecs in kept.items():
        coords = project(model, np.vstack([v.values for v in vecs]))
        coords.flags.writeable = False
        classes.append(TemplateClass(cid, labels[cid], coords))
    return TemplateDb(tuple(classes), model, cfg, tuple(geometry))


def dataset_features(dataset: Dataset, cfg: PipelineConfig) -> dict[int, list[FeatureVector]]:
    return {rec.class_id: [extract_features(img, cfg) for img in rec.poses] for rec in dataset.persons}


def build_template_db(dataset: Dataset, cfg: PipelineConfig,
                      exclude: tuple[int, int] | None = None) -> TemplateDb:
    """Enroll every pose of ``dataset`` except ``exclude`` = (class_id, 1-based pose index)."""
    feats = dataset_features(dataset, cfg)
    labels = {rec.class_id: rec.label for rec in dataset.persons}
    return db_from_features(feats, labels, cfg, dataset.geometry, exclude)


def recognize_image(db: TemplateDb, img: GrayImage) -> MatchResult:
    if (img.width, img.height) != db.geometry:
        raise GeometryError(
            f"probe geometry {img.width}x{img.height} does not match database geometry "
            f"{db.geometry[0]}x{db.geometry[1]}"
        )
    fv = extract_features(img, db.config)
    return classify(db, project(db.pca_model, fv))


# ---------------------------------------------------------------------------
# file format


def _row(values) -> str:
    return " ".join(format(float(v), ".17g") for v in values)


def _floats(line: str, expected: int, what: str, path) -> np.ndarray:
    fields = line.split()
    if len(fields) != expected:
        raise DataError(f"{path}: {what} has {len(fields)} values, expected {expected}")
    try:
        return np.array([float(f) for f in fields])
    except ValueError:
        raise DataError(f"{path}: non-numeric value in {what}") from None


def _ints(fields, what: str, path) -> list[int]:
    try:
        return [int(f) for f in fields]
    except ValueError:
        raise DataError(f"{path}: non-integer field in {what}") from None


def dumps_template_db(db: TemplateDb) -> str:
    m = db.pca_model
    lines = [
        f"{MAGIC} {db.format_version}",
        db.config.canonical(),
        f"geometry {db.geometry[0]} {db.geometry[1]}",
        f"pca {m.input_dim} {m.retained_dim} {m.eigenvalues.size} {int(m.degenerate)} {m.fit_fingerprint}",
        _row(m.mean),
        _row(m.eigenvalues),
    ]
    lines += [_row(c) for c in m.components]
    for c in sorted(db.classes, key=lambda c: c.class_id):
        lines.append(f"class {c.class_id} {quote(c.label, safe='')} {c.q}")
        lines += [_row(v) for v in c.vectors]
    return "\n".join(lines) + "\n"


def loads_template_db(text: str, path="<string>") -> TemplateDb:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    pos = 0

    def take():
        nonlocal pos
        if pos >= len(lines):
            raise DataError(f"{path}: unexpected end of template database")
        pos += 1
        return lines[pos - 1]

    head = take().split()
    if len(head) != 2 or head[0] != MAGIC:
        raise DataError(f"{path}: not a template database (bad magic)")
    if head[1] != str(FORMAT_VERSION):
        raise DataError(f"{path}: unsupported format version {head[1]}")
    cfg = PipelineConfig.parse(take())
    geo = take().split()
    if len(geo) != 3 or geo[0] != "geometry":
        raise DataError(f"{path}: malformed geometry line")
    geometry = tuple(_ints(geo[1:], "geometry line", path))
    pca_head = take().split()
    if len(pca_head) != 6 or pca_head[0] != "pca":
        raise DataError(f"{path}: malformed pca header")
    in_dim, dim, n_eig, degenerate = _ints(pca_head[1:5], "pca header", path)
    if in_dim < 1 or dim < 1 or n_eig < dim:
        raise DataError(f"{path}: inconsistent pca header dimensions")
    mean = _floats(take(), in_dim, "pca mean", path)
    evals = _floats(take(), n_eig, "pca eigenvalues", path)
    comps = np.vstack([_floats(take(), in_dim, "pca component", path) for _ in range(dim)])
    model = PcaModel(mean, comps, evals, pca_head[5], bool(degenerate))
    if pca_head[5].split(":", 1)[0] != cfg.fingerprint():
        raise DataError(f"{path}: PCA model fingerprint does not match the stored config")
    classes = []
    while pos < len(lines):
        fields = take().split()
        if len(fields) != 4 or fields[0] != "class":
            raise DataError(f"{path}: malformed class header at line {pos}")
        (cid, q), label = _ints(fields[1:4:2], "class header", path), unquote(fields[2])
        if q < 1:
            raise DataError(f"{path}: class {cid} declares {q} templates")
        vecs = np.vstack([_floats(take(), dim, f"class {cid} template", path) for _ in range(q)])
        classes.append(TemplateClass(cid, label, vecs))
    return TemplateDb(tuple(classes), model, cfg, geometry, FORMAT_VERSION)


def save_template_db(db: TemplateDb, path) -> None:
    Path(path).write_text(dumps_template_db(db), encoding="ascii", newline="\n")


def load_template_db(path) -> TemplateDb:
    try:
        text = Path(path).read_text(encoding="ascii")
    except OSError as exc:
        raise DataError(f"{path}: cannot read template database ({exc.strerror or exc})") from None
    return loads_template_db(text, path)
