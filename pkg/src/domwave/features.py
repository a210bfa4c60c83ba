"""Modularization, dominant-coefficient selection and feature assembly.

A feature vector is built as::

    normalize illumination
      -> pick the N highest-entropy horizontal bands
      -> for each band (by rank), tile it into modules left to right
      -> per module: one-level 2D DWT, then the top theta% coefficients by
         magnitude of the approximation subband followed by those of the
         horizontal-detail subband

Coefficients keep their sign and are ordered by descending magnitude.
"""

from __future__ import annotations

import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .bandselect import BandSelection, select_top_bands
from .config import PipelineConfig
from .errors import DataError, FingerprintMismatch, GeometryError
from .imageio import GrayImage
from .preprocess import adjust_illumination
from .wavelet import dwt2d_batch

SUBBANDS = ("approx", "horizontal_detail")


@dataclass(frozen=True)
class ModuleGrid:
    band: BandSelection | None
    module_width: int
    module_height: int
    modules: tuple[tuple[int, int], ...]

    def __len__(self):
        return len(self.modules)


@dataclass(frozen=True)
class LayoutEntry:
    band_rank: int
    module_index: int
    subband: str
    count: int


@dataclass(frozen=True, eq=False)
class FeatureVector:
    values: np.ndarray
    layout: tuple[LayoutEntry, ...]
    config_fingerprint: str
    bands: tuple[BandSelection, ...] = ()

    def __post_init__(self):
        if self.values.shape[0] != sum(e.count for e in self.layout):
            raise DataError("feature length disagrees with its layout")

    def __len__(self):
        return self.values.shape[0]

    def compatible(self, other: "FeatureVector") -> bool:
        return self.config_fingerprint == other.config_fingerprint


def module_spans(width: int, module_width: int) -> tuple[tuple[int, int], ...]:
    if not 1 <= module_width <= width:
        raise GeometryError(f"module_width {module_width} out of range for band width {width}")
    return tuple((c, c + module_width) for c in range(0, width - module_width + 1, module_width))


def modularize(band, module_width: int, selection: BandSelection | None = None) -> ModuleGrid:
    """Tile a band into ``module_width``-wide modules; a narrower remainder is dropped."""
    band = np.asarray(band)
    if band.ndim != 2:
        raise DataError(f"band must be 2D, got shape {band.shape}")
    return ModuleGrid(selection, module_width, band.shape[0], module_spans(band.shape[1], module_width))


def dominant_count(total: int, theta_percent: float) -> int:
    """max(1, ceil(theta/100 * total)), rounded to 9 decimals first so 0.07*100 stays 7."""
    return max(1, math.ceil(round(theta_percent * total / 100.0, 9)))


def dominant_coefficients(coeffs, theta_percent: float) -> np.ndarray:
    """Largest-magnitude ``theta_percent`` of ``coeffs``, signed, by descending magnitude.

    Equal magnitudes (within a relative 1e-9 of the largest) keep row-major order.
    """
    flat = np.asarray(coeffs, dtype=np.float64).ravel()
    if flat.size == 0:
        raise DataError("empty coefficient array")
    if not 0.0 < theta_percent <= 100.0:
        raise DataError(f"theta must be in (0, 100], got {theta_percent}")
    return _dominant_rows(flat[None, :], dominant_count(flat.size, theta_percent))[0]


# Magnitudes closer than this (relative to the row maximum) count as tied.
# Integer images produce exact +v/-v ties in the detail subbands; without a
# tolerance, rounding noise from illumination normalization decides their
# order and the feature vector flips sign at that position.
TIE_RTOL = 1e-9


def _magnitude_order(rows: np.ndarray) -> np.ndarray:
    """Per-row indices by descending magnitude, near-ties in position order."""
    mag = np.abs(rows)
    order = np.argsort(-mag, axis=1, kind="stable")
    smag = np.take_along_axis(mag, order, axis=1)
    tol = TIE_RTOL * smag[:, :1]
    group = np.concatenate(
        [np.zeros((len(rows), 1), dtype=np.int64), np.cumsum(np.diff(-smag, axis=1) > tol, axis=1)], axis=1
    )
    within = np.lexsort((order, group), axis=1)
    return np.take_along_axis(order, within, axis=1)


def _dominant_rows(rows: np.ndarray, k: int) -> np.ndarray:
    # row-wise dominant_coefficients for a (modules, coefficients) array
    return np.take_along_axis(rows, _magnitude_order(rows)[:, :k], axis=1)


def check_geometry(width: int, height: int, cfg: PipelineConfig) -> None:
    n_bands = height // cfg.band_height
    problems = []
    if n_bands < cfg.n_bands:
        problems.append(f"{n_bands} band(s) of height {cfg.band_height} < bands.n={cfg.n_bands}")
    if width < cfg.module_width:
        problems.append(f"width {width} < modules.width={cfg.module_width}")
    if cfg.band_height < 2 or cfg.module_width < 2:
        problems.append("modules must be at least 2x2 for the DWT")
    if problems:
        raise GeometryError(f"image {width}x{height} too small for config: " + "; ".join(problems))


def extract_features(img: GrayImage, cfg: PipelineConfig) -> FeatureVector:
    if not isinstance(img, GrayImage):
        img = GrayImage(img)
    check_geometry(img.width, img.height, cfg)
    norm = adjust_illumination(img, cfg.target_mean, cfg.target_std)
    bands = select_top_bands(norm, cfg.n_bands, cfg.band_height, cfg.num_bins)
    spans = module_spans(img.width, cfg.module_width)
    spec = cfg.wavelet

    parts = []
    layout = []
    for band in bands:
        rows = norm.values[band.row_start : band.row_end, : spans[-1][1]]
        # (modules, band_height, module_width)
        stack = rows.reshape(rows.shape[0], len(spans), cfg.module_width).transpose(1, 0, 2)
        sub = dwt2d_batch(stack, spec)
        per_module = []
        for name in SUBBANDS:
            coeffs = getattr(sub, name).reshape(len(spans), -1)
            k = dominant_count(coeffs.shape[1], cfg.theta_percent)
            per_module.append(_dominant_rows(coeffs, k))
        for m in range(len(spans)):
            for name, chosen in zip(SUBBANDS, per_module):
                parts.append(chosen[m])
                layout.append(LayoutEntry(band.rank, m, name, chosen.shape[1]))
    values = np.concatenate(parts)
    values.flags.writeable = False
    return FeatureVector(values, tuple(layout), cfg.fingerprint(), tuple(bands))


def feature_length(width: int, height: int, cfg: PipelineConfig) -> int:
    """Feature vector length for a given geometry; never depends on pixel content."""
    check_geometry(width, height, cfg)
    n_modules = width // cfg.module_width
    sub_rows = -(-cfg.band_height // 2)
    sub_cols = -(-cfg.module_width // 2)
    k = dominant_count(sub_rows * sub_cols, cfg.theta_percent)
    return cfg.n_bands * n_modules * len(SUBBANDS) * k


# ---------------------------------------------------------------------------
# class separability diagnostics


@dataclass(frozen=True)
class ScatterReport:
    centroids: dict
    within_class_scatter: dict
    between_class_separation: dict  # (class_a, class_b) -> squared centroid distance
    fisher_ratio: dict

    def median_fisher_ratio(self) -> float:
        return float(np.median(list(self.fisher_ratio.values())))


def _as_matrix(vectors, fingerprint_holder: list) -> np.ndarray:
    rows = []
    for v in vectors:
        if isinstance(v, FeatureVector):
            if fingerprint_holder and fingerprint_holder[0] != v.config_fingerprint:
                raise FingerprintMismatch(
                    f"feature fingerprints differ: {fingerprint_holder[0]} vs {v.config_fingerprint}"
                )
            fingerprint_holder[:1] = [v.config_fingerprint]
            rows.append(v.values)
        else:
            rows.append(np.asarray(v, dtype=np.float64))
    return np.vstack(rows) if rows else np.empty((0, 0))


def class_scatter_report(features: Mapping[int, Sequence]) -> ScatterReport:
    """Centroid, within-class scatter and pairwise Fisher ratios per class.

    Within-class scatter is the mean squared distance to the centroid; the
    Fisher ratio of a pair is the squared centroid distance over the sum of
    both scatters (infinite when that sum is zero).
    """
    holder: list = []
    centroids, within = {}, {}
    dim = None
    for cid in sorted(features):
        mat = _as_matrix(features[cid], holder)
        if mat.shape[0] == 0:
            raise DataError(f"class {cid} has no feature vectors")
        if dim is not None and mat.shape[1] != dim:
            raise DataError(f"class {cid} vectors have length {mat.shape[1]}, expected {dim}")
        dim = mat.shape[1]
        c = mat.mean(axis=0)
        centroids[cid] = c
        within[cid] = float(np.mean(np.sum((mat - c) ** 2, axis=1)))
    separation, fisher = {}, {}
    for a, b in combinations(sorted(features), 2):
        sep = float(np.sum((centroids[a] - centroids[b]) ** 2))
        denom = within[a] + within[b]
        separation[(a, b)] = sep
        fisher[(a, b)] = sep / denom if denom > 0 else math.inf
    return ScatterReport(centroids, within, separation, fisher)
