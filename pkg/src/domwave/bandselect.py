"""Horizontal band partitioning and entropy-ranked band selection."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import DataError, GeometryError
from .imageio import GrayImage
from .preprocess import NormalizedImage

RAW_RANGE = (0.0, 256.0)


@dataclass(frozen=True)
class BandSelection:
    row_start: int
    row_end: int
    entropy: float
    rank: int

    @property
    def height(self) -> int:
        return self.row_end - self.row_start


def band_entropy(band, num_bins: int = 256, value_range: tuple[float, float] = RAW_RANGE) -> float:
    """Shannon entropy (bits) of the band's intensity histogram.

    ``num_bins`` equal-width bins span ``value_range``; values outside the
    range fall into the edge bins.
    """
    band = np.asarray(band, dtype=np.float64)
    if band.size == 0:
        raise DataError("empty band")
    if num_bins < 2:
        raise DataError(f"num_bins must be >= 2, got {num_bins}")
    lo, hi = value_range
    return kernels.histogram_entropy(band, float(lo), float(hi), int(num_bins))


def partition_bands(height: int, band_height: int) -> list[tuple[int, int]]:
    """Consecutive ``band_height``-row bands from row 0; a short remainder is dropped."""
    if not 1 <= band_height <= height:
        raise GeometryError(f"band_height {band_height} out of range for image height {height}")
    return [(r, r + band_height) for r in range(0, height - band_height + 1, band_height)]


def _values_and_range(img):
    if isinstance(img, NormalizedImage):
        return img.values, img.histogram_range()
    if isinstance(img, GrayImage):
        return img.pixels, RAW_RANGE
    return np.asarray(img, dtype=np.float64), RAW_RANGE


def score_bands(img, band_height: int, num_bins: int = 256) -> list[BandSelection]:
    """Entropy of every band, in top-to-bottom order (rank is 0: unranked)."""
    values, value_range = _values_and_range(img)
    return [
        BandSelection(r0, r1, band_entropy(values[r0:r1], num_bins, value_range), 0)
        for r0, r1 in partition_bands(values.shape[0], band_height)
    ]


def select_top_bands(img, n: int, band_height: int, num_bins: int = 256) -> list[BandSelection]:
    """The ``n`` highest-entropy bands, ranked 1..n.

    Ties in entropy go to the band nearer the top of the image.
    """
    scored = score_bands(img, band_height, num_bins)
    if not 1 <= n <= len(scored):
        raise GeometryError(f"cannot select {n} bands: image has {len(scored)} bands of height {band_height}")
    ordered = sorted(scored, key=lambda b: (-b.entropy, b.row_start))[:n]
    return [BandSelection(b.row_start, b.row_end, b.entropy, rank) for rank, b in enumerate(ordered, start=1)]
