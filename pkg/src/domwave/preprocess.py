"""Global illumination normalization and coefficient-similarity diagnostics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError
from .imageio import GrayImage

DEGENERATE_STD = 1e-12
DEFAULT_TARGET_MEAN = 128.0
DEFAULT_TARGET_STD = 64.0


@dataclass(frozen=True, eq=False)
class NormalizedImage:
    values: np.ndarray
    source_mean: float
    source_std: float
    target_mean: float
    target_std: float

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def degenerate(self) -> bool:
        """True when the source image was flat and was mapped to ``target_mean``."""
        return self.source_std < DEGENERATE_STD

    def histogram_range(self) -> tuple[float, float]:
        """Fixed binning range used for entropy scoring: mean +/- 4 std."""
        return (self.target_mean - 4.0 * self.target_std, self.target_mean + 4.0 * self.target_std)


def adjust_illumination(img, target_mean: float = DEFAULT_TARGET_MEAN,
                        target_std: float = DEFAULT_TARGET_STD) -> NormalizedImage:
    """Z-score the whole image, then rescale to the target mean and std.

    Uses the population standard deviation. A flat image (std below 1e-12)
    becomes ``target_mean`` everywhere.
    """
    if target_std < 0:
        raise DataError(f"target_std must be >= 0, got {target_std}")
    px = img.pixels if isinstance(img, GrayImage) else np.asarray(img, dtype=np.float64)
    mu = float(px.mean())
    sigma = float(px.std())
    if sigma < DEGENERATE_STD:
        values = np.full(px.shape, float(target_mean))
    else:
        values = (px - mu) / sigma * target_std + target_mean
    values.flags.writeable = False
    return NormalizedImage(values, mu, sigma, float(target_mean), float(target_std))


@dataclass(frozen=True)
class SimilarityReport:
    ncc_peak: float | None  # None when either input has zero variance
    peak_lag: int | None
    euclidean_distance: float
    length: int


def circular_ncc(a, b) -> np.ndarray:
    """Normalized circular cross-correlation of mean-removed ``a`` and ``b``.

    ``out[l] = sum_n a[(n + l) % N] * b[n] / (|a| |b|)`` after mean removal.
    """
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    a = a - a.mean()
    b = b - b.mean()
    norm = np.linalg.norm(a) * np.linalg.norm(b)
    if norm == 0.0:
        raise DataError("zero-variance input: correlation undefined")
    n = a.size
    corr = np.fft.irfft(np.fft.rfft(a) * np.conj(np.fft.rfft(b)), n)
    return np.clip(corr / norm, -1.0, 1.0)


def similarity_report(a, b) -> SimilarityReport:
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if a.size != b.size:
        raise DataError(f"length mismatch: {a.size} vs {b.size}")
    if a.size == 0:
        raise DataError("empty input")
    dist = float(np.linalg.norm(a - b))
    if np.ptp(a) == 0.0 or np.ptp(b) == 0.0:
        return SimilarityReport(None, None, dist, a.size)
    corr = circular_ncc(a, b)
    lag = int(np.argmax(corr))
    return SimilarityReport(float(corr[lag]), lag, dist, a.size)
