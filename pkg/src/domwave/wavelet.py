"""Single-level orthogonal DWT (1D and separable 2D) as a two-channel filter bank.

Analysis convention, for a length-n signal x and filter length L::

    approx[i] = sum_k lo[k] * x[ext(2i + k)]
    detail[i] = sum_k hi[k] * x[ext(2i + k)],   hi[k] = (-1)^k lo[L-1-k]

where ``ext`` resolves indices past the end of the signal according to the
boundary mode. Outputs have ceil(n/2) samples. Under the periodic mode an
odd-length signal is first extended by repeating its last sample.

2D subbands follow rows-then-columns: rows are split into low/high halves,
then every column of each half is split again.

=================== ============= =================
subband             along rows    along columns
=================== ============= =================
approx (LL)         low-pass      low-pass
horizontal_detail   high-pass     low-pass
vertical_detail     low-pass      high-pass
diagonal_detail     high-pass     high-pass
=================== ============= =================
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import kernels
from .errors import DataError, GeometryError

_SQRT_HALF = np.sqrt(0.5)

# Daubechies, 4 vanishing moments (8 taps), minimum phase.
_DB4_LO = (
    -0.010597401785069032, 0.0328830116668852, 0.030841381835560764,
    -0.18703481171909309, -0.027983769416859854, 0.6308807679298589,
    0.7148465705529157, 0.2303778133088965,
)

FAMILIES = ("haar", "db4")
BOUNDARIES = ("periodic", "symmetric")


@dataclass(frozen=True, eq=False)
class WaveletSpec:
    family: str
    dec_lo: np.ndarray
    dec_hi: np.ndarray
    rec_lo: np.ndarray
    rec_hi: np.ndarray
    boundary: str = "periodic"

    @property
    def length(self) -> int:
        return self.dec_lo.shape[0]

    def __eq__(self, other):
        if not isinstance(other, WaveletSpec):
            return NotImplemented
        return self.family == other.family and self.boundary == other.boundary

    def __hash__(self):
        return hash((self.family, self.boundary))


def quadrature_mirror(lo) -> np.ndarray:
    lo = np.asarray(lo, dtype=np.float64)
    signs = np.where(np.arange(lo.size) % 2 == 0, 1.0, -1.0)
    return signs * lo[::-1]


@lru_cache(maxsize=None)
def make_wavelet(family: str = "haar", boundary: str = "periodic") -> WaveletSpec:
    if family == "haar":
        lo = np.array([_SQRT_HALF, _SQRT_HALF])
    elif family == "db4":
        lo = np.array(_DB4_LO)
    else:
        raise DataError(f"unknown wavelet family {family!r}; expected one of {FAMILIES}")
    if boundary not in BOUNDARIES:
        raise DataError(f"unknown boundary mode {boundary!r}; expected one of {BOUNDARIES}")
    hi = quadrature_mirror(lo)
    arrays = [lo, hi, lo[::-1].copy(), hi[::-1].copy()]
    for arr in arrays:
        arr.flags.writeable = False
    return WaveletSpec(family, *arrays, boundary=boundary)


@lru_cache(maxsize=256)
def _gather_index(n: int, taps: int, boundary: str) -> np.ndarray:
    m = (n + 1) // 2
    j = 2 * np.arange(m)[:, None] + np.arange(taps)[None, :]
    if boundary == "periodic":
        period = 2 * m
        j = j % period
        # odd n: virtual sample n repeats sample n-1
        np.minimum(j, n - 1, out=j)
    else:
        # half-point symmetric: ... x1 x0 | x0 x1 ... x[n-1] | x[n-1] x[n-2] ...
        j = j % (2 * n)
        j = np.where(j >= n, 2 * n - 1 - j, j)
    idx = np.ascontiguousarray(j, dtype=np.int64)
    idx.flags.writeable = False
    return idx


def _analysis_lastaxis(x: np.ndarray, spec: WaveletSpec):
    n = x.shape[-1]
    lead = x.shape[:-1]
    flat = x.reshape(-1, n)
    idx = _gather_index(n, spec.length, spec.boundary)
    a, d = kernels.analysis(flat, spec.dec_lo, spec.dec_hi, idx)
    m = idx.shape[0]
    return a.reshape(*lead, m), d.reshape(*lead, m)


def _synthesis_lastaxis(a: np.ndarray, d: np.ndarray, spec: WaveletSpec, n: int):
    m = a.shape[-1]
    lead = a.shape[:-1]
    out = kernels.synthesis(a.reshape(-1, m), d.reshape(-1, m), spec.rec_lo, spec.rec_hi, 2 * m)
    return out[:, :n].reshape(*lead, n)


def dwt1d(signal, spec: WaveletSpec | None = None):
    """One analysis level. Returns ``(approx, detail)``."""
    spec = spec or make_wavelet()
    x = np.asarray(signal, dtype=np.float64)
    if x.ndim != 1 or x.size < 2:
        raise DataError(f"dwt1d needs a 1D signal of length >= 2, got shape {x.shape}")
    a, d = _analysis_lastaxis(x[None, :], spec)
    return a[0], d[0]


def idwt1d(approx, detail, spec: WaveletSpec | None = None, length: int | None = None):
    """Inverse of :func:`dwt1d`; exact under the periodic boundary.

    ``length`` trims the output (pass the original length for odd signals).
    """
    spec = spec or make_wavelet()
    a = np.asarray(approx, dtype=np.float64)
    d = np.asarray(detail, dtype=np.float64)
    if a.ndim != 1 or a.shape != d.shape:
        raise DataError(f"approx/detail length mismatch: {a.shape} vs {d.shape}")
    n = 2 * a.size if length is None else length
    if not 2 * a.size - 1 <= n <= 2 * a.size:
        raise DataError(f"length {n} incompatible with {a.size} coefficients")
    return _synthesis_lastaxis(a[None, :], d[None, :], spec, n)[0]


@dataclass(frozen=True, eq=False)
class Subbands:
    approx: np.ndarray
    horizontal_detail: np.ndarray
    vertical_detail: np.ndarray
    diagonal_detail: np.ndarray

    @property
    def shape(self):
        return self.approx.shape

    def as_tuple(self):
        return (self.approx, self.horizontal_detail, self.vertical_detail, self.diagonal_detail)

    def energy(self) -> float:
        return float(sum(np.sum(s * s) for s in self.as_tuple()))


def _pad_odd(x):
    """Repeat the last row/column of odd dimensions (both boundary modes agree for Haar)."""
    pad = [(0, 0)] * (x.ndim - 2) + [(0, x.shape[-2] % 2), (0, x.shape[-1] % 2)]
    return np.pad(x, pad, mode="edge") if any(p[1] for p in pad) else x


def _haar2d(x):
    # rows-then-columns Haar collapsed onto 2x2 blocks; the 1/2 factor keeps
    # integer inputs exact
    x = _pad_odd(x)
    a = x[..., 0::2, 0::2]
    b = x[..., 0::2, 1::2]
    c = x[..., 1::2, 0::2]
    d = x[..., 1::2, 1::2]
    return Subbands(
        (a + b + c + d) * 0.5,
        (a - b + c - d) * 0.5,
        (a + b - c - d) * 0.5,
        (a - b - c + d) * 0.5,
    )


def _ihaar2d(ll, lh, hl, hh, rows, cols):
    out = np.empty(ll.shape[:-2] + (2 * ll.shape[-2], 2 * ll.shape[-1]))
    out[..., 0::2, 0::2] = (ll + lh + hl + hh) * 0.5
    out[..., 0::2, 1::2] = (ll - lh + hl - hh) * 0.5
    out[..., 1::2, 0::2] = (ll + lh - hl - hh) * 0.5
    out[..., 1::2, 1::2] = (ll - lh - hl + hh) * 0.5
    return out[..., :rows, :cols]


def dwt2d_batch(stack, spec: WaveletSpec, filter_bank: bool = False):
    """:func:`dwt2d` over the last two axes of an array of any rank >= 2.

    Haar takes a direct 2x2-block path unless ``filter_bank`` is set; both
    compute the same transform.
    """
    x = np.asarray(stack, dtype=np.float64)
    if x.shape[-1] < 2 or x.shape[-2] < 2:
        raise GeometryError(f"dwt2d needs at least 2x2 input, got {x.shape[-2]}x{x.shape[-1]}")
    if spec.family == "haar" and not filter_bank:
        return _haar2d(x)
    row_lo, row_hi = _analysis_lastaxis(x, spec)
    ll, hl = _analysis_lastaxis(np.swapaxes(row_lo, -1, -2), spec)
    lh, hh = _analysis_lastaxis(np.swapaxes(row_hi, -1, -2), spec)
    t = lambda arr: np.swapaxes(arr, -1, -2)  # noqa: E731
    return Subbands(t(ll), t(lh), t(hl), t(hh))


def dwt2d(matrix, spec: WaveletSpec | None = None) -> Subbands:
    m = np.asarray(matrix, dtype=np.float64)
    if m.ndim != 2:
        raise DataError(f"dwt2d needs a 2D matrix, got shape {m.shape}")
    return dwt2d_batch(m, spec or make_wavelet())


def idwt2d(sub: Subbands, spec: WaveletSpec | None = None, shape: tuple[int, int] | None = None,
           filter_bank: bool = False):
    """Inverse of :func:`dwt2d`; ``shape`` restores odd original dimensions."""
    spec = spec or make_wavelet()
    bands = [np.asarray(b, dtype=np.float64) for b in sub.as_tuple()]
    if any(b.ndim != 2 or b.shape != bands[0].shape for b in bands):
        raise DataError(f"subband dimension mismatch: {[b.shape for b in bands]}")
    r, c = bands[0].shape
    rows, cols = shape if shape is not None else (2 * r, 2 * c)
    if not (2 * r - 1 <= rows <= 2 * r and 2 * c - 1 <= cols <= 2 * c):
        raise DataError(f"shape {shape} incompatible with {r}x{c} subbands")
    ll, lh, hl, hh = bands
    if spec.family == "haar" and not filter_bank:
        return _ihaar2d(ll, lh, hl, hh, rows, cols)
    row_lo = _synthesis_lastaxis(ll.T, hl.T, spec, rows).T
    row_hi = _synthesis_lastaxis(lh.T, hh.T, spec, rows).T
    return _synthesis_lastaxis(row_lo, row_hi, spec, cols)
