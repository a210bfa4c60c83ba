"""Pure-numpy versions of the hot loops. Always importable."""

import numpy as np


def analysis(x, lo, hi, idx):
    """One filter-bank analysis step along the last axis of a 2D array.

    ``idx[i, k]`` is the (boundary-resolved) input sample multiplied by tap
    ``k`` when producing output ``i``.
    """
    gathered = x[:, idx]  # (rows, m, L)
    return gathered @ lo, gathered @ hi


def synthesis(a, d, lo, hi, n_out):
    """Periodic synthesis along the last axis; ``n_out`` must be even."""
    rows, m = a.shape
    taps = lo.shape[0]
    out = np.zeros((rows, n_out))
    base = 2 * np.arange(m)
    for k in range(taps):
        # for fixed k the targets are distinct, so fancy-index += is safe
        pos = (base + taps - 1 - k) % n_out
        out[:, pos] += lo[k] * a + hi[k] * d
    return out


def histogram_entropy(values, lo, hi, num_bins):
    v = np.asarray(values, dtype=np.float64).ravel()
    width = hi - lo
    if width <= 0.0:
        return 0.0
    bins = np.floor((v - lo) / width * num_bins).astype(np.int64)
    np.clip(bins, 0, num_bins - 1, out=bins)
    counts = np.bincount(bins, minlength=num_bins)
    p = counts[counts > 0] / v.size
    h = -np.sum(p * np.log2(p))
    return float(h) if h > 0.0 else 0.0


def class_distances(templates, offsets, test):
    """Mean squared distance of ``test`` to each class's block of templates.

    Class ``c`` owns rows ``offsets[c]:offsets[c + 1]``.
    """
    sq = ((templates - test) ** 2).sum(axis=1)
    sums = np.add.reduceat(sq, offsets[:-1])
    return sums / np.diff(offsets)
