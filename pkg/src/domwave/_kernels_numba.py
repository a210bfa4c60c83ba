"""numba-compiled versions of the hot loops.

Signatures and results match ``_kernels_numpy``; importing this module fails
with ImportError when numba is missing.
"""

import math

import numpy as np
from numba import njit


@njit(cache=True)
def analysis(x, lo, hi, idx):
    rows = x.shape[0]
    m, taps = idx.shape
    a = np.empty((rows, m))
    d = np.empty((rows, m))
    for r in range(rows):
        for i in range(m):
            sa = 0.0
            sd = 0.0
            for k in range(taps):
                s = x[r, idx[i, k]]
                sa += lo[k] * s
                sd += hi[k] * s
            a[r, i] = sa
            d[r, i] = sd
    return a, d


@njit(cache=True)
def synthesis(a, d, lo, hi, n_out):
    rows, m = a.shape
    taps = lo.shape[0]
    out = np.zeros((rows, n_out))
    for r in range(rows):
        for k in range(taps):
            for i in range(m):
                pos = (2 * i + taps - 1 - k) % n_out
                out[r, pos] += lo[k] * a[r, i] + hi[k] * d[r, i]
    return out


@njit(cache=True)
def _entropy(v, lo, hi, num_bins):
    width = hi - lo
    if width <= 0.0:
        return 0.0
    counts = np.zeros(num_bins, dtype=np.int64)
    for j in range(v.size):
        b = int(math.floor((v[j] - lo) / width * num_bins))
        if b < 0:
            b = 0
        elif b >= num_bins:
            b = num_bins - 1
        counts[b] += 1
    h = 0.0
    total = v.size
    for b in range(num_bins):
        if counts[b] > 0:
            p = counts[b] / total
            h -= p * np.log2(p)
    return h if h > 0.0 else 0.0


def histogram_entropy(values, lo, hi, num_bins):
    v = np.ascontiguousarray(values, dtype=np.float64).ravel()
    return float(_entropy(v, float(lo), float(hi), int(num_bins)))


@njit(cache=True)
def class_distances(templates, offsets, test):
    n_classes = offsets.shape[0] - 1
    dim = templates.shape[1]
    out = np.empty(n_classes)
    for c in range(n_classes):
        total = 0.0
        for row in range(offsets[c], offsets[c + 1]):
            s = 0.0
            for i in range(dim):
                diff = templates[row, i] - test[i]
                s += diff * diff
            total += s
        out[c] = total / (offsets[c + 1] - offsets[c])
    return out
