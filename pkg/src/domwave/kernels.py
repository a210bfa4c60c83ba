"""Backend selection for the numeric inner loops.

The numba backend is used when numba imports cleanly, unless the environment
variable ``DOMWAVE_NO_NUMBA`` is set to a non-empty value other than ``0``.
Both backends expose the same four functions and agree to rounding error.
"""

import os

import numpy as np

from . import _kernels_numpy

BACKEND = "numpy"
_impl = _kernels_numpy

if os.environ.get("DOMWAVE_NO_NUMBA", "") in ("", "0"):
    try:
        from . import _kernels_numba
    except ImportError:  # pragma: no cover - numba is a declared dependency
        pass
    else:
        _impl = _kernels_numba
        BACKEND = "numba"


def analysis(x, lo, hi, idx):
    x = np.ascontiguousarray(x, dtype=np.float64)
    return _impl.analysis(x, lo, hi, idx)


def synthesis(a, d, lo, hi, n_out):
    a = np.ascontiguousarray(a, dtype=np.float64)
    d = np.ascontiguousarray(d, dtype=np.float64)
    return _impl.synthesis(a, d, lo, hi, n_out)


def histogram_entropy(values, lo, hi, num_bins):
    return _impl.histogram_entropy(values, lo, hi, num_bins)


def class_distances(templates, offsets, test):
    templates = np.ascontiguousarray(templates, dtype=np.float64)
    test = np.ascontiguousarray(test, dtype=np.float64)
    offsets = np.ascontiguousarray(offsets, dtype=np.int64)
    return _impl.class_distances(templates, offsets, test)
