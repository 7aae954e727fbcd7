"""Kernel dispatch: compiled extension when present, numpy fallback otherwise.

``BACKEND`` records which one was selected at import.  benchmarks/
bench_kernels.py compares the two.
"""

from . import _hotpath_py

try:
    from . import _hotpath as _impl

    BACKEND = "compiled"
except ImportError:
    _impl = _hotpath_py
    BACKEND = "python"

import numpy as np


def hog_cell_hist(dy, dx, cell_size, n_bins=18):
    dy = np.ascontiguousarray(dy, dtype=np.float64)
    dx = np.ascontiguousarray(dx, dtype=np.float64)
    return _impl.hog_cell_hist(dy, dx, int(cell_size), int(n_bins))


def pair_diff(w_flat, idx_i, idx_j):
    w_flat = np.ascontiguousarray(w_flat, dtype=np.float64)
    return _impl.pair_diff(w_flat, idx_i, idx_j)


def pair_scatter_add(z, idx_i, idx_j, n):
    z = np.ascontiguousarray(z, dtype=np.float64)
    return _impl.pair_scatter_add(z, idx_i, idx_j, int(n))


def pair_diff_scatter(w_flat, idx_i, idx_j):
    w_flat = np.ascontiguousarray(w_flat, dtype=np.float64)
    return _impl.pair_diff_scatter(w_flat, idx_i, idx_j)
