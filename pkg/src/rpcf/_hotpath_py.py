"""Pure numpy fallbacks for the compiled kernels in _hotpath.pyx.

Both implementations must agree bit-for-bit on the binning rule and to
float rounding on the accumulations; tests/test_kernels.py checks this
whenever the extension is available.
"""

import numpy as np


def hog_cell_hist(dy, dx, cell_size, n_bins):
    """Accumulate gradient magnitude into per-cell signed orientation bins.

    dy, dx: per-pixel gradients, shape (H, W) with H, W multiples of
    cell_size.  Returns (H/cell, W/cell, n_bins) float64.
    """
    H, W = dy.shape
    cy, cx = H // cell_size, W // cell_size
    mag = np.hypot(dy, dx)
    theta = np.arctan2(dy, dx) % (2.0 * np.pi)
    bins = np.minimum((theta * (n_bins / (2.0 * np.pi))).astype(np.int64), n_bins - 1)
    cell_row = np.repeat(np.arange(cy), cell_size)[:, None]
    cell_col = np.repeat(np.arange(cx), cell_size)[None, :]
    flat = (cell_row * cx + cell_col) * n_bins + bins
    hist = np.zeros(cy * cx * n_bins)
    np.add.at(hist, flat.ravel(), mag.ravel())
    return hist.reshape(cy, cx, n_bins)


def pair_diff(w_flat, idx_i, idx_j):
    """eta-th output = w[i_eta] - w[j_eta]."""
    return w_flat[idx_i] - w_flat[idx_j]


def pair_scatter_add(z, idx_i, idx_j, n):
    """Adjoint of pair_diff: +z at i, -z at j, accumulated over pairs."""
    out = np.zeros(n)
    np.add.at(out, idx_i, z)
    np.subtract.at(out, idx_j, z)
    return out


def pair_diff_scatter(w_flat, idx_i, idx_j):
    """Fused V^T V lookup: scatter the pairwise differences back."""
    z = w_flat[idx_i] - w_flat[idx_j]
    out = np.zeros(w_flat.shape[0])
    np.add.at(out, idx_i, z)
    np.subtract.at(out, idx_j, z)
    return out
