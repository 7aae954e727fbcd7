# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: HOG orientation binning and constraint-pair
gather/scatter.  Semantics mirror rpcf._hotpath_py exactly."""

import numpy as np

cimport numpy as cnp
from libc.math cimport atan2, sqrt, M_PI

cnp.import_array()


def hog_cell_hist(cnp.float64_t[:, :] dy, cnp.float64_t[:, :] dx,
                  int cell_size, int n_bins):
    cdef Py_ssize_t H = dy.shape[0], W = dy.shape[1]
    cdef Py_ssize_t cy = H // cell_size, cx = W // cell_size
    out = np.zeros((cy, cx, n_bins), dtype=np.float64)
    cdef cnp.float64_t[:, :, :] hist = out
    cdef Py_ssize_t i, j, b
    cdef double gy, gx, mag, theta, two_pi = 2.0 * M_PI
    cdef double scale = n_bins / two_pi
    for i in range(H):
        for j in range(W):
            gy = dy[i, j]
            gx = dx[i, j]
            mag = sqrt(gy * gy + gx * gx)
            theta = atan2(gy, gx)
            if theta < 0.0:
                theta += two_pi
            b = <Py_ssize_t>(theta * scale)
            if b > n_bins - 1:
                b = n_bins - 1
            hist[i // cell_size, j // cell_size, b] += mag
    return out


def pair_diff(cnp.float64_t[:] w_flat, cnp.int64_t[:] idx_i, cnp.int64_t[:] idx_j):
    cdef Py_ssize_t K = idx_i.shape[0]
    out = np.empty(K, dtype=np.float64)
    cdef cnp.float64_t[:] z = out
    cdef Py_ssize_t k
    for k in range(K):
        z[k] = w_flat[idx_i[k]] - w_flat[idx_j[k]]
    return out


def pair_scatter_add(cnp.float64_t[:] z, cnp.int64_t[:] idx_i,
                     cnp.int64_t[:] idx_j, Py_ssize_t n):
    cdef Py_ssize_t K = idx_i.shape[0]
    out = np.zeros(n, dtype=np.float64)
    cdef cnp.float64_t[:] acc = out
    cdef Py_ssize_t k
    for k in range(K):
        acc[idx_i[k]] += z[k]
        acc[idx_j[k]] -= z[k]
    return out


def pair_diff_scatter(cnp.float64_t[:] w_flat, cnp.int64_t[:] idx_i,
                      cnp.int64_t[:] idx_j):
    cdef Py_ssize_t K = idx_i.shape[0]
    out = np.zeros(w_flat.shape[0], dtype=np.float64)
    cdef cnp.float64_t[:] acc = out
    cdef Py_ssize_t k
    cdef double d
    for k in range(K):
        d = w_flat[idx_i[k]] - w_flat[idx_j[k]]
        acc[idx_i[k]] += d
        acc[idx_j[k]] -= d
    return out
