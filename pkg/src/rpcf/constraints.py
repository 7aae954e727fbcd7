"""Label, crop mask, spatial regularizer and the pooling constraint system.

All spatial shapes are anchored at the origin cell under circular wrap:
the label peaks at (0, 0), the regularizer is smallest there, and the
crop mask is a rectangle centered on (0, 0) modulo the grid.  Feature
stacks are rolled accordingly before entering the Fourier domain (see
rpcf.tracker).
"""

from dataclasses import dataclass, field

import numpy as np

from . import kernels


@dataclass
class GaussianLabel:
    y: np.ndarray
    sigma: float


@dataclass
class CropMask:
    p: np.ndarray
    target_cells: tuple
    L: int
    clipped: bool = False


@dataclass
class SpatialRegularizer:
    g: np.ndarray
    g_min: float
    g_slope: float


@dataclass
class ConstraintPairSet:
    """Within-kernel index pairs (i_eta, j_eta) over a disjoint tiling.

    idx_i/idx_j are row-major linear indices into the H x W grid; every
    pair lies inside one kernel and kernels tile the mask's nonzero
    region exactly.
    """

    idx_i: np.ndarray
    idx_j: np.ndarray
    kernel_size: tuple
    kernel_anchors: np.ndarray
    dims: tuple
    kernel_cells: np.ndarray = field(default=None, repr=False)

    @property
    def K(self):
        return int(self.idx_i.shape[0])


def _wrapped_offsets(dims):
    H, W = dims
    m = np.fft.fftfreq(H, 1.0 / H)[:, None]
    n = np.fft.fftfreq(W, 1.0 / W)[None, :]
    return m, n


def build_label(dims, target_cells, sigma_factor=0.1):
    """Wrapped Gaussian with peak 1 at the origin, sigma = factor*sqrt(h*w)."""
    h, w = target_cells
    sigma = sigma_factor * np.sqrt(float(h) * float(w))
    m, n = _wrapped_offsets(dims)
    y = np.exp(-(m * m + n * n) / (2.0 * sigma * sigma))
    return GaussianLabel(y=y, sigma=float(sigma))


def _rect_indices(side, dim):
    # side cells centered on the origin under wrap.
    return (np.arange(side) - side // 2) % dim


def build_mask(dims, target_cells, e):
    """Binary crop mask: wrap-centered rectangle, sides padded up to
    multiples of the pooling kernel side (clipped to the grid if needed)."""
    H, W = dims
    th, tw = target_cells
    if th > H or tw > W:
        raise ValueError(f"target {target_cells} exceeds grid {dims}")
    eh, ew = _kernel_shape(dims, e)
    clipped = False

    def padded(side, kside, dim):
        nonlocal clipped
        want = int(np.ceil(side / kside)) * kside
        cap = (dim // kside) * kside
        if cap == 0:
            raise ValueError(f"grid dim {dim} smaller than kernel side {kside}")
        if want > cap:
            clipped = True
            want = cap
        return want

    ph = padded(th, eh, H)
    pw = padded(tw, ew, W)
    p = np.zeros(dims)
    rows = _rect_indices(ph, H)
    cols = _rect_indices(pw, W)
    p[np.ix_(rows, cols)] = 1.0
    return CropMask(p=p, target_cells=(ph, pw), L=ph * pw, clipped=clipped)


def build_regularizer(dims, target_cells, g_min=0.1, g_slope=3.0):
    """Quadratic bowl, minimal at the origin, growing toward the wrap boundary."""
    h, w = target_cells
    m, n = _wrapped_offsets(dims)
    g = g_min + g_slope * ((m / float(h)) ** 2 + (n / float(w)) ** 2)
    return SpatialRegularizer(g=g, g_min=g_min, g_slope=g_slope)


def _kernel_shape(dims, e):
    # 1-D grids pool along their single extended axis.
    H, W = dims
    if H == 1 and W == 1:
        return 1, 1
    if H == 1:
        return 1, e
    if W == 1:
        return e, 1
    return e, e


def build_constraint_pairs(mask: CropMask, e):
    """All unordered within-kernel index pairs over the disjoint e x e tiling
    of the mask's nonzero region.

    K = (L / e^2) * C(e^2, 2) in 2-D; for one-row grids the kernels are
    1 x e and K reduces to the 1-D closed form C(e,2) * (floor((L-e)/e)+1).
    """
    H, W = mask.p.shape
    eh, ew = _kernel_shape((H, W), e)
    ph, pw = mask.target_cells
    if ph % eh or pw % ew:
        raise ValueError(f"mask region {mask.target_cells} not divisible by kernel {(eh, ew)}")
    rows = _rect_indices(ph, H)
    cols = _rect_indices(pw, W)
    cells_per_kernel = eh * ew

    idx_i, idx_j, anchors, kernel_cells = [], [], [], []
    for br in range(0, ph, eh):
        for bc in range(0, pw, ew):
            cell_idx = [
                int(rows[br + a] * W + cols[bc + b])
                for a in range(eh)
                for b in range(ew)
            ]
            anchors.append(cell_idx[0])
            kernel_cells.append(cell_idx)
            for a in range(cells_per_kernel):
                for b in range(a + 1, cells_per_kernel):
                    idx_i.append(cell_idx[a])
                    idx_j.append(cell_idx[b])
    return ConstraintPairSet(
        idx_i=np.asarray(idx_i, dtype=np.int64),
        idx_j=np.asarray(idx_j, dtype=np.int64),
        kernel_size=(eh, ew),
        kernel_anchors=np.asarray(anchors, dtype=np.int64),
        dims=(H, W),
        kernel_cells=np.asarray(kernel_cells, dtype=np.int64)
        if kernel_cells
        else np.zeros((0, cells_per_kernel), dtype=np.int64),
    )


def apply_V(pairs: ConstraintPairSet, w):
    """Pairwise differences w[i_eta] - w[j_eta] as a length-K vector."""
    w = np.asarray(w, dtype=np.float64)
    if pairs.K == 0:
        return np.zeros(0)
    return kernels.pair_diff(w.ravel(), pairs.idx_i, pairs.idx_j)


def apply_Vt(pairs: ConstraintPairSet, z):
    """Adjoint of apply_V: scatter +z at i_eta, -z at j_eta."""
    H, W = pairs.dims
    if pairs.K == 0:
        return np.zeros((H, W))
    out = kernels.pair_scatter_add(np.asarray(z, dtype=np.float64), pairs.idx_i, pairs.idx_j, H * W)
    return out.reshape(H, W)


def apply_VtV(pairs: ConstraintPairSet, w):
    """Fused apply_Vt(apply_V(w)) via table lookups."""
    H, W = pairs.dims
    if pairs.K == 0:
        return np.zeros((H, W))
    w = np.asarray(w, dtype=np.float64)
    return kernels.pair_diff_scatter(w.ravel(), pairs.idx_i, pairs.idx_j).reshape(H, W)


def kernel_mean_pool(pairs: ConstraintPairSet, grid):
    """Per-kernel means of a grid over the mask tiling (one value per kernel)."""
    flat = np.asarray(grid, dtype=np.float64).ravel()
    return flat[pairs.kernel_cells].mean(axis=1)
