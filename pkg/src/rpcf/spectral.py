"""2-D DFT utilities shared by every other module.

Convention (fixed project-wide): unnormalized forward transform,
1/(H*W) on the inverse, so Parseval reads ||x||^2 = ||x_hat||^2 / (H*W).
Spectra of real grids are Hermitian-symmetric and the inverse asserts
this before discarding the imaginary residue.
"""

import numpy as np

HERMITIAN_TOL = 1e-6


class SpectralError(ValueError):
    pass


def _as_grid(x):
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 1 or x.shape[1] < 1:
        raise SpectralError(f"expected a 2-D grid, got shape {x.shape}")
    return x


def forward(x):
    """Unnormalized forward 2-D DFT of a real grid."""
    x = _as_grid(x)
    if not np.all(np.isfinite(x)):
        bad = np.argwhere(~np.isfinite(x))[0]
        raise SpectralError(f"non-finite input at cell {tuple(bad)}")
    return np.fft.fft2(x)


def hermitian_error(X):
    """Max relative deviation of X from conjugate symmetry."""
    X = np.asarray(X, dtype=np.complex128)
    mirrored = np.conj(X[np.ix_(*[(-np.arange(s)) % s for s in X.shape])])
    scale = np.max(np.abs(X))
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(X - mirrored)) / scale)


def inverse(X, strict=True):
    """Inverse 2-D DFT, returning the real grid.

    With strict=True the spectrum must be Hermitian-symmetric within
    HERMITIAN_TOL (relative); the offending bin is reported otherwise.
    """
    X = np.asarray(X, dtype=np.complex128)
    if X.ndim != 2:
        raise SpectralError(f"expected a 2-D spectrum, got shape {X.shape}")
    if strict:
        mirrored = np.conj(X[np.ix_(*[(-np.arange(s)) % s for s in X.shape])])
        scale = max(float(np.max(np.abs(X))), 1e-300)
        dev = np.abs(X - mirrored) / scale
        worst = np.unravel_index(int(np.argmax(dev)), dev.shape)
        if dev[worst] > HERMITIAN_TOL:
            raise SpectralError(
                f"spectrum not Hermitian-symmetric: bin {worst} deviates by "
                f"{dev[worst]:.3e} (relative)"
            )
    return np.fft.ifft2(X).real


def circular_convolve(a, b):
    """Circular convolution of two equal-size real grids, computed spectrally."""
    a = _as_grid(a)
    b = _as_grid(b)
    if a.shape != b.shape:
        raise SpectralError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return np.fft.ifft2(np.fft.fft2(a) * np.fft.fft2(b)).real


def spectral_mask_multiply(m, v_hat):
    """Multiply a spectrum by the circulant operator of a real mask.

    Computes F(m * F^-1(v_hat)) without forming the dense Toeplitz matrix;
    equals (F diag(m) F^-1) v_hat, which is self-adjoint for real m.
    """
    m = _as_grid(m)
    v_hat = np.asarray(v_hat, dtype=np.complex128)
    if m.shape != v_hat.shape:
        raise SpectralError(f"dimension mismatch: {m.shape} vs {v_hat.shape}")
    return np.fft.fft2(m * np.fft.ifft2(v_hat))


def _centered_freqs(n):
    # Integer frequencies with the Nyquist bin split evenly between +n/2
    # and -n/2 so the trig interpolant of a real grid stays real.
    k = np.fft.fftfreq(n, d=1.0 / n)
    w = np.ones(n)
    if n % 2 == 0:
        k[n // 2] = n // 2
        w[n // 2] = 0.5
    return k, w


def _trig_eval(R, ky, kx, wy, wx, t):
    """Interpolant value, gradient and Hessian at fractional position t=(ty,tx)."""
    H, W = R.shape
    ey = wy * np.exp(2j * np.pi * ky * t[0] / H)
    ex = wx * np.exp(2j * np.pi * kx * t[1] / W)
    if H % 2 == 0:
        # Nyquist split: conjugate pair collapses to a cosine in that axis.
        ey[H // 2] = np.cos(np.pi * t[0])
    if W % 2 == 0:
        ex[W // 2] = np.cos(np.pi * t[1])
    ay = 2j * np.pi * ky / H
    ax = 2j * np.pi * kx / W
    dy = ay * ey
    dx = ax * ex
    dyy = ay * ay * ey
    dxx = ax * ax * ex
    if H % 2 == 0:
        dy[H // 2] = -np.pi * np.sin(np.pi * t[0])
        dyy[H // 2] = -np.pi * np.pi * np.cos(np.pi * t[0])
    if W % 2 == 0:
        dx[W // 2] = -np.pi * np.sin(np.pi * t[1])
        dxx[W // 2] = -np.pi * np.pi * np.cos(np.pi * t[1])
    scale = 1.0 / (H * W)
    val = np.real(ey @ R @ ex) * scale
    g = np.array([np.real(dy @ R @ ex), np.real(ey @ R @ dx)]) * scale
    hess = np.array(
        [
            [np.real(dyy @ R @ ex), np.real(dy @ R @ dx)],
            [np.real(dy @ R @ dx), np.real(ey @ R @ dxx)],
        ]
    ) * scale
    return val, g, hess


def _wrap_offset(v, n):
    # Wrap into (-n/2, n/2].
    v = v % n
    if v > n / 2:
        v -= n
    return v


def subpixel_peak(r, upsample=4, newton_iters=5):
    """Locate the maximum of the trigonometric interpolant of a response map.

    Coarse search on a zero-padded-spectrum upsampled grid, then Newton
    refinement.  Returns (dy, dx, value, degenerate) with offsets in
    fractional cells wrapped to (-H/2, H/2] x (-W/2, W/2].  A flat map
    returns the origin with degenerate=True.
    """
    r = _as_grid(r)
    H, W = r.shape
    if upsample < 1:
        raise SpectralError("upsample must be >= 1")
    span = float(np.max(r) - np.min(r))
    if span <= 1e-15 * max(1.0, abs(float(np.max(r)))):
        return 0.0, 0.0, float(r[0, 0]), True

    R = np.fft.fft2(r)
    if upsample == 1:
        coarse = r
    else:
        Hp, Wp = H * upsample, W * upsample
        Rp = np.zeros((Hp, Wp), dtype=np.complex128)
        ys = np.fft.fftfreq(H, 1.0 / H).astype(int)
        xs = np.fft.fftfreq(W, 1.0 / W).astype(int)
        Rp[np.ix_(ys % Hp, xs % Wp)] = R
        coarse = np.fft.ifft2(Rp).real * (upsample * upsample)
    iy, ix = np.unravel_index(int(np.argmax(coarse)), coarse.shape)
    t = np.array([iy / upsample, ix / upsample], dtype=np.float64)

    ky, wy = _centered_freqs(H)
    kx, wx = _centered_freqs(W)
    val, g, hess = _trig_eval(R, ky, kx, wy, wx, t)
    for _ in range(newton_iters):
        det = hess[0, 0] * hess[1, 1] - hess[0, 1] * hess[1, 0]
        if abs(det) < 1e-30:
            break
        step = np.linalg.solve(hess, g)
        # Descent on -value: only accept steps that increase the interpolant.
        cand = t - step
        cval, cg, chess = _trig_eval(R, ky, kx, wy, wx, cand)
        shrink = 0
        while cval < val and shrink < 8:
            step *= 0.5
            cand = t - step
            cval, cg, chess = _trig_eval(R, ky, kx, wy, wx, cand)
            shrink += 1
        if cval < val:
            break
        t, val, g, hess = cand, cval, cg, chess
        if float(np.hypot(step[0], step[1])) < 1e-4:
            break
    return _wrap_offset(float(t[0]), H), _wrap_offset(float(t[1]), W), float(val), False
