import numpy as np
import pytest

from rpcf import spectral


def dft2_direct(x):
    """O(N^2) direct double sum, the independent transform oracle."""
    H, W = x.shape
    out = np.zeros((H, W), dtype=np.complex128)
    for u in range(H):
        for v in range(W):
            acc = 0.0j
            for m in range(H):
                for n in range(W):
                    acc += x[m, n] * np.exp(-2j * np.pi * (u * m / H + v * n / W))
            out[u, v] = acc
    return out


def conv2_direct(a, b):
    H, W = a.shape
    out = np.zeros((H, W))
    for m in range(H):
        for n in range(W):
            acc = 0.0
            for p in range(H):
                for q in range(W):
                    acc += a[p, q] * b[(m - p) % H, (n - q) % W]
            out[m, n] = acc
    return out


def dft_matrix(n):
    k = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(k, k) / n)


class TestForward:
    def test_zeros(self):
        assert np.all(spectral.forward(np.zeros((4, 4))) == 0)

    def test_delta_at_origin(self):
        x = np.zeros((4, 4))
        x[0, 0] = 1.0
        np.testing.assert_allclose(spectral.forward(x), np.ones((4, 4)), atol=1e-12)

    def test_matches_direct_sum(self):
        rng = np.random.default_rng(0)
        x = rng.standard_normal((8, 8))
        np.testing.assert_allclose(spectral.forward(x), dft2_direct(x), rtol=1e-10, atol=1e-9)

    def test_parseval(self):
        rng = np.random.default_rng(1)
        x = rng.standard_normal((8, 8))
        lhs = np.sum(x**2)
        rhs = np.sum(np.abs(spectral.forward(x)) ** 2) / 64.0
        assert abs(lhs - rhs) <= 1e-10 * abs(lhs)

    def test_rejects_non_finite(self):
        x = np.zeros((4, 4))
        x[1, 2] = np.nan
        with pytest.raises(spectral.SpectralError, match="non-finite"):
            spectral.forward(x)


class TestInverse:
    def test_round_trip(self):
        rng = np.random.default_rng(2)
        x = rng.standard_normal((8, 8))
        np.testing.assert_allclose(spectral.inverse(spectral.forward(x)), x, rtol=1e-10, atol=1e-12)

    def test_constant_spectrum_is_delta(self):
        x = np.zeros((4, 4))
        x[0, 0] = 1.0
        np.testing.assert_allclose(spectral.inverse(np.ones((4, 4))), x, atol=1e-12)

    def test_rejects_asymmetric_spectrum(self):
        X = np.fft.fft2(np.random.default_rng(3).standard_normal((6, 6)))
        X[1, 2] += 10.0
        with pytest.raises(spectral.SpectralError, match="Hermitian"):
            spectral.inverse(X)

    def test_hermitian_invariant_of_real_grids(self):
        rng = np.random.default_rng(4)
        for _ in range(5):
            X = spectral.forward(rng.standard_normal((6, 10)))
            assert spectral.hermitian_error(X) < 1e-10


class TestCircularConvolve:
    def test_delta_identity(self):
        rng = np.random.default_rng(5)
        a = rng.standard_normal((5, 7))
        delta = np.zeros((5, 7))
        delta[0, 0] = 1.0
        np.testing.assert_allclose(spectral.circular_convolve(a, delta), a, atol=1e-12)

    def test_1d_shift_kernel(self):
        a = np.array([[1.0, 2.0, 3.0, 4.0]])
        k = np.array([[0.0, 1.0, 0.0, 0.0]])
        np.testing.assert_allclose(
            spectral.circular_convolve(a, k), np.array([[4.0, 1.0, 2.0, 3.0]]), atol=1e-12
        )

    def test_matches_direct_sum(self):
        rng = np.random.default_rng(6)
        a = rng.standard_normal((6, 6))
        b = rng.standard_normal((6, 6))
        got = spectral.circular_convolve(a, b)
        want = conv2_direct(a, b)
        assert np.max(np.abs(got - want)) <= 1e-8 * np.max(np.abs(want))

    def test_convolution_theorem(self):
        rng = np.random.default_rng(7)
        a = rng.standard_normal((8, 8))
        b = rng.standard_normal((8, 8))
        lhs = spectral.forward(spectral.circular_convolve(a, b))
        rhs = spectral.forward(a) * spectral.forward(b)
        assert np.max(np.abs(lhs - rhs)) <= 1e-8 * np.max(np.abs(rhs))

    def test_dimension_mismatch(self):
        with pytest.raises(spectral.SpectralError):
            spectral.circular_convolve(np.zeros((4, 4)), np.zeros((4, 5)))


class TestSpectralMaskMultiply:
    def test_all_ones_identity(self):
        rng = np.random.default_rng(8)
        v = np.fft.fft2(rng.standard_normal((6, 6)))
        np.testing.assert_allclose(
            spectral.spectral_mask_multiply(np.ones((6, 6)), v), v, atol=1e-10
        )

    def test_all_zeros(self):
        v = np.fft.fft2(np.random.default_rng(9).standard_normal((6, 6)))
        np.testing.assert_allclose(
            spectral.spectral_mask_multiply(np.zeros((6, 6)), v), 0, atol=1e-12
        )

    def test_matches_dense_circulant(self):
        # Dense oracle: the matrix F diag(m) F^-1 acting on a length-8
        # spectrum (1-D case embedded as a 1 x 8 grid), whose entries are
        # the mask DFT arranged as a Toeplitz under the fixed convention.
        rng = np.random.default_rng(10)
        N = 8
        m = (rng.random(N) > 0.5).astype(float)
        v = np.fft.fft(rng.standard_normal(N))
        F = dft_matrix(N)
        dense = F @ np.diag(m) @ np.linalg.inv(F)
        m_hat = np.fft.fft(m)
        toeplitz = np.array([[m_hat[(i - j) % N] for j in range(N)] for i in range(N)]) / N
        np.testing.assert_allclose(dense, toeplitz, atol=1e-10)
        got = spectral.spectral_mask_multiply(m[None, :], v[None, :])[0]
        want = dense @ v
        assert np.max(np.abs(got - want)) <= 1e-8 * max(np.max(np.abs(want)), 1e-12)

    def test_self_adjoint(self):
        rng = np.random.default_rng(11)
        m = (rng.random((8, 8)) > 0.4).astype(float)
        v1 = np.fft.fft2(rng.standard_normal((8, 8)))
        v2 = np.fft.fft2(rng.standard_normal((8, 8)))
        lhs = np.vdot(spectral.spectral_mask_multiply(m, v1), v2)
        rhs = np.vdot(v1, spectral.spectral_mask_multiply(m, v2))
        assert abs(lhs - rhs) <= 1e-8 * max(abs(lhs), 1.0)


class TestSubpixelPeak:
    def test_on_grid_delta_is_fixed_point(self):
        r = np.zeros((8, 8))
        r[2, 3] = 1.0
        dy, dx, val, flat = spectral.subpixel_peak(r)
        assert not flat
        assert (dy, dx) == (2.0, 3.0)
        assert val >= 1.0 - 1e-9

    def test_cosine_analytic_peak(self):
        H = W = 16
        m, n = np.meshgrid(np.arange(H), np.arange(W), indexing="ij")
        r = np.cos(2 * np.pi * (m - 1.5) / H) * np.cos(2 * np.pi * (n - 0.25) / W)
        dy, dx, val, flat = spectral.subpixel_peak(r)
        assert not flat
        assert abs(dy - 1.5) <= 1e-3 and abs(dx - 0.25) <= 1e-3

    def test_flat_map_degenerate(self):
        dy, dx, _, flat = spectral.subpixel_peak(np.full((8, 8), 3.0))
        assert flat and (dy, dx) == (0.0, 0.0)

    def test_value_dominates_grid_max(self):
        rng = np.random.default_rng(12)
        for _ in range(5):
            r = rng.standard_normal((10, 12))
            _, _, val, _ = spectral.subpixel_peak(r)
            assert val >= np.max(r) - 1e-9

    def test_wrapped_offsets(self):
        r = np.zeros((8, 8))
        r[7, 6] = 1.0  # wraps to (-1, -2)
        dy, dx, _, _ = spectral.subpixel_peak(r)
        assert (dy, dx) == (-1.0, -2.0)
