"""Window family and filter bank: contracts, reductions, spectral oracles."""
import numpy as np
import pytest

from ssn import grid
from ssn.errors import DegenerateWindowError
from ssn.stransform import (
    SQRT_2PI,
    FilterBank,
    ParameterSet,
    build_filter_bank,
    channel_center,
    directional_filter_spectrum,
    lowpass_filter_spectrum,
    rotation_matrix,
    st_convolve,
    window_amplitude,
)

TABLE1 = ParameterSet(2.62, 1.0, -0.98)
TABLE2 = ParameterSet(2.84, 1.0, -0.89)


def signed_bins(m):
    nu = np.arange(m, dtype=float)
    nu[(m + 1) // 2:] -= m
    return nu


def folded_kernel_samples(center, factors, width, height, wraps=40):
    """Independent spatial oracle: pointwise samples of the Gaussian window
    times the +f modulation, folded over periodic images of the grid."""

    def axis(m, comp, a):
        r = np.arange(-wraps, wraps + 1)[None, :]
        t = (np.arange(m)[:, None] + r * m) / m  # sample positions in extents
        vals = (a / SQRT_2PI) * np.exp(-(t * a) ** 2 / 2.0)
        vals = vals * np.exp(2j * np.pi * comp * t)
        return vals.sum(axis=1)

    ax = axis(width, center[0], factors[0])
    ay = axis(height, center[1], factors[1])
    return np.outer(ay, ax)


def direct_circular_convolution(image, kernel):
    """O(n^4) spatial-domain circular convolution."""
    h, w = image.shape
    out = np.zeros((h, w), dtype=complex)
    for y in range(h):
        for x in range(w):
            acc = 0.0 + 0.0j
            for v in range(h):
                for u in range(w):
                    acc += image[v, u] * kernel[(y - v) % h, (x - u) % w]
            out[y, x] = acc
    return out


class TestWindowAmplitude:
    def test_classic_window_at_unit_frequency(self):
        assert window_amplitude(ParameterSet(1, 1, 0), 1.0) == pytest.approx(
            0.3989422804014327, abs=1e-12
        )

    def test_table1_parameters(self):
        # |2.62*1 - 0.98| / sqrt(2*pi), evaluated exactly
        assert window_amplitude(TABLE1, 1.0) == pytest.approx(
            0.6542653398583497, abs=1e-12
        )

    def test_stft_reduction_is_constant_in_frequency(self):
        params = ParameterSet(0, 1, 1)
        for f in (0.0, 0.5, 1.0, 3.0, 10.0):
            assert window_amplitude(params, f) == pytest.approx(
                0.3989422804014327, abs=1e-15
            )

    def test_table2_zero_frequency_amplitude(self):
        # |-0.89| / sqrt(2*pi), evaluated exactly
        assert window_amplitude(TABLE2, 0.0) == pytest.approx(
            0.35505862955727513, abs=1e-12
        )

    def test_rejects_exact_zero_width(self):
        with pytest.raises(DegenerateWindowError):
            window_amplitude(ParameterSet(1, 1, -1), 1.0)

    def test_negative_width_factor_allowed_via_absolute_value(self):
        assert window_amplitude(ParameterSet(1, 1, -3), 1.0) == pytest.approx(
            2.0 / SQRT_2PI
        )


class TestRotationMatrix:
    def test_full_turn_is_identity(self):
        assert np.allclose(rotation_matrix(4, 4), np.eye(2), atol=1e-15)

    def test_quarter_turn(self):
        assert np.allclose(
            rotation_matrix(1, 4), np.array([[0, -1], [1, 0]]), atol=1e-15
        )

    @pytest.mark.parametrize("n,N", [(1, 3), (2, 5), (7, 8), (5, 12)])
    def test_orthogonality_and_unit_determinant(self, n, N):
        m = rotation_matrix(n, N)
        assert np.max(np.abs(m.T @ m - np.eye(2))) < 1e-15
        assert np.linalg.det(m) == pytest.approx(1.0, abs=1e-15)


class TestDirectionalFilter:
    def test_unrotated_channel_peaks_at_reference_frequency(self):
        F = directional_filter_spectrum(TABLE1, (1, 4), 4, 16, 16)
        row, col = np.unravel_index(np.argmax(np.abs(F)), F.shape)
        assert (row, col) == (0, 1)  # frequency (1, 0)

    def test_quarter_turn_channel_peaks_at_rotated_frequency(self):
        # r_1^{-1} (1, 0) = (0, -1)
        F = directional_filter_spectrum(TABLE1, (1, 1), 4, 16, 16)
        row, col = np.unravel_index(np.argmax(np.abs(F)), F.shape)
        assert (row, col) == (15, 0)  # frequency (0, -1)

    @pytest.mark.parametrize("channel", [(1, 4), (1, 1), (2, 2), (2, 3)])
    def test_even_symmetry_about_center(self, channel):
        F = np.abs(directional_filter_spectrum(TABLE1, channel, 4, 16, 16))
        cx, cy = channel_center(*channel, 4)
        peak = F.max()
        for dy in range(-5, 6):
            for dx in range(-5, 6):
                a = F[int(cy + dy) % 16, int(cx + dx) % 16]
                b = F[int(cy - dy) % 16, int(cx - dx) % 16]
                assert abs(a - b) <= 1e-10 * peak

    @pytest.mark.parametrize("channel", [(1, 4), (1, 1), (2, 3), (3, 2)])
    def test_spatial_kernel_matches_pointwise_sampling(self, channel):
        # Inverse DFT of the analytic spectrum vs direct evaluation of the
        # modulated window on the (periodized) 8x8 grid.
        W = H = 8
        F = directional_filter_spectrum(TABLE1, channel, 4, W, H)
        kernel = grid.ifft2(F) * (W * H)
        cx, cy = channel_center(channel[0], channel[1], 4)
        factors = (TABLE1.width_factor(abs(cx)), TABLE1.width_factor(abs(cy)))
        sampled = folded_kernel_samples((cx, cy), factors, W, H)
        assert np.max(np.abs(kernel - sampled)) < 1e-8

    def test_rejects_zero_width_at_nonzero_component(self):
        with pytest.raises(DegenerateWindowError):
            directional_filter_spectrum(ParameterSet(1, 1, -1), (1, 4), 4, 8, 8)

    def test_rejects_bad_channel_indices(self):
        with pytest.raises(ValueError):
            directional_filter_spectrum(TABLE1, (0, 1), 4, 8, 8)
        with pytest.raises(ValueError):
            directional_filter_spectrum(TABLE1, (1, 5), 4, 8, 8)


class TestLowpassFilter:
    def test_stft_reduction_matches_fixed_gaussian(self):
        F = lowpass_filter_spectrum(ParameterSet(0, 1, 1), 16, 16)
        nu = signed_bins(16)
        expected = np.exp(-2 * np.pi**2 * nu**2)  # unit width, unit peak
        assert np.max(np.abs(F[0, :] - expected)) < 1e-12
        assert np.max(np.abs(F[:, 0] - expected)) < 1e-12

    def test_real_nonnegative_peaked_at_dc(self):
        F = lowpass_filter_spectrum(TABLE1, 12, 10)
        assert np.max(np.abs(F.imag)) == 0.0
        assert np.min(F.real) >= 0.0
        assert np.argmax(F.real) == 0

    def test_dc_equals_sum_of_spatial_kernel(self):
        F = lowpass_filter_spectrum(TABLE2, 16, 16)
        kernel_sum = np.sum(grid.ifft2(F))
        assert F[0, 0].real == pytest.approx(float(kernel_sum.real), abs=1e-12)
        assert F[0, 0].real > 0.0


class TestBuildFilterBank:
    def test_cardinality(self):
        bank = build_filter_bank(TABLE1, 2, 4, 8, 8)
        assert len(bank.bandpass) == 8
        assert bank.lowpass.shape == (8, 8)

    def test_determinism_bit_identical(self):
        a = build_filter_bank(TABLE1, 2, 4, 12, 16)
        b = build_filter_bank(TABLE1, 2, 4, 12, 16)
        assert np.array_equal(a.lowpass, b.lowpass)
        for ch in a.bandpass:
            assert np.array_equal(a.bandpass[ch], b.bandpass[ch])

    def test_degenerate_channel_identified(self):
        with pytest.raises(DegenerateWindowError, match=r"\(2, "):
            build_filter_bank(ParameterSet(1, 1, -2), 3, 4, 8, 8)

    def test_all_filters_share_grid_size(self):
        bank = build_filter_bank(TABLE1, 3, 4, 10, 14)
        assert bank.lowpass.shape == (14, 10)
        assert all(f.shape == (14, 10) for f in bank.bandpass.values())


def wavelet_bank_oracle(scale_a, P, N, width, height):
    """Independently coded dilated-rotated wavelet family.

    The mother filter analyses frequency (1, 0) with spectral profile
    exp(-2*pi^2*(nu-1)^2*a^2) along x and a zero-frequency line mask along
    y. Children are built by frequency dilation nu -> nu/p and quarter-turn
    rotations implemented with exact integer matrices, then periodized by an
    explicit loop. Valid for N divisible by 4.
    """
    assert N % 4 == 0

    def axis_profile(m, center, inv_scale):
        # inv_scale = width factor; 0 means the single-bin line mask
        nu = signed_bins(m)
        out = np.zeros(m)
        if inv_scale == 0.0:
            for i, v in enumerate(nu):
                if (v - center) % m == 0:
                    out[i] = 1.0
            return out
        for i, v in enumerate(nu):
            total = 0.0
            for r in range(-6, 7):
                d = v - center + r * m
                total += np.exp(-2 * np.pi**2 * d**2 / inv_scale**2)
            out[i] = total
        return out

    quarter = np.array([[0, -1], [1, 0]])  # exact integer +90 degrees
    filters = {}
    for p in range(1, P + 1):
        for n in range(1, N + 1):
            # inverse rotation by theta_n, built from integer quarter turns
            steps = (-n * 4 // N) % 4
            rot = np.linalg.matrix_power(quarter, steps)
            center = rot @ np.array([p, 0])
            widths = np.abs(center) / scale_a
            fx = axis_profile(width, center[0], widths[0])
            fy = axis_profile(height, center[1], widths[1])
            filters[(p, n)] = np.outer(fy, fx)
    lowpass = np.outer(axis_profile(height, 0, 0.0), axis_profile(width, 0, 0.0))
    return lowpass, filters


class TestReductions:
    @pytest.mark.parametrize("scale_a", [1.0, 2.0])
    def test_wavelet_reduction_matches_independent_bank(self, scale_a):
        bank = build_filter_bank(ParameterSet(1.0 / scale_a, 1.0, 0.0), 2, 4, 16, 16)
        lowpass, filters = wavelet_bank_oracle(scale_a, 2, 4, 16, 16)
        assert np.max(np.abs(bank.lowpass - lowpass)) < 1e-8
        for ch, expected in filters.items():
            assert np.max(np.abs(bank.bandpass[ch] - expected)) < 1e-8, ch

    def test_stft_reduction_constant_widths(self):
        params = ParameterSet(0.0, 1.0, 1.0)
        centers = [abs(c) for p in (1, 2) for c in channel_center(p, 1, 4)]
        widths = {params.width_factor(c) for c in centers} | {params.width_factor(0.0)}
        assert max(widths) - min(widths) < 1e-12

    def test_stft_reduction_filters_are_translates(self):
        bank = build_filter_bank(ParameterSet(0.0, 1.0, 1.0), 2, 4, 16, 16)
        ref = bank.bandpass[(1, 4)]  # center (1, 0)
        for ch, F in bank.bandpass.items():
            cx, cy = channel_center(ch[0], ch[1], 4)
            rolled = np.roll(np.roll(ref, int(cy), axis=0), int(cx) - 1, axis=1)
            assert np.max(np.abs(F - rolled)) < 1e-12, ch


class TestStConvolve:
    def test_identity_filter(self):
        rng = np.random.default_rng(0)
        x = rng.standard_normal((6, 7))
        out = st_convolve(x, np.ones((6, 7), dtype=complex))
        assert np.max(np.abs(out - x)) < 1e-12

    def test_impulse_recovers_kernel(self):
        bank = build_filter_bank(TABLE1, 1, 4, 8, 8)
        impulse = np.zeros((8, 8))
        impulse[0, 0] = 1.0
        F = bank.bandpass[(1, 4)]
        out = st_convolve(impulse, F)
        assert np.max(np.abs(out - grid.ifft2(F))) < 1e-14

    def test_matches_direct_spatial_convolution(self):
        rng = np.random.default_rng(42)
        bank = build_filter_bank(TABLE1, 2, 4, 8, 8)
        x = rng.standard_normal((8, 8))
        for ch in [(1, 4), (2, 1)]:
            kernel = grid.ifft2(bank.bandpass[ch])
            expected = direct_circular_convolution(x, kernel)
            got = st_convolve(x, bank.bandpass[ch])
            assert np.max(np.abs(got - expected)) < 1e-10

    def test_dimension_mismatch_rejected(self):
        with pytest.raises(ValueError):
            st_convolve(np.zeros((4, 4)), np.ones((4, 5), dtype=complex))

    def test_translation_covariance(self):
        rng = np.random.default_rng(9)
        bank = build_filter_bank(TABLE1, 2, 4, 12, 12)
        x = rng.standard_normal((12, 12))
        F = bank.bandpass[(2, 3)]
        lhs = st_convolve(grid.circular_shift(x, 3, 5), F)
        rhs = grid.circular_shift(st_convolve(x, F), 3, 5)
        assert np.max(np.abs(lhs - rhs)) < 1e-12


def rot90_torus(a):
    """+90 degree rotation about the grid origin on the torus:
    out(x, y) = in(y, -x mod m)."""
    m = a.shape[0]
    assert a.shape[0] == a.shape[1]
    idx = np.arange(m)
    ys, xs = np.meshgrid(idx, idx, indexing="ij")
    return a[(-xs) % m, ys]


class TestRotationCovariance:
    def test_quarter_turn_permutes_channels(self):
        # Rotating the input by 90 degrees maps the response of channel
        # (p, n) to the rotated response of channel (p, n + N/4 mod N).
        rng = np.random.default_rng(21)
        M, N = 16, 4
        x = rng.standard_normal((M, M))
        bank = build_filter_bank(TABLE1, 2, N, M, M)
        xr = rot90_torus(x)
        for (p, n), F in bank.bandpass.items():
            partner = (p, n % N + 1)
            lhs = np.abs(st_convolve(xr, F))
            rhs = rot90_torus(np.abs(st_convolve(x, bank.bandpass[partner])))
            assert np.max(np.abs(lhs - rhs)) < 1e-10, (p, n)
