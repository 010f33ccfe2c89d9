"""Field primitives: DFT contracts, circular shifts, spectral identities."""
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ssn import grid
from ssn.errors import NumericalError


def rand_complex(rng, h, w):
    return rng.standard_normal((h, w)) + 1j * rng.standard_normal((h, w))


class TestFft2:
    def test_impulse_spectrum_is_flat(self):
        field = np.zeros((4, 4), dtype=complex)
        field[0, 0] = 1.0
        spec = grid.fft2(field)
        assert np.allclose(spec, np.ones((4, 4)), atol=1e-15)

    def test_constant_field_concentrates_at_dc(self):
        spec = grid.fft2(np.ones((4, 4)))
        assert spec[0, 0] == pytest.approx(16.0, abs=1e-12)
        off_dc = spec.copy()
        off_dc[0, 0] = 0.0
        assert np.max(np.abs(off_dc)) < 1e-12

    def test_roundtrip_identity(self):
        rng = np.random.default_rng(7)
        x = rand_complex(rng, 8, 8)
        back = grid.ifft2(grid.fft2(x))
        assert np.max(np.abs(back - x)) < 1e-12

    @pytest.mark.parametrize("shape", [(1, 1), (7, 9), (29, 31), (6, 10)])
    def test_roundtrip_on_awkward_sizes(self, shape):
        rng = np.random.default_rng(11)
        x = rand_complex(rng, *shape)
        assert np.max(np.abs(grid.ifft2(grid.fft2(x)) - x)) < 1e-12

    def test_roundtrip_yellow_river_size(self):
        # 291x306 is a deployment-relevant non power of two grid
        rng = np.random.default_rng(3)
        x = rng.standard_normal((306, 291))
        assert np.max(np.abs(grid.ifft2(grid.fft2(x)) - x)) < 1e-12

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            grid.fft2(np.zeros((0, 4)))
        with pytest.raises(ValueError):
            grid.ifft2(np.zeros((4, 0)))

    def test_linearity(self):
        rng = np.random.default_rng(5)
        x, y = rand_complex(rng, 6, 8), rand_complex(rng, 6, 8)
        a, b = 2.5 - 1j, -0.75 + 0.5j
        lhs = grid.fft2(a * x + b * y)
        rhs = a * grid.fft2(x) + b * grid.fft2(y)
        assert np.max(np.abs(lhs - rhs)) < 1e-12

    def test_parseval(self):
        rng = np.random.default_rng(13)
        for h, w in [(8, 8), (7, 5), (12, 9)]:
            x = rand_complex(rng, h, w)
            spatial = np.sum(np.abs(x) ** 2)
            spectral = np.sum(np.abs(grid.fft2(x)) ** 2) / (w * h)
            assert abs(spatial - spectral) / spatial < 1e-10


class TestCircularShift:
    def test_zero_shift_is_identity(self):
        rng = np.random.default_rng(1)
        x = rng.standard_normal((5, 7))
        assert np.array_equal(grid.circular_shift(x, 0, 0), x)

    def test_impulse_moves_to_target(self):
        x = np.zeros((4, 4))
        x[0, 0] = 1.0
        shifted = grid.circular_shift(x, 1, 2)
        assert shifted[2, 1] == 1.0
        assert shifted.sum() == 1.0

    def test_full_period_wraps_to_identity(self):
        rng = np.random.default_rng(2)
        x = rng.standard_normal((3, 6))
        assert np.array_equal(grid.circular_shift(x, 6, 3), x)

    @settings(max_examples=50, deadline=None)
    @given(
        dx1=st.integers(-20, 20), dy1=st.integers(-20, 20),
        dx2=st.integers(-20, 20), dy2=st.integers(-20, 20),
    )
    def test_shifts_compose_additively(self, dx1, dy1, dx2, dy2):
        rng = np.random.default_rng(17)
        x = rng.standard_normal((6, 9))
        twice = grid.circular_shift(grid.circular_shift(x, dx1, dy1), dx2, dy2)
        once = grid.circular_shift(x, dx1 + dx2, dy1 + dy2)
        assert np.array_equal(twice, once)

    def test_shift_convolution_theorem(self):
        # circular shift must act as a pure spectral phase
        rng = np.random.default_rng(23)
        x = rng.standard_normal((8, 8))
        spec = grid.fft2(grid.circular_shift(x, 3, 5))
        ky = np.fft.fftfreq(8)[:, None]
        kx = np.fft.fftfreq(8)[None, :]
        phase = np.exp(-2j * np.pi * (kx * 3 + ky * 5))
        assert np.max(np.abs(spec - grid.fft2(x) * phase)) < 1e-11


class TestValidation:
    def test_real_field_rejects_nan(self):
        with pytest.raises(NumericalError):
            grid.as_real_field(np.array([[1.0, np.nan]]))

    def test_complex_field_rejects_inf(self):
        with pytest.raises(NumericalError):
            grid.as_complex_field(np.array([[1.0, np.inf * 1j]]))

    def test_real_field_passes_through(self):
        x = np.arange(6.0).reshape(2, 3)
        assert np.array_equal(grid.as_real_field(x), x)
