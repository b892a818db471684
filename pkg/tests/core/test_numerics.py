import numpy as np
import pytest

from c2f_motion.core.numerics import complex_normal, fft2c, frequency_radius, ifft2c, inner, make_rng
from c2f_motion.types import NonFiniteInputError


class TestCenteredFft:
    """fft2c / ifft2c: unitary, DC-centred, batched over leading axes"""

    # ------------------------------------------------------------------------
    # Closed-form values
    # ------------------------------------------------------------------------

    def test_zero_image(self):
        assert np.array_equal(fft2c(np.zeros((4, 4), dtype=np.complex128)), np.zeros((4, 4)))

    def test_centred_impulse_gives_constant(self):
        x = np.zeros((4, 4), dtype=np.complex128)
        x[2, 2] = 1.0
        assert np.allclose(fft2c(x), np.full((4, 4), 0.25), atol=1e-15)

    def test_constant_grid_inverts_to_impulse(self):
        expected = np.zeros((4, 4))
        expected[2, 2] = 1.0
        assert np.allclose(ifft2c(np.full((4, 4), 0.25, dtype=np.complex128)), expected, atol=1e-15)

    def test_odd_size_dc_at_floor_half(self):
        k = fft2c(np.ones((5, 5), dtype=np.complex128))
        assert np.isclose(k[2, 2], 5.0)
        k[2, 2] = 0
        assert np.allclose(k, 0, atol=1e-14)

    # ------------------------------------------------------------------------
    # Properties
    # ------------------------------------------------------------------------

    def test_parseval(self, random_image):
        x = random_image((8, 8))
        assert abs(np.linalg.norm(fft2c(x)) - np.linalg.norm(x)) <= 1e-12 * np.linalg.norm(x)

    def test_round_trip(self, random_image):
        x = random_image((16, 16))
        assert np.linalg.norm(ifft2c(fft2c(x)) - x) <= 1e-12 * np.linalg.norm(x)

    def test_linearity(self, random_image):
        x, y = random_image((12, 10)), random_image((12, 10))
        a, b = 1.5 - 0.5j, -2.0 + 1j
        lhs = fft2c(a * x + b * y)
        rhs = a * fft2c(x) + b * fft2c(y)
        assert np.linalg.norm(lhs - rhs) <= 1e-10 * np.linalg.norm(lhs)

    def test_adjoint_is_inverse(self, random_image):
        x, k = random_image((8, 8)), random_image((8, 8))
        assert np.isclose(inner(fft2c(x), k), inner(x, ifft2c(k)), rtol=1e-12)

    def test_batch_matches_per_image(self, random_image):
        stack = np.stack([random_image((6, 6)) for _ in range(3)])
        batched = fft2c(stack)
        for i in range(3):
            assert np.allclose(batched[i], fft2c(stack[i]))

    # ------------------------------------------------------------------------
    # Errors
    # ------------------------------------------------------------------------

    @pytest.mark.parametrize("bad", [np.nan, np.inf])
    def test_non_finite_rejected(self, bad):
        x = np.zeros((4, 4), dtype=np.complex128)
        x[1, 1] = bad
        with pytest.raises(NonFiniteInputError):
            fft2c(x)
        with pytest.raises(NonFiniteInputError):
            ifft2c(x)


class TestRandomness:
    """Seeded generators and the complex Gaussian convention"""

    def test_same_seed_same_draws(self):
        a = complex_normal(make_rng(7), (4, 4))
        b = complex_normal(make_rng(7), (4, 4))
        assert np.array_equal(a, b)

    def test_complex_normal_unit_variance(self):
        z = complex_normal(make_rng(0), (100_000,))
        assert abs(np.var(z.real) - 0.5) < 0.01
        assert abs(np.var(z.imag) - 0.5) < 0.01
        assert abs(np.mean(np.abs(z) ** 2) - 1.0) < 0.02


def test_frequency_radius_zero_at_dc():
    r = frequency_radius((6, 5))
    assert r[3, 2] == 0
    assert np.isclose(r[0, 0], np.hypot(3, 2))
