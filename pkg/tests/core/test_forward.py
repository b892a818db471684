import numpy as np
import pytest

from c2f_motion.core.forward import (
    apply_adjoint, apply_forward, make_coil_profiles, simulate_measurements, zero_filled,
)
from c2f_motion.core.numerics import fft2c, ifft2c, inner, make_rng
from c2f_motion.types import (
    InvalidMaskError, MotionFreeStateError, SamplingMask, ShapeMismatchError, zero_field,
)


def random_mask(rng, shape, fraction=0.4):
    keep = rng.random(shape) < fraction
    keep[shape[0] // 2, shape[1] // 2] = True
    return keep


class TestApplyForward:
    """M F S Φ x per coil"""

    def test_reduces_to_fft(self, random_image, build_problem):
        x = random_image()
        prob = build_problem(x.shape)
        y = apply_forward(x, zero_field(x.shape), 0, prob)
        assert y.shape == (1, 8, 8)
        assert np.allclose(y[0], fft2c(x))

    def test_empty_mask_rejected(self, build_problem):
        with pytest.raises(InvalidMaskError):
            build_problem((8, 8), masks=[np.zeros((8, 8), dtype=np.bool_)])

    def test_integer_shift_against_direct_shift(self, random_image, build_problem):
        x = random_image()
        prob = build_problem(x.shape)
        field = zero_field(x.shape)
        field[0] = 1.0
        shifted = np.zeros_like(x)
        shifted[:-1] = x[1:]
        assert np.allclose(apply_forward(x, field, 0, prob)[0], fft2c(shifted))

    def test_masked_entries_zero_and_idempotent(self, random_image, build_problem, rng):
        x = random_image()
        mask = random_mask(rng, x.shape)
        prob = build_problem(x.shape, masks=[mask])
        y = apply_forward(x, zero_field(x.shape), 0, prob)
        assert np.array_equal(y[:, ~mask], np.zeros((1, int((~mask).sum()))))
        assert np.array_equal(mask * y, y)

    def test_linear(self, random_image, build_problem, rng):
        x, z = random_image(), random_image()
        prob = build_problem(x.shape, masks=[random_mask(rng, x.shape)])
        u = rng.uniform(-2, 2, (2, 8, 8))
        lhs = apply_forward(3 * x + 1j * z, u, 0, prob)
        rhs = 3 * apply_forward(x, u, 0, prob) + 1j * apply_forward(z, u, 0, prob)
        assert np.allclose(lhs, rhs)

    def test_shape_mismatch(self, random_image, build_problem):
        prob = build_problem((8, 8))
        with pytest.raises(ShapeMismatchError):
            apply_forward(random_image((8, 6)), zero_field((8, 8)), 0, prob)


class TestApplyAdjoint:
    """Σ conj(S) F⁻¹ M y"""

    @pytest.mark.parametrize("n_coils", [1, 4])
    def test_dot_product(self, random_image, build_problem, rng, n_coils):
        shape = (12, 12)
        maps = make_coil_profiles(shape, n_coils)
        masks = [random_mask(rng, shape) for _ in range(3)]
        prob = build_problem(shape, masks=masks, maps=maps)
        x = random_image(shape)
        for state in range(3):
            y = np.stack([random_image(shape) for _ in range(n_coils)]) * masks[state]
            lhs = inner(apply_forward(x, zero_field(shape), state, prob), y)
            rhs = inner(x, apply_adjoint(y, state, prob))
            assert abs(lhs - rhs) <= 1e-10 * np.linalg.norm(x) * np.linalg.norm(y)

    def test_zero_data(self, build_problem):
        prob = build_problem((8, 8))
        assert np.array_equal(apply_adjoint(np.zeros((1, 8, 8), dtype=np.complex128), 0, prob),
                              np.zeros((8, 8)))

    def test_single_flat_coil_is_ifft(self, random_image, build_problem):
        k = random_image()
        prob = build_problem(k.shape)
        assert np.allclose(apply_adjoint(k[None], 0, prob), ifft2c(k))

    def test_wrong_coil_count(self, random_image, build_problem):
        prob = build_problem((8, 8))
        with pytest.raises(ShapeMismatchError):
            apply_adjoint(np.zeros((2, 8, 8), dtype=np.complex128), 0, prob)


class TestSimulateMeasurements:
    """Per-state forward model plus noise on sampled entries only"""

    def test_noise_free_matches_forward(self, random_image, rng):
        x = random_image((16, 16))
        maps = make_coil_profiles(x.shape, 3)
        masks = [SamplingMask(keep=random_mask(rng, x.shape)) for _ in range(2)]
        fields = [zero_field(x.shape), rng.uniform(-1, 1, (2, 16, 16))]
        prob = simulate_measurements(x, fields, masks, maps, 0.0, rng)
        for state in range(2):
            assert np.allclose(prob.measurements[state], apply_forward(x, fields[state], state, prob))

    def test_single_state_full_mask(self, random_image, flat_maps, rng):
        x = random_image()
        full = SamplingMask(keep=np.ones(x.shape, dtype=np.bool_))
        prob = simulate_measurements(x, [zero_field(x.shape)], [full], flat_maps(x.shape), 0.0, rng)
        assert np.allclose(prob.measurements[0, 0], fft2c(x))

    def test_moving_reference_state_rejected(self, random_image, flat_maps, rng):
        x = random_image()
        field = zero_field(x.shape)
        field[1, 2, 2] = 0.5
        full = SamplingMask(keep=np.ones(x.shape, dtype=np.bool_))
        with pytest.raises(MotionFreeStateError):
            simulate_measurements(x, [field], [full], flat_maps(x.shape), 0.0, rng)

    def test_noise_level_on_sampled_entries(self, random_image, rng):
        shape = (64, 64)
        x = random_image(shape)
        maps = make_coil_profiles(shape, 8)
        keep = np.zeros(shape, dtype=np.bool_)
        keep[:, ::2] = True
        mask = SamplingMask(keep=keep)
        sigma = 0.3
        noisy = simulate_measurements(x, [zero_field(shape)], [mask], maps, sigma, make_rng(5))
        clean = simulate_measurements(x, [zero_field(shape)], [mask], maps, 0.0, make_rng(5))
        noise = noisy.measurements[0] - clean.measurements[0]
        sampled = noise[:, keep]
        assert sampled.size >= 10_000
        assert abs(np.sqrt(np.mean(np.abs(sampled) ** 2)) - sigma) <= 0.05 * sigma
        assert np.array_equal(noise[:, ~keep], np.zeros((8, int((~keep).sum()))))


class TestCoilProfiles:
    """Simulated sensitivity maps"""

    def test_single_coil_is_constant_one(self):
        maps = make_coil_profiles((16, 16), 1)
        assert np.allclose(maps.maps, 1.0)

    def test_unit_rss(self):
        maps = make_coil_profiles((32, 24), 4)
        rss = np.sqrt(np.sum(np.abs(maps.maps) ** 2, axis=0))
        assert np.allclose(rss, 1.0, atol=1e-9)

    def test_profiles_are_smooth(self):
        maps = make_coil_profiles((64, 64), 4).maps
        d_row = np.abs(np.diff(maps, axis=1))
        d_col = np.abs(np.diff(maps, axis=2))
        assert d_row.max() < 0.2
        assert d_col.max() < 0.2

    def test_needs_a_coil(self):
        with pytest.raises(ValueError):
            make_coil_profiles((8, 8), 0)


class TestZeroFilled:
    """Coil-combined adjoint of the pooled k-space"""

    def test_full_sampling_recovers_image(self, random_image, full_data_problem):
        x = random_image()
        assert np.allclose(zero_filled(full_data_problem(x)), x)

    def test_complementary_states_recover_image(self, random_image, build_problem):
        x = random_image()
        keep = np.zeros(x.shape, dtype=np.bool_)
        keep[::2] = True
        k = fft2c(x)
        y = np.stack([(keep * k)[None], (~keep * k)[None]])
        prob = build_problem(x.shape, masks=[keep, ~keep], measurements=y)
        assert np.allclose(zero_filled(prob), x)
        assert np.allclose(zero_filled(prob, states=[0]), ifft2c(keep * k))
