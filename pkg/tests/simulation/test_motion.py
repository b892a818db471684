import numpy as np
import pytest

from c2f_motion.core.numerics import frequency_radius, make_rng
from c2f_motion.simulation.motion import (
    FORCED_CENTER, center_block, partition_mask, random_rigid, random_smooth_field, variable_density_mask,
)
from c2f_motion.types import AccelerationTooHighError, InsufficientSamplesError, SamplingMask


class TestRandomSmoothField:
    """Low-passed white noise rescaled to a peak displacement"""

    def test_peak_displacement(self):
        field = random_smooth_field((64, 64), 15.0, 0.3, make_rng(0))
        assert field.shape == (2, 64, 64)
        assert np.isclose(np.max(np.hypot(field[0], field[1])), 15.0)

    def test_zero_amplitude(self):
        assert np.array_equal(random_smooth_field((16, 16), 0.0, 0.3, make_rng(0)), np.zeros((2, 16, 16)))

    def test_negative_amplitude(self):
        with pytest.raises(ValueError):
            random_smooth_field((16, 16), -1.0, 0.3, make_rng(0))

    def test_seeded(self):
        a = random_smooth_field((32, 32), 5.0, 0.5, make_rng(3))
        b = random_smooth_field((32, 32), 5.0, 0.5, make_rng(3))
        assert np.array_equal(a, b)

    def test_stronger_damping_is_smoother(self):
        def roughness(damping):
            field = random_smooth_field((64, 64), 5.0, damping, make_rng(4))
            return np.mean(np.abs(np.diff(field, axis=1))) + np.mean(np.abs(np.diff(field, axis=2)))
        assert roughness(1.5) < roughness(0.1)


def test_random_rigid_within_ranges():
    rng = make_rng(2)
    for _ in range(50):
        params = random_rigid(5.0, 3.0, rng)
        assert abs(params.theta) <= 5.0
        assert abs(params.d_row) <= 3.0 and abs(params.d_col) <= 3.0


def test_center_block():
    block = center_block((16, 12), 4)
    assert block.sum() == 16
    assert block[6:10, 4:8].all()
    assert not center_block((16, 12), 0).any()


class TestVariableDensityMask:
    """Bernoulli draw with a polynomially decaying density"""

    def test_expected_acceleration(self):
        shape = (256, 256)
        for seed in range(20):
            mask = variable_density_mask(shape, 8.0, 2.0, make_rng(seed))
            assert abs(mask.n_sampled / (256 * 256 / 8) - 1) <= 0.05

    def test_centre_always_sampled(self):
        mask = variable_density_mask((64, 64), 6.0, 2.0, make_rng(1))
        assert mask.keep[center_block((64, 64), FORCED_CENTER)].all()

    def test_density_falls_with_radius(self):
        shape = (256, 256)
        mask = variable_density_mask(shape, 8.0, 2.0, make_rng(5))
        r = frequency_radius(shape)
        inner = mask.keep[(r > FORCED_CENTER) & (r < 32)].mean()
        outer = mask.keep[r > 96].mean()
        assert inner > outer

    def test_no_acceleration_is_full(self):
        assert variable_density_mask((16, 16), 1.0, 2.0, make_rng(0)).keep.all()

    def test_acceleration_below_one(self):
        with pytest.raises(ValueError):
            variable_density_mask((16, 16), 0.5, 2.0, make_rng(0))

    def test_centre_exceeds_budget(self):
        with pytest.raises(AccelerationTooHighError) as info:
            variable_density_mask((32, 32), 20.0, 2.0, make_rng(0))
        assert info.value.limit == 16.0

    def test_seeded(self):
        a = variable_density_mask((64, 64), 4.0, 2.0, make_rng(9))
        b = variable_density_mask((64, 64), 4.0, 2.0, make_rng(9))
        assert np.array_equal(a.keep, b.keep)


class TestPartitionMask:
    """Split of the sampled locations across motion states"""

    @pytest.fixture
    def base(self):
        return variable_density_mask((256, 256), 8.0, 2.0, make_rng(6))

    def test_single_state_unchanged(self, base):
        assert partition_mask(base, 1, "disjoint", 8, make_rng(0)) == (base,)

    def test_disjoint_split(self, base):
        parts = partition_mask(base, 8, "disjoint", 8, make_rng(0))
        assert len(parts) == 8
        stack = np.stack([p.keep for p in parts])
        assert np.array_equal(stack.sum(axis=0), base.keep.astype(int))
        counts = [p.n_sampled for p in parts]
        assert max(counts) - min(counts) <= 1
        for part in parts:
            assert abs(part.acceleration / (8 * base.acceleration) - 1) <= 0.01

    def test_shared_centre(self, base):
        parts = partition_mask(base, 4, "shared", 8, make_rng(0))
        acs = base.keep & center_block(base.shape, 8)
        union = np.zeros(base.shape, dtype=np.bool_)
        for part in parts:
            assert part.keep[acs].all()
            union |= part.keep
        assert np.array_equal(union, base.keep)
        outside = np.stack([p.keep & ~acs for p in parts]).sum(axis=0)
        assert outside.max() == 1

    def test_too_few_samples(self):
        keep = np.zeros((16, 16), dtype=np.bool_)
        keep[0, 0] = keep[15, 15] = True
        with pytest.raises(InsufficientSamplesError) as info:
            partition_mask(SamplingMask(keep=keep), 3, "disjoint", 8, make_rng(0))
        assert (info.value.available, info.value.required) == (2, 3)

    def test_shared_centre_covers_small_masks(self):
        keep = np.zeros((16, 16), dtype=np.bool_)
        keep[8, 8] = True
        parts = partition_mask(SamplingMask(keep=keep), 3, "shared", 4, make_rng(0))
        assert all(part.keep[8, 8] for part in parts)
