import numpy as np
import pytest

from c2f_motion.core.numerics import fft2c, frequency_radius
from c2f_motion.diffusion import PowerSpectrum, ShellSchedule, WienerDenoiser
from c2f_motion.types import MotionProblem, SamplingMask, SensitivityMaps


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def random_image(rng):
    def make(shape=(8, 8)):
        return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return make


@pytest.fixture
def flat_maps():
    def make(shape, n_coils=1):
        return SensitivityMaps(maps=np.full((n_coils, *shape), 1 / np.sqrt(n_coils), dtype=np.complex128))
    return make


@pytest.fixture
def build_problem(flat_maps):
    """
    MotionProblem factory. Measurements default to zeros, which satisfy the
    mask invariant for any mask.
    """
    def make(shape, masks=None, maps=None, measurements=None, n_states=1):
        if masks is None:
            masks = [np.ones(shape, dtype=np.bool_)] * n_states
        masks = tuple(m if isinstance(m, SamplingMask) else SamplingMask(keep=m) for m in masks)
        maps = flat_maps(shape) if maps is None else maps
        if measurements is None:
            measurements = np.zeros((len(masks), maps.n_coils, *shape), dtype=np.complex128)
        return MotionProblem(masks=masks, measurements=measurements, maps=maps)
    return make


@pytest.fixture
def full_data_problem(build_problem):
    """Single flat coil, full masks, every state measuring ``x`` without motion."""
    def make(x, n_states=1):
        y = np.stack([fft2c(x)[None]] * n_states)
        return build_problem(x.shape, measurements=y, n_states=n_states)
    return make


@pytest.fixture
def smooth_spectrum():
    """Stationary prior concentrated at low frequencies, well below the terminal noise."""
    def make(shape=(32, 32), floor=5e-3, peak=5e-3, width=4.0):
        r = frequency_radius(shape)
        return PowerSpectrum(power=floor + peak / (1 + (r / width) ** 2))
    return make


@pytest.fixture
def wiener(smooth_spectrum):
    def make(shape=(32, 32), steps=100, spectrum=None):
        spectrum = smooth_spectrum(shape) if spectrum is None else spectrum
        return WienerDenoiser(spectrum=spectrum, noise_schedule=ShellSchedule(steps=steps))
    return make
