"""
The motion-corrupted multi-coil measurement operator ``A^(τ)Φ^(τ)``, its
adjoint, and measurement simulation.
"""

from collections.abc import Sequence
import numpy as np
from .numerics import complex_normal, fft2c, ifft2c
from .warp import warp
from ..types import (
    ComplexImage, DisplacementField, MotionProblem, SamplingMask, SensitivityMaps,
    MotionFreeStateError, ShapeMismatchError, check_fields,
)
from ..logger import logger

def _check_image(x: ComplexImage, prob: MotionProblem):
    if x.shape != prob.shape:
        raise ShapeMismatchError("ComplexImage", prob.shape, x.shape)

def _check_state(state: int, prob: MotionProblem):
    if not 0 <= state < prob.n_states:
        raise IndexError(f"Motion state {state} outside [0, {prob.n_states})")

def apply_forward(x: ComplexImage,
                  field: DisplacementField,
                  state: int,
                  prob: MotionProblem) -> np.ndarray:
    """
    ``M^(τ) F S_i Φ^(τ) x`` for every coil, as an n_coils×H×W array.

    Raises:
        ShapeMismatchError: If ``x`` or ``field`` do not match the problem.
    """
    _check_image(x, prob)
    _check_state(state, prob)
    check_fields([field], prob.shape)
    coil_images = prob.maps.maps * warp(x, field)[None]
    return prob.masks[state].keep * fft2c(coil_images)

def apply_adjoint(y: np.ndarray, state: int, prob: MotionProblem) -> ComplexImage:
    """
    ``Σ_i conj(S_i) F⁻¹ M^(τ) y_i``. The warp adjoint is applied separately
    (``warp_adjoint``), so this is the exact adjoint of ``apply_forward`` with
    the identity field.
    """
    _check_state(state, prob)
    expected = (prob.maps.n_coils, *prob.shape)
    if y.shape != expected:
        raise ShapeMismatchError("MultiCoilKSpace", expected, y.shape)
    coil_images = ifft2c(prob.masks[state].keep * y)
    return np.sum(np.conj(prob.maps.maps) * coil_images, axis=0)

def simulate_measurements(x: ComplexImage,
                          fields: Sequence[DisplacementField],
                          masks: Sequence[SamplingMask],
                          maps: SensitivityMaps,
                          noise_std: float,
                          rng: np.random.Generator) -> MotionProblem:
    """
    Raises:
        MotionFreeStateError: If ``fields[0]`` is not the zero field.
        ShapeMismatchError: If the numbers of fields and masks differ or a
            shape is inconsistent.
    """
    if len(fields) != len(masks):
        raise ShapeMismatchError("fields", (len(masks),), (len(fields),))
    if x.shape != maps.shape:
        raise ShapeMismatchError("ComplexImage", maps.shape, x.shape)
    check_fields(fields, maps.shape)
    if np.any(fields[0]):
        raise MotionFreeStateError(float(np.max(np.hypot(*fields[0]))))

    # noise-free staging problem, so apply_forward can validate shapes
    staging = MotionProblem(
        masks=tuple(masks),
        measurements=np.zeros((len(masks), maps.n_coils, *maps.shape), dtype=np.complex128),
        maps=maps,
        noise_std=noise_std)

    measurements = []
    for state, (field, mask) in enumerate(zip(fields, masks)):
        y = apply_forward(x, field, state, staging)
        if noise_std > 0:
            y = y + mask.keep * (noise_std * complex_normal(rng, y.shape))
        measurements.append(y)
        logger.debug(f"Simulated state {state}: {mask.n_sampled} samples, R={mask.acceleration:.1f}")

    return MotionProblem(
        masks=tuple(masks),
        measurements=np.stack(measurements),
        maps=maps,
        noise_std=noise_std)

def make_coil_profiles(shape: tuple[int, int], n_coils: int) -> SensitivityMaps:
    """
    Smooth complex Gaussian-blob profiles centred at equally spaced angles on
    a circle around the field of view, normalised to unit root-sum-of-squares.
    """
    if n_coils < 1:
        raise ValueError(f"n_coils must be at least 1, got {n_coils}")
    height, width = shape
    extent = 0.5 * min(height, width)
    rows, cols = np.meshgrid(np.arange(height) - height // 2,
                             np.arange(width) - width // 2,
                             indexing="ij")

    profiles = []
    for k in range(n_coils):
        angle = 2 * np.pi * k / n_coils
        c_row, c_col = extent * np.sin(angle), extent * np.cos(angle)
        dist2 = (rows - c_row) ** 2 + (cols - c_col) ** 2
        blob = np.exp(-dist2 / (2 * extent ** 2))
        profiles.append(blob * np.exp(1j * angle))
    profiles = np.stack(profiles)

    rss = np.sqrt(np.sum(np.abs(profiles) ** 2, axis=0))
    return SensitivityMaps(maps=profiles / rss)

def zero_filled(prob: MotionProblem, states: Sequence[int] | None = None) -> ComplexImage:
    """
    Adjoint reconstruction of the chosen states' k-space with zeros elsewhere;
    all states by default. Each k-space location is averaged over the states
    that sampled it.
    """
    states = range(prob.n_states) if states is None else states
    coverage = np.zeros(prob.shape)
    combined = np.zeros((prob.maps.n_coils, *prob.shape), dtype=np.complex128)
    for state in states:
        coverage += prob.masks[state].keep
        combined += prob.measurements[state]
    combined = np.divide(combined, coverage, out=np.zeros_like(combined), where=coverage > 0)
    coil_images = ifft2c(combined)
    return np.sum(np.conj(prob.maps.maps) * coil_images, axis=0)

__all__ = [
    "apply_forward",
    "apply_adjoint",
    "simulate_measurements",
    "make_coil_profiles",
    "zero_filled",
]
