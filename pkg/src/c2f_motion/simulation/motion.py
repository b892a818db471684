"""
Retrospective corruption generators: smooth random displacement fields,
rigid draws, variable-density masks and their split across motion states.
Every generator takes its randomness from an explicit ``np.random.Generator``.
"""

from typing import Literal
import numpy as np
from ..core.numerics import fft2c, frequency_radius, ifft2c
from ..types import (
    DisplacementField, RigidParams, SamplingMask,
    AccelerationTooHighError, InsufficientSamplesError,
)
from ..logger import logger

FORCED_CENTER = 8
BISECTION_ITERS = 200

def center_block(shape: tuple[int, int], width: int) -> np.ndarray:
    """Boolean grid that is True on the ``width×width`` block around DC."""
    block = np.zeros(shape, dtype=np.bool_)
    if width <= 0:
        return block
    rows = slice(max(shape[0] // 2 - width // 2, 0), min(shape[0] // 2 - width // 2 + width, shape[0]))
    cols = slice(max(shape[1] // 2 - width // 2, 0), min(shape[1] // 2 - width // 2 + width, shape[1]))
    block[rows, cols] = True
    return block

def random_smooth_field(shape: tuple[int, int],
                        max_disp: float,
                        damping: float,
                        rng: np.random.Generator) -> DisplacementField:
    """
    Gaussian white noise per component, low-passed by ``exp(−damping·r)`` in
    k-space (``r`` in bins from DC), real part kept, then rescaled so the
    largest displacement magnitude equals ``max_disp``.
    """
    if max_disp < 0:
        raise ValueError(f"max_disp must be non-negative, got {max_disp}")
    damp = np.exp(-damping * frequency_radius(shape))
    white = rng.standard_normal((2, *shape))
    field = np.real(ifft2c(damp * fft2c(white)))

    peak = float(np.max(np.hypot(field[0], field[1])))
    if max_disp == 0 or peak == 0:
        return np.zeros((2, *shape), dtype=np.float64)
    return field * (max_disp / peak)

def random_rigid(range_deg: float, range_px: float, rng: np.random.Generator) -> RigidParams:
    if range_deg < 0 or range_px < 0:
        raise ValueError("rigid ranges must be non-negative")
    theta, d_row, d_col = rng.uniform(-1.0, 1.0, size=3) * np.array([range_deg, range_px, range_px])
    return RigidParams(theta=float(theta), d_row=float(d_row), d_col=float(d_col))

def _solve_scale(density: np.ndarray, target: float) -> float:
    # smallest s with Σ min(1, s·density) = target; the sum is monotone in s
    low, high = 0.0, 1.0
    while np.sum(np.minimum(1.0, high * density)) < target:
        if high > 1e300:
            return high
        high *= 2
    for _ in range(BISECTION_ITERS):
        mid = 0.5 * (low + high)
        if np.sum(np.minimum(1.0, mid * density)) < target:
            low = mid
        else:
            high = mid
    return high

def variable_density_mask(shape: tuple[int, int],
                          acceleration: float,
                          decay: float,
                          rng: np.random.Generator,
                          radius: float = 8.0) -> SamplingMask:
    """
    Independent Bernoulli draw per k-space location with probability
    ``∝ (1 + r/radius)^(−decay)``, scaled so the expected number of samples
    is ``HW/acceleration``. The central 8×8 block is always sampled.

    Raises:
        ValueError: If ``acceleration < 1``.
        AccelerationTooHighError: If the forced centre alone exceeds the
            sample budget.
    """
    if acceleration < 1:
        raise ValueError(f"acceleration must be at least 1, got {acceleration}")
    if acceleration == 1:
        return SamplingMask(keep=np.ones(shape, dtype=np.bool_))

    center = center_block(shape, FORCED_CENTER)
    n_center = int(center.sum())
    size = shape[0] * shape[1]
    target = size / acceleration
    if target < n_center:
        raise AccelerationTooHighError(acceleration, size / n_center)

    density = (1 + frequency_radius(shape) / radius) ** (-decay)
    density[center] = 0.0
    remaining = target - n_center
    if remaining > 0:
        probability = np.minimum(1.0, _solve_scale(density, remaining) * density)
    else:
        probability = np.zeros(shape)
    probability[center] = 1.0

    keep = rng.random(shape) < probability
    logger.debug(f"Variable-density mask: {int(keep.sum())} of {size} samples, target {target:.1f}")
    return SamplingMask(keep=keep)

def _split(indices: np.ndarray,
           n_states: int,
           shape: tuple[int, int],
           rng: np.random.Generator) -> list[np.ndarray]:
    parts = []
    for chunk in np.array_split(rng.permutation(indices), n_states):
        keep = np.zeros(shape[0] * shape[1], dtype=np.bool_)
        keep[chunk] = True
        parts.append(keep.reshape(shape))
    return parts

def partition_mask(mask: SamplingMask,
                   n_states: int,
                   acs_mode: Literal["disjoint", "shared"],
                   acs_width: int,
                   rng: np.random.Generator) -> tuple[SamplingMask, ...]:
    """
    Split the sampled locations of ``mask`` across ``n_states`` motion states.

    ``disjoint`` shuffles the locations into near-equal disjoint sets.
    ``shared`` gives every state the sampled part of the central
    ``acs_width×acs_width`` block and splits the rest disjointly.

    Raises:
        InsufficientSamplesError: If some state would receive no sample.
    """
    if n_states < 1:
        raise ValueError(f"n_states must be at least 1, got {n_states}")
    if n_states == 1:
        return (mask,)

    match acs_mode:
        case "disjoint":
            shared = np.zeros(mask.shape, dtype=np.bool_)
        case "shared":
            shared = mask.keep & center_block(mask.shape, acs_width)

    rest = np.flatnonzero(mask.keep & ~shared)
    if not shared.any() and rest.size < n_states:
        raise InsufficientSamplesError(rest.size, n_states)

    parts = _split(rest, n_states, mask.shape, rng)
    return tuple(SamplingMask(keep=part | shared) for part in parts)

__all__ = [
    "center_block",
    "random_smooth_field",
    "random_rigid",
    "variable_density_mask",
    "partition_mask",
]
