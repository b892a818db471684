"""
Centered unitary 2D Fourier transforms and the RNG conventions every other
module relies on.

Transforms act on the last two axes, so a stack of coils or a batch of
images goes through in one call. The DC component sits at (H // 2, W // 2)
for even and odd sizes alike.
"""

import numpy as np
from ..types import ComplexImage, KSpaceGrid, NonFiniteInputError

_AXES = (-2, -1)

def _ensure_finite(array: np.ndarray, operation: str):
    if not np.all(np.isfinite(array)):
        raise NonFiniteInputError(operation)

def fft2c(img: ComplexImage) -> KSpaceGrid:
    """
    Orthonormal centered 2D DFT over the last two axes.

    Raises:
        NonFiniteInputError: If ``img`` contains NaN or Inf.
    """
    _ensure_finite(img, "fft2c")
    shifted = np.fft.ifftshift(img, axes=_AXES)
    return np.fft.fftshift(np.fft.fft2(shifted, axes=_AXES, norm="ortho"), axes=_AXES)

def ifft2c(grid: KSpaceGrid) -> ComplexImage:
    """
    Exact inverse of ``fft2c``.

    Raises:
        NonFiniteInputError: If ``grid`` contains NaN or Inf.
    """
    _ensure_finite(grid, "ifft2c")
    shifted = np.fft.ifftshift(grid, axes=_AXES)
    return np.fft.fftshift(np.fft.ifft2(shifted, axes=_AXES, norm="ortho"), axes=_AXES)

def frequency_radius(shape: tuple[int, int]) -> np.ndarray:
    """Distance of every k-space bin from DC, in bins."""
    rows = np.arange(shape[0]) - shape[0] // 2
    cols = np.arange(shape[1]) - shape[1] // 2
    return np.hypot(rows[:, None], cols[None, :])

def make_rng(seed: int | None) -> np.random.Generator:
    return np.random.default_rng(seed)

def complex_normal(rng: np.random.Generator, shape: tuple[int, ...]) -> ComplexImage:
    """Unit-variance circular complex Gaussian: real and imaginary parts each N(0, 1/2)."""
    scale = np.sqrt(0.5)
    return scale * rng.standard_normal(shape) + 1j * scale * rng.standard_normal(shape)

def inner(a: np.ndarray, b: np.ndarray) -> complex:
    """⟨a, b⟩ = Σ conj(a)·b."""
    return complex(np.vdot(a, b))

__all__ = [
    "fft2c",
    "ifft2c",
    "frequency_radius",
    "make_rng",
    "complex_normal",
    "inner",
]
