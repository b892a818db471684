"""
Pull-style bilinear warping with zero fill, its exact adjoint and the
spatial derivatives the registration gradient needs.

``warp(x, u)(p)`` samples ``x`` at ``p + u(p)``. Real and imaginary parts are
interpolated independently, and samples that fall outside the grid read zero,
which keeps the map strictly linear in ``x``.
"""

import dataclasses
import numpy as np
from ..types import (
    ComplexImage, DisplacementField, RigidParams,
    NonFiniteInputError, ShapeMismatchError,
)

@dataclasses.dataclass(frozen=True)
class _Stencil:
    # four neighbours in the order (r0, c0), (r0, c0+1), (r0+1, c0), (r0+1, c0+1)
    index: np.ndarray   # 4×H×W flat indices, clipped into range
    valid: np.ndarray   # 4×H×W, False where the neighbour is outside the grid
    frac_row: np.ndarray
    frac_col: np.ndarray

    @property
    def weights(self) -> np.ndarray:
        fr, fc = self.frac_row, self.frac_col
        w = np.stack([(1 - fr) * (1 - fc), (1 - fr) * fc, fr * (1 - fc), fr * fc])
        return np.where(self.valid, w, 0.0)

    def gather(self, x: np.ndarray) -> np.ndarray:
        return np.where(self.valid, x.ravel()[self.index], 0)

def _check(x: np.ndarray, u: DisplacementField):
    if u.ndim != 3 or u.shape[0] != 2 or u.shape[1:] != x.shape[-2:]:
        raise ShapeMismatchError("DisplacementField", (2, *x.shape[-2:]), u.shape)
    if x.ndim != 2:
        raise ShapeMismatchError("ComplexImage", u.shape[1:], x.shape)
    if not np.all(np.isfinite(u)):
        raise NonFiniteInputError("warp")

def _stencil(u: DisplacementField) -> _Stencil:
    height, width = u.shape[1:]
    rows, cols = np.meshgrid(np.arange(height), np.arange(width), indexing="ij")
    q_row = rows + u[0]
    q_col = cols + u[1]
    r0 = np.floor(q_row)
    c0 = np.floor(q_col)
    frac_row = q_row - r0
    frac_col = q_col - c0
    r0 = r0.astype(np.int64)
    c0 = c0.astype(np.int64)

    nb_rows = np.stack([r0, r0, r0 + 1, r0 + 1])
    nb_cols = np.stack([c0, c0 + 1, c0, c0 + 1])
    valid = (nb_rows >= 0) & (nb_rows < height) & (nb_cols >= 0) & (nb_cols < width)
    index = np.clip(nb_rows, 0, height - 1) * width + np.clip(nb_cols, 0, width - 1)
    return _Stencil(index=index, valid=valid, frac_row=frac_row, frac_col=frac_col)

def warp(x: ComplexImage, u: DisplacementField) -> ComplexImage:
    """
    Raises:
        ShapeMismatchError: If ``u`` is not 2×H×W for the H×W image ``x``.
    """
    _check(x, u)
    if not np.any(u):
        return np.array(x, dtype=np.complex128, copy=True)
    stencil = _stencil(u)
    return np.sum(stencil.weights * stencil.gather(x), axis=0)

def warp_adjoint(v: ComplexImage, u: DisplacementField) -> ComplexImage:
    """
    Transpose of the bilinear interpolation matrix of ``warp(·, u)``, so that
    ``⟨warp(x, u), v⟩ = ⟨x, warp_adjoint(v, u)⟩``.
    """
    _check(v, u)
    if not np.any(u):
        return np.array(v, dtype=np.complex128, copy=True)
    stencil = _stencil(u)
    weights = stencil.weights
    size = v.size
    index = stencil.index.ravel()
    spread = (weights * v[None]).reshape(4, -1).ravel()
    real = np.bincount(index, weights=spread.real, minlength=size)
    imag = np.bincount(index, weights=spread.imag, minlength=size)
    return (real + 1j * imag).reshape(v.shape)

def warp_gain(u: DisplacementField) -> float:
    """
    Largest column sum of the interpolation matrix of ``warp(·, u)``: the
    total weight any one source pixel contributes. Rows sum to at most 1, so
    ``‖warp(·, u)‖² ≤ warp_gain(u)``; it exceeds 1 only where ``u`` compresses
    or folds.
    """
    ones = np.ones(u.shape[1:], dtype=np.complex128)
    return float(np.max(warp_adjoint(ones, u).real))

def warp_derivatives(x: ComplexImage, u: DisplacementField) -> tuple[ComplexImage, ComplexImage]:
    """
    Partial derivatives of ``warp(x, u)(p)`` with respect to ``u[0](p)`` and
    ``u[1](p)``: the exact derivative of the bilinear interpolant, one-sided
    (forward) on integer sample positions.
    """
    _check(x, u)
    stencil = _stencil(u)
    n00, n01, n10, n11 = stencil.gather(x)
    fr, fc = stencil.frac_row, stencil.frac_col
    d_row = (1 - fc) * (n10 - n00) + fc * (n11 - n01)
    d_col = (1 - fr) * (n01 - n00) + fr * (n11 - n10)
    return d_row, d_col

def rigid_to_field(params: RigidParams, shape: tuple[int, int]) -> DisplacementField:
    """
    Dense field of a rotation by ``theta`` degrees about (H // 2, W // 2)
    followed by a translation of (d_row, d_col) pixels.
    """
    height, width = shape
    center = np.array([height // 2, width // 2], dtype=np.float64)[:, None, None]
    rows, cols = np.meshgrid(np.arange(height), np.arange(width), indexing="ij")
    points = np.stack([rows, cols]).astype(np.float64)
    rel = points - center

    theta = np.deg2rad(params.theta)
    cos, sin = np.cos(theta), np.sin(theta)
    rotated = np.stack([cos * rel[0] - sin * rel[1], sin * rel[0] + cos * rel[1]])
    shift = np.array([params.d_row, params.d_col])[:, None, None]
    return rotated + center + shift - points

def grad_energy(u: DisplacementField) -> tuple[float, DisplacementField]:
    """
    ``Σ ‖∇u‖²`` with forward differences and no wrap-around, summed over both
    components, together with its gradient with respect to ``u``.
    """
    d_row = np.diff(u, axis=1)
    d_col = np.diff(u, axis=2)
    energy = float(np.sum(d_row ** 2) + np.sum(d_col ** 2))

    grad = np.zeros_like(u, dtype=np.float64)
    grad[:, 1:, :] += 2 * d_row
    grad[:, :-1, :] -= 2 * d_row
    grad[:, :, 1:] += 2 * d_col
    grad[:, :, :-1] -= 2 * d_col
    return energy, grad

__all__ = [
    "warp",
    "warp_adjoint",
    "warp_gain",
    "warp_derivatives",
    "rigid_to_field",
    "grad_energy",
]
