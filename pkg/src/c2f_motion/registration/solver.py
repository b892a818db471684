"""
Displacement estimation against undersampled k-space, and the motion update
that first denoises the current iterate with the motion-free state only.

Each state is registered on part of its samples. The rest are held out, and
a stage's field is kept only if it predicts them better than the field it
started from.
"""

import dataclasses
import numpy as np
from numpy.typing import NDArray
from .bspline import BSplineGrid
from .descent import descend
from ..core.forward import apply_adjoint, apply_forward
from ..core.warp import grad_energy, warp, warp_derivatives
from ..diffusion.denoiser import Denoiser
from ..diffusion.sampler import GuidanceSpec, sample
from ..types import (
    ComplexImage, DisplacementField, GuidanceConfig, MotionProblem, RealGrid,
    RegistrationConfig, SamplingMask, ShapeMismatchError, check_fields, zero_field,
)
from ..logger import logger

def resolve_lambda(cfg: RegistrationConfig, y: np.ndarray) -> float:
    """``cfg.lam``, or ``0.1·‖y‖²/(HW)`` when unset."""
    if cfg.lam is not None:
        return cfg.lam
    height, width = y.shape[-2:]
    return 0.1 * float(np.sum(np.abs(y) ** 2)) / (height * width)

def lowpass_window(shape: tuple[int, int], sigma: float) -> RealGrid:
    """
    k-space transfer function of an image-space Gaussian blur with standard
    deviation ``sigma`` pixels; 1 at DC.
    """
    rows = (np.arange(shape[0]) - shape[0] // 2) / shape[0]
    cols = (np.arange(shape[1]) - shape[1] // 2) / shape[1]
    freq2 = rows[:, None] ** 2 + cols[None, :] ** 2
    return np.exp(-2 * np.pi ** 2 * sigma ** 2 * freq2)

def registration_loss(u: DisplacementField,
                      x_bar: ComplexImage,
                      y: np.ndarray,
                      state: int,
                      prob: MotionProblem,
                      lam: float,
                      window: RealGrid | None = None) -> tuple[float, DisplacementField]:
    """
    ``‖W(y − A^(τ) warp(x̄, u))‖² + λ·Σ‖∇u‖²`` and its exact gradient with
    respect to ``u``. ``W`` is a real k-space weight, the identity when
    ``window`` is None.

    The image-space residual gradient ``2·A^(τ)ᴴW²(A^(τ)w − y)`` is paired
    with the bilinear derivatives of ``w = warp(x̄, u)``.

    Raises:
        ShapeMismatchError: If ``u``, ``x_bar`` or ``y`` do not match the problem.
    """
    check_fields([u], prob.shape)
    if x_bar.shape != prob.shape:
        raise ShapeMismatchError("ComplexImage", prob.shape, x_bar.shape)

    warped = warp(x_bar, u)
    residual = apply_forward(warped, zero_field(prob.shape), state, prob) - y
    weighted = residual if window is None else window ** 2 * residual
    data = float(np.sum(np.real(np.conj(residual) * weighted)))
    image_grad = 2 * apply_adjoint(weighted, state, prob)

    d_row, d_col = warp_derivatives(x_bar, u)
    grad = np.stack([
        np.real(np.conj(image_grad) * d_row),
        np.real(np.conj(image_grad) * d_col),
    ])

    energy, energy_grad = grad_energy(u)
    return data + lam * energy, grad + lam * energy_grad

def _level_spacings(cfg: RegistrationConfig) -> list[int]:
    return [cfg.grid_spacing * 2 ** level for level in reversed(range(cfg.bspline_levels))]

def fit_bspline(x_bar: ComplexImage,
                y: np.ndarray,
                state: int,
                prob: MotionProblem,
                cfg: RegistrationConfig,
                losses: list[float] | None = None) -> DisplacementField:
    """
    Cubic B-spline field fitted coarse to fine over ``cfg.bspline_levels``
    control spacings, starting from zero control points. Each level runs
    ``cfg.bspline_iters`` RMS-scaled descent steps on ``registration_loss``
    pulled back to the control points, with the residual low-passed to a
    blur of ``cfg.level_blur`` control spacings. Losses are appended to
    ``losses``; they are comparable within a level only.
    """
    lam = resolve_lambda(cfg, y)
    field = zero_field(prob.shape)
    for level, spacing in enumerate(_level_spacings(cfg)):
        grid = BSplineGrid.create(prob.shape, spacing)
        coeffs = grid.zeros() if level == 0 else grid.project(field)
        window = lowpass_window(prob.shape, cfg.level_blur * spacing) if cfg.level_blur > 0 else None

        def objective(c: np.ndarray) -> tuple[float, np.ndarray]:
            loss, dense_grad = registration_loss(grid.dense(c), x_bar, y, state, prob, lam, window)
            return loss, grid.pullback(dense_grad)

        result = descend(objective, coeffs,
                         iters=cfg.bspline_iters,
                         step=cfg.bspline_step,
                         tolerance=cfg.tolerance,
                         adaptive=True)
        field = grid.dense(result.params)
        if losses is not None:
            losses.extend(result.losses)
        logger.debug(f"B-spline level spacing={spacing}: loss {result.losses[0]:.6g} -> {result.losses[-1]:.6g}")
    return field

def refine_pixelwise(u0: DisplacementField,
                     x_bar: ComplexImage,
                     y: np.ndarray,
                     state: int,
                     prob: MotionProblem,
                     cfg: RegistrationConfig,
                     losses: list[float] | None = None) -> DisplacementField:
    """
    Gradient descent with backtracking on the dense field, starting at ``u0``.
    Stops after ``cfg.pixel_iters`` steps or once the relative loss decrease
    falls below ``cfg.tolerance``.
    """
    check_fields([u0], prob.shape)
    lam = resolve_lambda(cfg, y)

    def objective(u: np.ndarray) -> tuple[float, np.ndarray]:
        return registration_loss(u, x_bar, y, state, prob, lam)

    result = descend(objective, u0,
                     iters=cfg.pixel_iters,
                     step=cfg.pixel_step,
                     tolerance=cfg.tolerance,
                     adaptive=False)
    if losses is not None:
        losses.extend(result.losses)
    if not result.converged:
        logger.warning(f"Pixel-wise refinement of state {state} hit the iteration cap")
    return result.params

@dataclasses.dataclass(frozen=True)
class HoldoutSplit:
    """One state's samples divided into a fitting part and a held-out part."""
    state: int
    fit: MotionProblem
    held: MotionProblem

    @classmethod
    def draw(cls,
             prob: MotionProblem,
             state: int,
             fraction: float,
             rng: np.random.Generator) -> HoldoutSplit | None:
        """
        Hold out each sample of ``state`` with probability ``fraction``.
        Returns None when either part would be empty.
        """
        keep = prob.masks[state].keep
        drawn = rng.random(keep.shape) < fraction
        held, fit = keep & drawn, keep & ~drawn
        if not held.any() or not fit.any():
            return None
        return cls(state=state, fit=_restrict(prob, state, fit), held=_restrict(prob, state, held))

    def held_loss(self, u: DisplacementField, x_bar: ComplexImage) -> float:
        """Unregularised, unwindowed misfit on the held-out samples."""
        y = self.held.measurements[self.state]
        return registration_loss(u, x_bar, y, self.state, self.held, 0.0)[0]

def _restrict(prob: MotionProblem, state: int, keep: NDArray[np.bool_]) -> MotionProblem:
    masks = list(prob.masks)
    masks[state] = SamplingMask(keep=keep)
    measurements = prob.measurements.copy()
    measurements[state] = measurements[state] * keep
    return dataclasses.replace(prob, masks=tuple(masks), measurements=measurements)

def _accept(split: HoldoutSplit,
            candidate: DisplacementField,
            current: DisplacementField,
            x_bar: ComplexImage,
            margin: float,
            stage: str) -> DisplacementField:
    before = split.held_loss(current, x_bar)
    after = split.held_loss(candidate, x_bar)
    if after < (1 - margin) * before:
        return candidate
    logger.debug(f"State {split.state}: {stage} field rejected, held-out loss {before:.6g} -> {after:.6g}")
    return current

def register_state(x_bar: ComplexImage,
                   state: int,
                   prob: MotionProblem,
                   cfg: RegistrationConfig) -> DisplacementField:
    """
    Both registration stages for one state against its own measurements.

    With ``cfg.holdout_fraction > 0`` the stages fit on the remaining
    samples, and each stage's result replaces the previous field only if it
    lowers the held-out misfit by more than ``cfg.acceptance_margin``; a
    state whose reference cannot explain it keeps the zero field.
    """
    split = None
    if cfg.holdout_fraction > 0:
        rng = np.random.default_rng((cfg.seed, state))
        split = HoldoutSplit.draw(prob, state, cfg.holdout_fraction, rng)
    if split is None:
        y = prob.measurements[state]
        field = fit_bspline(x_bar, y, state, prob, cfg)
        return refine_pixelwise(field, x_bar, y, state, prob, cfg)

    y = split.fit.measurements[state]
    field = zero_field(prob.shape)
    coarse = fit_bspline(x_bar, y, state, split.fit, cfg)
    field = _accept(split, coarse, field, x_bar, cfg.acceptance_margin, "B-spline")
    refined = refine_pixelwise(field, x_bar, y, state, split.fit, cfg)
    return _accept(split, refined, field, x_bar, cfg.acceptance_margin, "pixel-wise")

def update_motion(x_bar_t: ComplexImage,
                  prob: MotionProblem,
                  t: int,
                  d: Denoiser,
                  guidance: GuidanceConfig,
                  registration: RegistrationConfig) -> list[DisplacementField]:
    """
    Complete the reverse process from ``x̄_t`` guided by the motion-free
    state alone, then register every state τ ≥ 1 against the clean
    estimate. State 0 keeps the zero field.
    """
    logger.info(f"Motion update at t={t}")
    spec = GuidanceSpec.from_config(guidance, fields=[zero_field(prob.shape)], states=[0])
    x_clean = sample(d, spec=spec, prob=prob, from_t=t, init=x_bar_t)

    fields = [zero_field(prob.shape)]
    for state in range(1, prob.n_states):
        field = register_state(x_clean, state, prob, registration)
        logger.debug(f"State {state}: max displacement {np.max(np.hypot(*field)):.3f} px")
        fields.append(field)
    check_fields(fields, prob.shape)
    return fields

__all__ = [
    "resolve_lambda",
    "lowpass_window",
    "registration_loss",
    "fit_bspline",
    "refine_pixelwise",
    "HoldoutSplit",
    "register_state",
    "update_motion",
]
