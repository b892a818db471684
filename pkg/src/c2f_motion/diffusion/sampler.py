"""
Score estimation, the guided coarse-to-fine reverse step and the reverse
process built from it.

The step discretises the probability-flow ODE of ``x_t = x_0 + F⁻¹G_tF z``
with one Euler step per timestep:
``x_{t−1} = x_t + F⁻¹ (G_t − G_{t−1}) G_t F ŝ``.
"""

import dataclasses
import functools
from collections.abc import Sequence
from typing import Literal
import numpy as np
from .denoiser import Denoiser
from .schedule import ShellSchedule, effective_weights, shaped_noise
from ..core.forward import apply_adjoint, apply_forward
from ..core.numerics import fft2c, ifft2c
from ..core.warp import warp_adjoint, warp_gain
from ..types import (
    ComplexImage, DisplacementField, GuidanceConfig, MotionProblem, RealGrid,
    MissingFieldError, TimestepOutOfRangeError,
)
from ..logger import logger

@dataclasses.dataclass(frozen=True)
class GuidanceSpec:
    """
    Which measurements steer the sampler and how hard.

    ``fields[τ]`` is the current displacement estimate of state τ; only the
    states in ``states`` contribute. With ``scaling="normalized"`` the weight
    at step t is ``gamma / σ_noise(t)²``, otherwise ``gamma``. With
    ``warp_normalized`` each state's term is further divided by
    ``max(1, warp_gain(field))``, which bounds its operator norm by 1.
    """
    fields: tuple[DisplacementField, ...]
    states: tuple[int, ...]
    gamma: float = 1.0
    scaling: Literal["constant", "normalized"] = "constant"
    frozen_denoiser: bool = False
    warp_normalized: bool = True

    def __post_init__(self):
        if self.gamma < 0:
            raise ValueError(f"gamma must be non-negative, got {self.gamma}")
        if len(self.states) == 0:
            raise ValueError("guidance needs at least one motion state")

    @classmethod
    def from_config(cls,
                    config: GuidanceConfig,
                    fields: Sequence[DisplacementField],
                    states: Sequence[int]) -> GuidanceSpec:
        return cls(fields=tuple(fields),
                   states=tuple(states),
                   gamma=config.gamma,
                   scaling=config.scaling,
                   frozen_denoiser=config.frozen_denoiser,
                   warp_normalized=config.warp_normalized)

    def weight(self, sched: ShellSchedule, t: int) -> float:
        match self.scaling:
            case "constant":
                return self.gamma
            case "normalized":
                return self.gamma / sched.noise_scale(t) ** 2

    def field(self, state: int) -> DisplacementField:
        if state >= len(self.fields):
            raise MissingFieldError(state)
        return self.fields[state]

    @functools.cached_property
    def state_weights(self) -> tuple[float, ...]:
        """Per-state factor of the data term, aligned with ``states``."""
        if not self.warp_normalized:
            return tuple(1.0 for _ in self.states)
        return tuple(1.0 / max(1.0, warp_gain(self.field(state))) for state in self.states)

def score_estimate(d: Denoiser, x: ComplexImage, t: int) -> ComplexImage:
    """``(B_tB_tᴴ)⁻¹ (D(x, t) − x)`` with ``B_t = F⁻¹G_tF``."""
    return _score_from_estimate(d, x, d.denoise(x, t), t)

def _score_from_estimate(d: Denoiser, x: ComplexImage, x0_hat: ComplexImage, t: int) -> ComplexImage:
    weights = effective_weights(d.schedule, t, d.shape)
    return ifft2c(fft2c(x0_hat - x) / weights ** 2)

def data_consistency(spec: GuidanceSpec,
                     x0_hat: ComplexImage,
                     prob: MotionProblem) -> tuple[float, ComplexImage]:
    """
    ``Σ_τ w_τ‖y^(τ) − A^(τ)Φ^(τ)x̂0‖²`` over the guided states and its gradient
    with respect to ``x̂0`` (factor 2 included); ``w_τ`` is the spec's
    ``state_weights``.

    Raises:
        MissingFieldError: If a guided state has no field.
    """
    loss = 0.0
    grad = np.zeros(prob.shape, dtype=np.complex128)
    for state, weight in zip(spec.states, spec.state_weights):
        field = spec.field(state)
        residual = apply_forward(x0_hat, field, state, prob) - prob.measurements[state]
        loss += weight * float(np.sum(np.abs(residual) ** 2))
        grad += 2 * weight * warp_adjoint(apply_adjoint(residual, state, prob), field)
    return loss, grad

def guidance_grad(spec: GuidanceSpec, x0_hat: ComplexImage, prob: MotionProblem) -> ComplexImage:
    """
    Gradient of the data-consistency loss at the denoised estimate. The
    sampler descends it, i.e. ascends ``log p(y | x̂0)``; the caller chains it
    through ``denoise_vjp`` and scales it by ``γ_t``.
    """
    return data_consistency(spec, x0_hat, prob)[1]

def reverse_update(x_t: ComplexImage,
                   score: ComplexImage,
                   weights_t: RealGrid,
                   weights_prev: RealGrid) -> ComplexImage:
    """``x_t + F⁻¹ (G_t − G_{t−1}) G_t F ŝ``."""
    return x_t + ifft2c((weights_t - weights_prev) * weights_t * fft2c(score))

@dataclasses.dataclass(frozen=True)
class StepResult:
    x_prev: ComplexImage
    x0_hat: ComplexImage
    data_loss: float | None

def guided_step(d: Denoiser,
                x_t: ComplexImage,
                t: int,
                spec: GuidanceSpec | None = None,
                prob: MotionProblem | None = None) -> StepResult:
    """
    ``c2f_step`` that also reports the denoised estimate and the data loss at
    it, which the reconstruction trace records.
    """
    sched = d.schedule
    if not 1 <= t <= sched.steps:
        raise TimestepOutOfRangeError(t, sched.steps, lowest=1)

    x0_hat = d.denoise(x_t, t)
    score = _score_from_estimate(d, x_t, x0_hat, t)

    data_loss = None
    if spec is not None and prob is not None:
        data_loss, grad = data_consistency(spec, x0_hat, prob)
        gamma_t = spec.weight(sched, t)
        if gamma_t > 0:
            if not spec.frozen_denoiser:
                grad = d.denoise_vjp(x_t, t, grad)
            score = score - gamma_t * grad

    weights_t = effective_weights(sched, t, d.shape)
    weights_prev = effective_weights(sched, t - 1, d.shape)
    x_prev = reverse_update(x_t, score, weights_t, weights_prev)
    return StepResult(x_prev=x_prev, x0_hat=x0_hat, data_loss=data_loss)

def c2f_step(d: Denoiser,
             x_t: ComplexImage,
             t: int,
             spec: GuidanceSpec | None = None,
             prob: MotionProblem | None = None) -> ComplexImage:
    """
    One coarse-to-fine reverse step from ``t`` to ``t − 1``, guided by the
    states in ``spec`` when both ``spec`` and ``prob`` are given.

    Raises:
        TimestepOutOfRangeError: If ``t`` is not in ``[1, T]``.
    """
    return guided_step(d, x_t, t, spec, prob).x_prev

def draw_initial(sched: ShellSchedule,
                 shape: tuple[int, ...],
                 rng: np.random.Generator,
                 t: int | None = None) -> ComplexImage:
    """``x_t ∼ N(0, F⁻¹G_t²F)``, at ``t = T`` by default; leading axes of ``shape`` are a batch."""
    return shaped_noise(sched, sched.steps if t is None else t, shape, rng)

def sample(d: Denoiser,
           rng: np.random.Generator | None = None,
           spec: GuidanceSpec | None = None,
           prob: MotionProblem | None = None,
           from_t: int | None = None,
           init: ComplexImage | None = None) -> ComplexImage:
    """
    Run the reverse process down to ``t = 0`` with the denoiser's schedule.

    Starts from ``init`` at ``from_t`` when given, otherwise from a fresh
    draw at the noise level of the starting step; ``rng`` is only consumed for that draw and may be omitted
    when ``init`` is given. ``init`` may carry leading batch axes.
    """
    sched = d.schedule
    start = sched.steps if from_t is None else from_t
    if not 0 <= start <= sched.steps:
        raise TimestepOutOfRangeError(start, sched.steps)
    if init is None:
        if rng is None:
            raise ValueError("sample needs an rng when no init is given")
        x = draw_initial(sched, d.shape, rng, start)
    else:
        x = np.asarray(init, dtype=np.complex128)

    for t in range(start, 0, -1):
        x = c2f_step(d, x, t, spec, prob)
        logger.debug(f"Reverse step {t} -> {t - 1}")
    return x

__all__ = [
    "GuidanceSpec",
    "StepResult",
    "score_estimate",
    "data_consistency",
    "guidance_grad",
    "reverse_update",
    "guided_step",
    "c2f_step",
    "draw_initial",
    "sample",
]
