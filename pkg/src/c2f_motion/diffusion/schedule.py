import dataclasses
from typing import Literal
import numpy as np
from ..core.numerics import complex_normal, fft2c, ifft2c
from ..types import ComplexImage, RealGrid, ScheduleConfig, TimestepOutOfRangeError

@dataclasses.dataclass(frozen=True)
class ShellSchedule:
    """
    Inverted-Gaussian-shell noise shaping.

    The noise operator at step ``t`` is ``F⁻¹ G_t F`` with
    ``G_t = σ_noise(t)·H_t`` and
    ``H_t(k) = 1 − a_t·exp(−|k − DC|² / (2σ_shell(t)²))``:

    - ``a_t = min(amplitude_slope·t/T, a_clamp)``
    - ``σ_shell(t) = shell_scale·exp(shell_rate·t/T)``
    - ``σ_noise(t) = σ_min·(σ_max/σ_min)^(t/T)``

    ``shaping="isotropic"`` pins ``a_t`` to 0, so ``H_t ≡ 1`` and the process
    is a standard white-noise diffusion with the same ``σ_noise``.
    """
    steps: int = 100
    a_clamp: float = 0.99
    sigma_max: float = 80.0
    sigma_min: float = 0.002
    shell_scale: float = 5.0
    shell_rate: float = 5.0
    amplitude_slope: float = 1.1
    shaping: Literal["shell", "isotropic"] = "shell"

    def __post_init__(self):
        if self.steps < 1:
            raise ValueError(f"steps must be at least 1, got {self.steps}")
        if not 0 <= self.a_clamp < 1:
            raise ValueError(f"a_clamp must lie in [0, 1), got {self.a_clamp}")
        if self.sigma_min <= 0 or self.sigma_min > 0.01 * self.sigma_max:
            raise ValueError("sigma_min must be positive and at most 1% of sigma_max")

    @classmethod
    def from_config(cls, config: ScheduleConfig) -> ShellSchedule:
        return cls(**config.model_dump())

    @classmethod
    def isotropic(cls, **kwargs) -> ShellSchedule:
        return cls(shaping="isotropic", **kwargs)

    def _check(self, t: int):
        if not 0 <= t <= self.steps:
            raise TimestepOutOfRangeError(t, self.steps)

    def amplitude(self, t: int) -> float:
        self._check(t)
        if self.shaping == "isotropic":
            return 0.0
        return min(self.amplitude_slope * t / self.steps, self.a_clamp)

    def shell_width(self, t: int) -> float:
        self._check(t)
        return self.shell_scale * float(np.exp(self.shell_rate * t / self.steps))

    def noise_scale(self, t: int) -> float:
        self._check(t)
        return self.sigma_min * (self.sigma_max / self.sigma_min) ** (t / self.steps)

def shell(sched: ShellSchedule, t: int, shape: tuple[int, int]) -> RealGrid:
    """
    ``H_t`` on an H×W k-space grid; the minimum ``1 − a_t`` sits at DC.

    Raises:
        TimestepOutOfRangeError: If ``t`` is outside ``[0, T]``.
    """
    amplitude = sched.amplitude(t)
    width = sched.shell_width(t)
    rows = np.arange(shape[0]) - shape[0] // 2
    cols = np.arange(shape[1]) - shape[1] // 2
    dist2 = rows[:, None] ** 2 + cols[None, :] ** 2
    return 1.0 - amplitude * np.exp(-dist2 / (2 * width ** 2))

def effective_weights(sched: ShellSchedule, t: int, shape: tuple[int, int]) -> RealGrid:
    """``G_t = σ_noise(t)·H_t``, strictly positive."""
    return sched.noise_scale(t) * shell(sched, t, shape)

def shaped_noise(sched: ShellSchedule,
                 t: int,
                 shape: tuple[int, ...],
                 rng: np.random.Generator) -> ComplexImage:
    """``F⁻¹ G_t F z`` with ``z`` unit complex Gaussian; leading axes are a batch."""
    weights = effective_weights(sched, t, shape[-2:])
    return ifft2c(weights * fft2c(complex_normal(rng, shape)))

def corrupt(x0: ComplexImage,
            sched: ShellSchedule,
            t: int,
            rng: np.random.Generator) -> ComplexImage:
    return x0 + shaped_noise(sched, t, x0.shape, rng)

__all__ = [
    "ShellSchedule",
    "shell",
    "effective_weights",
    "shaped_noise",
    "corrupt",
]
