import dataclasses
from abc import ABC, abstractmethod
from collections.abc import Sequence
from typing import Literal, override
import numpy as np
from .schedule import ShellSchedule, effective_weights
from ..core.numerics import fft2c, ifft2c
from ..types import ComplexImage, RealGrid, EmptyCorpusError, ShapeMismatchError

SPECTRUM_RELATIVE_FLOOR = 1e-8
SPECTRUM_ABSOLUTE_FLOOR = 1e-12

@dataclasses.dataclass(frozen=True)
class PowerSpectrum:
    """Per-frequency prior variance on the centered k-space grid."""
    power: RealGrid

    def __post_init__(self):
        power = np.asarray(self.power, dtype=np.float64)
        if power.ndim != 2:
            raise ShapeMismatchError("PowerSpectrum", (0, 0), power.shape)
        if not np.all(np.isfinite(power)) or np.any(power < 0):
            raise ValueError("Power spectrum entries must be finite and non-negative")
        if not np.any(power > 0):
            raise ValueError("Power spectrum needs at least one positive entry")
        power = power.copy()
        power.flags.writeable = False
        object.__setattr__(self, "power", power)

    @property
    def shape(self) -> tuple[int, int]:
        return self.power.shape  # type: ignore[return-value]

def estimate_spectrum(corpus: Sequence[ComplexImage]) -> PowerSpectrum:
    """
    Mean of ``|fft2c(x)|²`` over the corpus, floored at ``1e−8·max``.
    A corpus of zeros gives an all-floor spectrum.

    Raises:
        EmptyCorpusError: If ``corpus`` is empty.
        ShapeMismatchError: If the images differ in shape.
    """
    if len(corpus) == 0:
        raise EmptyCorpusError()
    shape = corpus[0].shape
    total = np.zeros(shape, dtype=np.float64)
    for image in corpus:
        if image.shape != shape:
            raise ShapeMismatchError("corpus image", shape, image.shape)
        total += np.abs(fft2c(image)) ** 2
    power = total / len(corpus)
    floor = max(SPECTRUM_RELATIVE_FLOOR * float(power.max()), SPECTRUM_ABSOLUTE_FLOOR)
    return PowerSpectrum(power=np.maximum(power, floor))

class Denoiser(ABC):
    """
    ``D(x_t, t) ≈ E[x_0 | x_t]`` under the noise model of ``schedule``.

    ``denoise_vjp`` is the vector-Jacobian product the guided sampler chains
    the data-consistency gradient through. A network backend implements
    both methods.
    """

    @property
    @abstractmethod
    def schedule(self) -> ShellSchedule: ...

    @property
    @abstractmethod
    def shape(self) -> tuple[int, int]: ...

    @abstractmethod
    def denoise(self, x_t: ComplexImage, t: int) -> ComplexImage: ...

    @abstractmethod
    def denoise_vjp(self, x_t: ComplexImage, t: int, v: ComplexImage) -> ComplexImage: ...

@dataclasses.dataclass(frozen=True)
class WienerDenoiser(Denoiser):
    """
    Exact posterior mean for the stationary prior ``N(0, F⁻¹ diag(P) F)``
    under noise ``N(0, F⁻¹ diag(G_t²) F)``: per frequency the gain
    ``P / (P + G_t²)``.
    """
    spectrum: PowerSpectrum
    noise_schedule: ShellSchedule
    kind: Literal["wiener", "empirical"] = "wiener"

    @classmethod
    def from_corpus(cls, corpus: Sequence[ComplexImage], schedule: ShellSchedule) -> WienerDenoiser:
        return cls(spectrum=estimate_spectrum(corpus), noise_schedule=schedule, kind="empirical")

    @property
    @override
    def schedule(self) -> ShellSchedule:
        return self.noise_schedule

    @property
    @override
    def shape(self) -> tuple[int, int]:
        return self.spectrum.shape

    def gain(self, t: int) -> RealGrid:
        weights = effective_weights(self.noise_schedule, t, self.shape)
        power = self.spectrum.power
        return power / (power + weights ** 2)

    def _filter(self, x: ComplexImage, t: int) -> ComplexImage:
        if x.shape[-2:] != self.shape:
            raise ShapeMismatchError("ComplexImage", self.shape, x.shape[-2:])
        return ifft2c(self.gain(t) * fft2c(x))

    @override
    def denoise(self, x_t: ComplexImage, t: int) -> ComplexImage:
        return self._filter(x_t, t)

    @override
    def denoise_vjp(self, x_t: ComplexImage, t: int, v: ComplexImage) -> ComplexImage:
        # the Jacobian is F⁻¹ diag(gain) F: Hermitian, independent of x_t
        return self._filter(v, t)

__all__ = [
    "PowerSpectrum",
    "estimate_spectrum",
    "Denoiser",
    "WienerDenoiser",
]
