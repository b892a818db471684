import dataclasses
from collections.abc import Sequence
import numpy as np
from numpy.typing import NDArray
from .arrays import DisplacementField
from .exceptions import (
    InvalidMaskError, InvalidSensitivityMapsError,
    NonFiniteInputError, ShapeMismatchError,
)

@dataclasses.dataclass(frozen=True)
class SamplingMask:
    keep: NDArray[np.bool_]

    def __post_init__(self):
        keep = np.asarray(self.keep)
        if keep.ndim != 2:
            raise InvalidMaskError(f"expected a 2D grid, got {keep.ndim}D")
        if keep.dtype != np.bool_:
            if not np.all((keep == 0) | (keep == 1)):
                raise InvalidMaskError("values must be binary")
            keep = keep.astype(np.bool_)
        if not keep.any():
            raise InvalidMaskError("no sampled location")
        keep = keep.copy()
        keep.flags.writeable = False
        object.__setattr__(self, "keep", keep)

    @property
    def shape(self) -> tuple[int, int]:
        return self.keep.shape  # type: ignore[return-value]

    @property
    def n_sampled(self) -> int:
        return int(self.keep.sum())

    @property
    def acceleration(self) -> float:
        return self.keep.size / self.n_sampled

@dataclasses.dataclass(frozen=True)
class SensitivityMaps:
    maps: NDArray[np.complexfloating]

    RSS_TOLERANCE = 1e-6

    def __post_init__(self):
        maps = np.asarray(self.maps, dtype=np.complex128)
        if maps.ndim != 3 or maps.shape[0] < 1:
            raise InvalidSensitivityMapsError(f"expected n_coils×H×W, got shape {maps.shape}")
        if not np.all(np.isfinite(maps)):
            raise NonFiniteInputError("SensitivityMaps")
        rss = np.sqrt(np.sum(np.abs(maps) ** 2, axis=0))
        if rss.max() > 1 + self.RSS_TOLERANCE:
            raise InvalidSensitivityMapsError(f"root-sum-of-squares reaches {rss.max():.6g} > 1")
        maps = maps.copy()
        maps.flags.writeable = False
        object.__setattr__(self, "maps", maps)

    @property
    def n_coils(self) -> int:
        return self.maps.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.maps.shape[1:]  # type: ignore[return-value]

@dataclasses.dataclass(frozen=True)
class MotionProblem:
    """
    Measurements of one slice over ``n_states`` motion states.

    ``measurements[τ]`` is the n_coils×H×W k-space of state τ and is zero
    outside ``masks[τ]``. State 0 is the motion-free reference.
    """
    masks: tuple[SamplingMask, ...]
    measurements: NDArray[np.complexfloating]
    maps: SensitivityMaps
    noise_std: float = 0.0

    def __post_init__(self):
        masks = tuple(self.masks)
        if len(masks) == 0:
            raise InvalidMaskError("a problem needs at least one motion state")
        shape = self.maps.shape
        for mask in masks:
            if mask.shape != shape:
                raise ShapeMismatchError("SamplingMask", shape, mask.shape)
        expected = (len(masks), self.maps.n_coils, *shape)
        measurements = np.asarray(self.measurements, dtype=np.complex128)
        if measurements.shape != expected:
            raise ShapeMismatchError("measurements", expected, measurements.shape)
        if not np.all(np.isfinite(measurements)):
            raise NonFiniteInputError("MotionProblem")
        for state, mask in enumerate(masks):
            if np.any(measurements[state][:, ~mask.keep]):
                raise InvalidMaskError(f"state {state} has data outside its mask")
        measurements = measurements.copy()
        measurements.flags.writeable = False
        object.__setattr__(self, "masks", masks)
        object.__setattr__(self, "measurements", measurements)

    @property
    def n_states(self) -> int:
        return len(self.masks)

    @property
    def shape(self) -> tuple[int, int]:
        return self.maps.shape

    def mask_stack(self) -> NDArray[np.bool_]:
        return np.stack([mask.keep for mask in self.masks])

@dataclasses.dataclass(frozen=True)
class RigidParams:
    theta: float = 0.0
    d_row: float = 0.0
    d_col: float = 0.0

    def __post_init__(self):
        if not np.all(np.isfinite([self.theta, self.d_row, self.d_col])):
            raise NonFiniteInputError("RigidParams")

def check_fields(fields: Sequence[DisplacementField], shape: tuple[int, int]):
    for field in fields:
        if field.shape != (2, *shape):
            raise ShapeMismatchError("DisplacementField", (2, *shape), field.shape)
        if not np.all(np.isfinite(field)):
            raise NonFiniteInputError("DisplacementField")

__all__ = [
    "SamplingMask",
    "SensitivityMaps",
    "MotionProblem",
    "RigidParams",
    "check_fields",
]
