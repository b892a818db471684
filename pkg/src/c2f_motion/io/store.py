"""
Directory layout of a stored problem and the typed loaders on top of the
CFL pair format.

A problem directory holds ``masks`` (S×H×W), ``kspace`` (S×C×H×W) and
``maps`` (C×H×W), optionally ``fields`` (S×2×H×W), ``truth`` (H×W) and the
``manifest.txt`` of the run that wrote it.
"""

from pathlib import Path
import numpy as np
from .cfl import cfl_read, cfl_write, squeeze_trailing
from .keyvalue import parse_key_values
from ..diffusion.denoiser import PowerSpectrum
from ..types import (
    ComplexImage, DisplacementField, MotionProblem, SamplingMask, SensitivityMaps,
    CflFormatError, ConfigError,
)

MASKS = "masks"
KSPACE = "kspace"
MAPS = "maps"
FIELDS = "fields"
TRUTH = "truth"
MANIFEST = "manifest.txt"

def _read(stem: Path, ndim: int) -> np.ndarray:
    array = cfl_read(stem)
    try:
        return squeeze_trailing(array, ndim)
    except ValueError as e:
        raise CflFormatError(stem, str(e)) from e

def read_image(stem: str | Path) -> ComplexImage:
    return _read(Path(stem), 2).astype(np.complex128)

def read_fields(stem: str | Path) -> list[DisplacementField]:
    stack = _read(Path(stem), 4)
    if stack.shape[1] != 2:
        raise CflFormatError(Path(stem), f"expected S×2×H×W fields, got {stack.shape}")
    return [np.real(field).astype(np.float64) for field in stack]

def write_fields(stem: str | Path, fields: list[DisplacementField] | tuple[DisplacementField, ...]):
    cfl_write(stem, np.stack(fields))

def save_spectrum(stem: str | Path, spectrum: PowerSpectrum):
    cfl_write(stem, spectrum.power)

def load_spectrum(stem: str | Path) -> PowerSpectrum:
    """Real part of the stored grid; the imaginary part is ignored."""
    grid = _read(Path(stem), 2)
    return PowerSpectrum(power=np.real(grid).astype(np.float64))

def save_problem(directory: str | Path, prob: MotionProblem):
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    cfl_write(directory / MASKS, prob.mask_stack().astype(np.complex64))
    cfl_write(directory / KSPACE, prob.measurements)
    cfl_write(directory / MAPS, prob.maps.maps)

def recorded_noise_std(directory: str | Path) -> float:
    """``noise_std`` from the directory's manifest; 0 without a manifest or entry."""
    path = Path(directory) / MANIFEST
    if not path.exists():
        return 0.0
    value = parse_key_values(path.read_text(encoding="utf-8")).get("noise_std")
    if value is None:
        return 0.0
    try:
        noise_std = float(value)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"{path}: noise_std '{value}' is not a number") from e
    if not noise_std >= 0:
        raise ConfigError(f"{path}: noise_std must be non-negative, got {value}")
    return noise_std

def load_problem(directory: str | Path, noise_std: float | None = None) -> MotionProblem:
    """
    ``noise_std`` defaults to the value recorded in the manifest.

    Raises:
        FileNotFoundError: If a required pair is missing.
        CflFormatError: If a stored array has the wrong rank.
        ConfigError: If the manifest records an invalid ``noise_std``.
    """
    directory = Path(directory)
    if noise_std is None:
        noise_std = recorded_noise_std(directory)
    masks = _read(directory / MASKS, 3)
    kspace = _read(directory / KSPACE, 4)
    maps = _read(directory / MAPS, 3)
    return MotionProblem(
        masks=tuple(SamplingMask(keep=np.real(mask) > 0.5) for mask in masks),
        measurements=kspace.astype(np.complex128),
        maps=SensitivityMaps(maps=maps.astype(np.complex128)),
        noise_std=noise_std)

__all__ = [
    "MASKS",
    "KSPACE",
    "MAPS",
    "FIELDS",
    "TRUTH",
    "MANIFEST",
    "read_image",
    "read_fields",
    "write_fields",
    "save_spectrum",
    "load_spectrum",
    "save_problem",
    "recorded_noise_std",
    "load_problem",
]
