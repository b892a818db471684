import io
from pathlib import Path
from typing import Literal
import numpy as np
from PIL import Image
from .cfl import atomic_write_bytes
from ..types import ComplexImage, NonFiniteInputError, ShapeMismatchError

ERROR_GAIN = 10.0

def to_gray(img: ComplexImage,
            mode: Literal["magnitude", "error"] = "magnitude",
            reference: ComplexImage | None = None) -> np.ndarray:
    """
    8-bit grayscale levels.

    ``magnitude`` maps ``|img|`` linearly from ``[0, max]``. ``error`` maps
    ``10·|img − reference|`` clipped at the reference maximum, so error maps
    of different methods share one scale.
    """
    if not np.all(np.isfinite(img)):
        raise NonFiniteInputError("render")
    match mode:
        case "magnitude":
            values = np.abs(img)
            scale = float(values.max()) if values.size else 0.0
        case "error":
            if reference is None:
                raise ValueError("error mode needs a reference image")
            if reference.shape != img.shape:
                raise ShapeMismatchError("reference", img.shape, reference.shape)
            scale = float(np.abs(reference).max())
            values = np.minimum(ERROR_GAIN * np.abs(img - reference), scale)
    if scale == 0:
        return np.zeros(img.shape, dtype=np.uint8)
    return np.clip(np.round(255 * values / scale), 0, 255).astype(np.uint8)

def encode_png(img: ComplexImage,
               mode: Literal["magnitude", "error"] = "magnitude",
               reference: ComplexImage | None = None) -> bytes:
    """``img`` as the bytes of a lossless 8-bit grayscale PNG."""
    buffer = io.BytesIO()
    Image.fromarray(to_gray(img, mode, reference)).save(buffer, format="PNG")
    return buffer.getvalue()

def render(img: ComplexImage,
           out_path: str | Path,
           mode: Literal["magnitude", "error"] = "magnitude",
           reference: ComplexImage | None = None):
    atomic_write_bytes(Path(out_path), encode_png(img, mode, reference))

__all__ = [
    "to_gray",
    "encode_png",
    "render",
]
