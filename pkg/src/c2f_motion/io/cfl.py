"""
Reader and writer for ``.hdr``/``.cfl`` pairs: a text header starting with
``# Dimensions`` followed by the dimension sizes, and a raw payload of
little-endian complex64 values in column-major order.
"""

import os
import tempfile
from pathlib import Path
import numpy as np
from ..types import CflFormatError, NonFiniteInputError

HEADER_TITLE = "# Dimensions"
MAX_DIMS = 5
_DTYPE = np.dtype("<c8")

def _pair(stem: str | Path) -> tuple[Path, Path]:
    stem = Path(stem)
    return stem.with_name(stem.name + ".hdr"), stem.with_name(stem.name + ".cfl")

def atomic_write_bytes(path: Path, payload: bytes):
    """Write to a temporary file in the target directory, then rename over ``path``."""
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(payload)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise

def cfl_write(stem: str | Path, array: np.ndarray):
    """
    Raises:
        NonFiniteInputError: If ``array`` contains NaN or Inf.
        CflFormatError: If ``array`` has more than five dimensions.
    """
    array = np.asarray(array)
    hdr_path, cfl_path = _pair(stem)
    if array.ndim > MAX_DIMS:
        raise CflFormatError(cfl_path, f"{array.ndim} dimensions, at most {MAX_DIMS} supported")
    if not np.all(np.isfinite(array)):
        raise NonFiniteInputError("cfl_write")

    dims = array.shape if array.ndim > 0 else (1,)
    header = f"{HEADER_TITLE}\n{' '.join(str(n) for n in dims)}\n"
    payload = np.asarray(array, dtype=_DTYPE).ravel(order="F").tobytes()
    atomic_write_bytes(cfl_path, payload)
    atomic_write_bytes(hdr_path, header.encode("ascii"))

def read_dims(hdr_path: Path) -> tuple[int, ...]:
    lines = hdr_path.read_text(encoding="ascii", errors="replace").splitlines()
    if len(lines) < 2 or lines[0].strip() != HEADER_TITLE:
        raise CflFormatError(hdr_path, f"first line must be '{HEADER_TITLE}'")
    try:
        dims = tuple(int(item) for item in lines[1].split())
    except ValueError:
        raise CflFormatError(hdr_path, f"non-integer dimension in '{lines[1]}'")
    if len(dims) == 0 or any(n < 1 for n in dims):
        raise CflFormatError(hdr_path, f"invalid dimension list '{lines[1]}'")
    return dims

def cfl_read(stem: str | Path) -> np.ndarray:
    """
    The stored array with the header's dimensions, as complex64.

    Raises:
        FileNotFoundError: If either file is missing.
        CflFormatError: If the header is malformed or the payload size does
            not match it.
    """
    hdr_path, cfl_path = _pair(stem)
    dims = read_dims(hdr_path)
    payload = cfl_path.read_bytes()
    expected = int(np.prod(dims)) * _DTYPE.itemsize
    if len(payload) != expected:
        raise CflFormatError(cfl_path, f"payload has {len(payload)} bytes, header implies {expected}")
    return np.frombuffer(payload, dtype=_DTYPE).reshape(dims, order="F").astype(np.complex64)

def squeeze_trailing(array: np.ndarray, ndim: int) -> np.ndarray:
    """
    Drop trailing singleton dimensions down to ``ndim``.

    Raises:
        ValueError: If a non-singleton dimension would have to go.
    """
    shape = list(array.shape)
    while len(shape) > ndim and shape[-1] == 1:
        shape.pop()
    if len(shape) != ndim:
        raise ValueError(f"expected {ndim} dimensions, got shape {array.shape}")
    return array.reshape(shape)

__all__ = [
    "cfl_write",
    "cfl_read",
    "read_dims",
    "squeeze_trailing",
    "atomic_write_bytes",
]
