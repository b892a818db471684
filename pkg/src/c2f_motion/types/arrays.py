import numpy as np
from numpy.typing import NDArray

# H×W complex image; leading batch axes are allowed wherever an operator is
# applied over the last two axes.
type ComplexImage = NDArray[np.complexfloating]

# Same shape as the image it transforms, DC at (H // 2, W // 2).
type KSpaceGrid = NDArray[np.complexfloating]

# 2×H×W real, component 0 = row displacement, component 1 = column, in pixels.
type DisplacementField = NDArray[np.floating]

type RealGrid = NDArray[np.floating]

def zero_field(shape: tuple[int, int]) -> DisplacementField:
    return np.zeros((2, *shape), dtype=np.float64)

__all__ = [
    "ComplexImage",
    "KSpaceGrid",
    "DisplacementField",
    "RealGrid",
    "zero_field",
]
