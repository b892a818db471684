import numpy as np
from ..types import ComplexImage, DisplacementField, ShapeMismatchError, ZeroReferenceError

def nrmse(x_hat: ComplexImage, x: ComplexImage) -> float:
    """
    ``‖x̂ − x‖₂ / ‖x‖₂`` over complex entries.

    Raises:
        ShapeMismatchError: If the shapes differ.
        ZeroReferenceError: If ``x`` is identically zero.
    """
    if x_hat.shape != x.shape:
        raise ShapeMismatchError("ComplexImage", x.shape, x_hat.shape)
    reference = float(np.linalg.norm(x))
    if reference == 0:
        raise ZeroReferenceError()
    return float(np.linalg.norm(x_hat - x)) / reference

def magnitude_nrmse(x_hat: ComplexImage, x: ComplexImage) -> float:
    """NRMSE of the magnitude images, insensitive to a global phase."""
    return nrmse(np.abs(x_hat), np.abs(x))

def mean_endpoint_error(u: DisplacementField,
                        v: DisplacementField,
                        support: np.ndarray | None = None) -> float:
    """Mean Euclidean distance between two fields, optionally over ``support`` only."""
    if u.shape != v.shape:
        raise ShapeMismatchError("DisplacementField", v.shape, u.shape)
    distance = np.hypot(u[0] - v[0], u[1] - v[1])
    if support is not None:
        distance = distance[support]
    return float(distance.mean())

__all__ = [
    "nrmse",
    "magnitude_nrmse",
    "mean_endpoint_error",
]
