import dataclasses
import numpy as np
from ..types import DisplacementField

def cubic_bspline(s: np.ndarray) -> np.ndarray:
    a = np.abs(s)
    inner = 2 / 3 - a ** 2 + a ** 3 / 2
    outer = (2 - a) ** 3 / 6
    return np.where(a < 1, inner, np.where(a < 2, outer, 0.0))

def axis_basis(n: int, spacing: int) -> np.ndarray:
    """
    n×m matrix of cubic B-spline weights for control points at
    ``(j − 1)·spacing``. A spacing that covers the whole axis collapses to one
    constant basis function.
    """
    if spacing >= n:
        return np.ones((n, 1))
    m = int(np.ceil((n - 1) / spacing)) + 3
    knots = (np.arange(m) - 1) * spacing
    return cubic_bspline((np.arange(n)[:, None] - knots[None, :]) / spacing)

@dataclasses.dataclass(frozen=True)
class BSplineGrid:
    """Separable tensor-product control grid for a 2×H×W field."""
    basis_row: np.ndarray
    basis_col: np.ndarray

    @classmethod
    def create(cls, shape: tuple[int, int], spacing: int) -> BSplineGrid:
        return cls(basis_row=axis_basis(shape[0], spacing),
                   basis_col=axis_basis(shape[1], spacing))

    @property
    def control_shape(self) -> tuple[int, int, int]:
        return (2, self.basis_row.shape[1], self.basis_col.shape[1])

    def zeros(self) -> np.ndarray:
        return np.zeros(self.control_shape)

    def dense(self, coeffs: np.ndarray) -> DisplacementField:
        return np.einsum("ij,cjk,lk->cil", self.basis_row, coeffs, self.basis_col)

    def pullback(self, dense_grad: DisplacementField) -> np.ndarray:
        """Transpose of ``dense``: a dense gradient mapped onto control points."""
        return np.einsum("ij,cil,lk->cjk", self.basis_row, dense_grad, self.basis_col)

    def project(self, field: DisplacementField) -> np.ndarray:
        """Least-squares control coefficients reproducing ``field``."""
        row_pinv = np.linalg.pinv(self.basis_row)
        col_pinv = np.linalg.pinv(self.basis_col)
        return np.einsum("ji,cil,kl->cjk", row_pinv, field, col_pinv)

__all__ = [
    "cubic_bspline",
    "axis_basis",
    "BSplineGrid",
]
