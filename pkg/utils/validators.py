"""
utils/validators.py
Input validation for model matrices and solver parameters.
"""
from typing import Optional, Tuple

import numpy as np

from utils.linalg import min_symmetric_eigenvalue, symmetrize


class ValidationError(Exception):
    pass


def validate_matrix(name: str, value, shape: Optional[Tuple[int, int]] = None) -> np.ndarray:
    """Coerce to a 2-D float array and check finiteness and shape."""
    try:
        matrix = np.array(value, dtype=float)
    except (TypeError, ValueError) as e:
        raise ValidationError(f"{name} is not a numeric matrix: {e}")

    if matrix.ndim == 0:
        matrix = matrix.reshape(1, 1)
    elif matrix.ndim == 1 and shape is not None and shape[1] == 1:
        matrix = matrix.reshape(-1, 1)
    elif matrix.ndim == 1 and matrix.size == 0 and shape is not None:
        matrix = matrix.reshape(shape)

    if matrix.ndim != 2:
        raise ValidationError(f"{name} must be 2-dimensional, got {matrix.ndim} dimensions")

    if shape is not None and matrix.shape != tuple(shape):
        raise ValidationError(
            f"{name} has shape {matrix.shape[0]}x{matrix.shape[1]}, expected {shape[0]}x{shape[1]}"
        )

    if not np.all(np.isfinite(matrix)):
        raise ValidationError(f"{name} contains a non-finite entry")

    return matrix


def validate_beta(beta: float) -> float:
    if not np.isfinite(beta) or not 0.0 < beta <= 1.0:
        raise ValidationError(f"beta must lie in (0, 1], got {beta}")
    return float(beta)


def validate_psd(name: str, matrix: np.ndarray, tol: float) -> np.ndarray:
    """Symmetrize, then require the smallest eigenvalue to be >= -tol."""
    sym = symmetrize(matrix)
    if sym.size and min_symmetric_eigenvalue(sym) < -tol:
        raise ValidationError(f"{name} not positive semi-definite within tolerance {tol:g}")
    return sym


def validate_pd(name: str, matrix: np.ndarray) -> np.ndarray:
    """Symmetrize, then require the smallest eigenvalue to be > 0."""
    sym = symmetrize(matrix)
    if min_symmetric_eigenvalue(sym) <= 0.0:
        raise ValidationError(f"{name} not strictly positive definite")
    return sym


def validate_vector(name: str, value, size: int) -> np.ndarray:
    """Initial conditions: scalars broadcast for size-1 blocks, lists must match."""
    if value is None:
        return np.zeros((size, 1))
    vector = np.atleast_1d(np.array(value, dtype=float)).reshape(-1)
    if vector.size != size:
        raise ValidationError(f"{name} needs {size} entries, got {vector.size}")
    if not np.all(np.isfinite(vector)):
        raise ValidationError(f"{name} contains a non-finite entry")
    return vector.reshape(size, 1)
