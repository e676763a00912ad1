"""
utils/linalg.py
Dense linear-algebra helpers shared by the solvers.
"""
import numpy as np
import scipy.linalg as linalg


def symmetrize(matrix: np.ndarray) -> np.ndarray:
    return 0.5 * (matrix + matrix.T)


def min_symmetric_eigenvalue(matrix: np.ndarray) -> float:
    if matrix.size == 0:
        return 0.0
    return float(linalg.eigvalsh(symmetrize(matrix))[0])


def max_abs(matrix: np.ndarray) -> float:
    if np.size(matrix) == 0:
        return 0.0
    return float(np.max(np.abs(matrix)))


def reciprocal_condition(matrix: np.ndarray) -> float:
    """1/cond_2 from singular values; 0.0 for exactly singular input."""
    if matrix.size == 0:
        return 1.0
    if not np.all(np.isfinite(matrix)):
        return 0.0
    s = linalg.svdvals(matrix)
    if s[0] == 0.0:
        return 0.0
    return float(s[-1] / s[0])


def numerical_rank(matrix: np.ndarray, tol: float) -> int:
    """Singular values at or below tol * sigma_max count as zero."""
    if matrix.size == 0:
        return 0
    s = linalg.svdvals(matrix)
    if s[0] == 0.0:
        return 0
    return int(np.sum(s > tol * s[0]))


def solve_checked(matrix: np.ndarray, rhs: np.ndarray, name: str, rcond_tol: float) -> np.ndarray:
    """np.linalg.solve guarded by a reciprocal-condition threshold."""
    # imported here: core.errors depends on utils.validators, which imports this module
    from core.errors import SingularMatrixError

    rcond = reciprocal_condition(matrix)
    if rcond < rcond_tol:
        raise SingularMatrixError(f"{name} numerically singular (rcond={rcond:.3e})")
    return np.linalg.solve(matrix, rhs)
