"""
solvers/blocks.py
Three-stage block pipeline: P_yy Riccati, P_yz Sylvester, P_zz equation.
Assembles the same P as the full solver.
"""
from typing import Optional, Tuple

import logging

import numpy as np
import scipy.linalg as linalg

from core.config import get_settings
from core.errors import ConvergenceError, SingularMatrixError
from solvers.model import AugmentedLQProblem
from solvers.riccati import RiccatiSolution, inner_matrix, riccati_residual, riccati_rhs
from utils.linalg import max_abs, reciprocal_condition, solve_checked, symmetrize

logger = logging.getLogger(__name__)

INNER = "R_uu + beta B_yu' P_yy B_yu"


def _vec(matrix: np.ndarray) -> np.ndarray:
    return matrix.reshape(-1, order="F")


def _unvec(vector: np.ndarray, shape: Tuple[int, int]) -> np.ndarray:
    return vector.reshape(shape, order="F")


def _worst_pair(left: np.ndarray, right: np.ndarray, beta: float) -> Tuple[complex, complex]:
    lam = linalg.eigvals(left)
    mu = linalg.eigvals(right)
    products = np.abs(beta * np.outer(lam, mu) - 1.0)
    i, j = np.unravel_index(int(np.argmin(products)), products.shape)
    return complex(lam[i]), complex(mu[j])


def _iterate_pyy(
    p: AugmentedLQProblem, tol: Optional[float], max_iter: Optional[int]
) -> Tuple[np.ndarray, int, float]:
    """Returns (P_yy, iterations, last max-abs update)."""
    settings = get_settings()
    tol = settings.riccati_tol if tol is None else tol
    max_iter = settings.max_iter if max_iter is None else max_iter

    A, B, beta = p.A_yy, p.B_yu, p.beta
    P = symmetrize(p.Q_yy)
    update = float("inf")
    with np.errstate(over="ignore", invalid="ignore"):
        for iteration in range(1, max_iter + 1):
            BtPA = B.T @ P @ A
            gain_term = BtPA.T @ solve_checked(inner_matrix(p, P), BtPA, INNER, settings.rcond_tol)
            P_next = symmetrize(p.Q_yy + beta * A.T @ P @ A - beta**2 * gain_term)
            if not np.all(np.isfinite(P_next)):
                break
            update = max_abs(P_next - P)
            P = P_next
            if update < tol:
                logger.debug(f"P_yy converged in {iteration} iterations")
                return P, iteration, update

    raise ConvergenceError(
        f"P_yy Riccati did not converge (last update {update:.3e})",
        iterations=max_iter,
        last_update=update,
    )


def solve_pyy(
    p: AugmentedLQProblem, tol: Optional[float] = None, max_iter: Optional[int] = None
) -> np.ndarray:
    """Controllable-block Riccati by fixed-point iteration from Q_yy.

    Raises ConvergenceError if the update never falls below tol.
    """
    return _iterate_pyy(p, tol, max_iter)[0]


def solve_fy(p: AugmentedLQProblem, P_yy: np.ndarray) -> np.ndarray:
    rhs = p.beta * p.B_yu.T @ P_yy @ p.A_yy
    return -solve_checked(inner_matrix(p, P_yy), rhs, INNER, get_settings().rcond_tol)


def solve_pyz(p: AugmentedLQProblem, P_yy: np.ndarray, F_y: np.ndarray) -> np.ndarray:
    """P_yz = Q_yz + b A_cl' P_yy A_yz + b A_cl' P_yz A_zz, solved by vectorization."""
    n_y, n_z = p.partition.n_y, p.partition.n_z
    A_cl = p.A_yy + p.B_yu @ F_y
    C = p.Q_yz + p.beta * A_cl.T @ P_yy @ p.A_yz
    operator = np.eye(n_y * n_z) - p.beta * np.kron(p.A_zz.T, A_cl.T)

    if reciprocal_condition(operator) < get_settings().rcond_tol:
        lam, mu = _worst_pair(A_cl, p.A_zz, p.beta)
        raise SingularMatrixError(
            f"Sylvester operator for P_yz singular: beta * {lam:.6g} * {mu:.6g} = 1"
        )
    return _unvec(np.linalg.solve(operator, _vec(C)), (n_y, n_z))


def solve_pzz(p: AugmentedLQProblem, P_yy: np.ndarray, P_yz: np.ndarray) -> np.ndarray:
    """Shock-block equation: the (2,2) block of the full Riccati display.

    The P_zz-linear part is b A_zz' P_zz A_zz, a discrete Lyapunov form solved
    by vectorization.
    """
    n_z = p.partition.n_z
    beta, A_yz, A_zz, B = p.beta, p.A_yz, p.A_zz, p.B_yu
    cross = P_yy @ A_yz + P_yz @ A_zz
    left = A_yz.T @ P_yy @ B + A_zz.T @ P_yz.T @ B
    correction = left @ solve_checked(inner_matrix(p, P_yy), B.T @ cross, INNER, get_settings().rcond_tol)
    C = p.Q_zz + beta * (A_yz.T @ cross + A_zz.T @ P_yz.T @ A_yz) - beta**2 * correction

    operator = np.eye(n_z * n_z) - beta * np.kron(A_zz.T, A_zz.T)
    if reciprocal_condition(operator) < get_settings().rcond_tol:
        lam, mu = _worst_pair(A_zz, A_zz, beta)
        raise SingularMatrixError(
            f"Lyapunov operator for P_zz singular: beta * {lam:.6g} * {mu:.6g} = 1"
        )
    return symmetrize(_unvec(np.linalg.solve(operator, _vec(C)), (n_z, n_z)))


def assemble(
    p: AugmentedLQProblem, tol: Optional[float] = None, max_iter: Optional[int] = None
) -> RiccatiSolution:
    P_yy, iterations, last_update = _iterate_pyy(p, tol, max_iter)
    F_y = solve_fy(p, P_yy)
    P_yz = solve_pyz(p, P_yy, F_y)
    P_zz = solve_pzz(p, P_yy, P_yz)

    P = symmetrize(np.block([[P_yy, P_yz], [P_yz.T, P_zz]]))
    residual = riccati_residual(p, P)
    logger.info(f"✅ Block pipeline assembled P (residual {residual:.3e})")
    return RiccatiSolution(
        P=P,
        n_y=p.partition.n_y,
        iterations=iterations,
        residual_norm=residual,
        converged=True,
        last_update=last_update,
    )


def shock_block_residual(p: AugmentedLQProblem, P: np.ndarray) -> float:
    """Max-abs residual of the (2,2) block of the full Riccati display."""
    n_y = p.partition.n_y
    return max_abs((riccati_rhs(p, P) - P)[n_y:, n_y:])
