"""
solvers/welfare.py
Ramsey anchor of the jump variables, the projected welfare matrix and welfare values.

Welfare is reported without the 1/2 prefactor of the objective:
W = -(k0, z0)' S (k0, z0).
"""
from dataclasses import dataclass
from typing import Optional, Tuple

import logging

import numpy as np

from core.config import get_settings
from core.errors import SingularMatrixError
from solvers.model import Partition
from utils.linalg import reciprocal_condition, symmetrize
from utils.validators import ValidationError, validate_vector

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class WelfareReport:
    G_k: np.ndarray
    G_z: np.ndarray
    S: np.ndarray
    welfare: float
    x0: np.ndarray
    naive_welfare: float


def ordering_permutation(partition: Partition) -> np.ndarray:
    """Permutation matrix T with T @ (k, x, z) = (x, k, z)."""
    order = np.concatenate(
        [
            np.arange(partition.n_k, partition.n_y),
            np.arange(0, partition.n_k),
            np.arange(partition.n_y, partition.n),
        ]
    )
    return np.eye(partition.n)[order]


def _split(P: np.ndarray, partition: Partition):
    P = np.asarray(P, dtype=float)
    if P.shape != (partition.n, partition.n):
        raise ValidationError(f"P has shape {P.shape}, expected {partition.n}x{partition.n}")
    reordered = ordering_permutation(partition) @ P @ ordering_permutation(partition).T
    n_x = partition.n_x
    return reordered[:n_x, :n_x], reordered[:n_x, n_x:], reordered[n_x:, n_x:]


def _check_pxx(P_xx: np.ndarray, rcond_tol: Optional[float]) -> None:
    if rcond_tol is None:
        rcond_tol = get_settings().rcond_tol
    rcond = reciprocal_condition(P_xx)
    if rcond < rcond_tol:
        raise SingularMatrixError(f"P_xx numerically singular (rcond={rcond:.3e})")


def anchor_map(
    P: np.ndarray, partition: Partition, rcond_tol: Optional[float] = None
) -> Tuple[np.ndarray, np.ndarray]:
    """x0 = G_k k0 + G_z z0 with G = -P_xx^-1 P_x(k,z), from dL/dx0 = 0."""
    P_xx, P_xr, _ = _split(P, partition)
    if partition.n_x == 0:
        return np.zeros((0, partition.n_k)), np.zeros((0, partition.n_z))
    _check_pxx(P_xx, rcond_tol)
    G = -np.linalg.solve(P_xx, P_xr)
    return G[:, : partition.n_k], G[:, partition.n_k :]


def welfare_matrix(P: np.ndarray, partition: Partition, rcond_tol: Optional[float] = None) -> np.ndarray:
    """Schur complement of P_xx, via the sandwich T' P_(x,k,z) T with T = [G; I]."""
    P_xx, P_xr, P_rr = _split(P, partition)
    if partition.n_x == 0:
        return symmetrize(P_rr)
    G_k, G_z = anchor_map(P, partition, rcond_tol)
    T = np.vstack([np.hstack([G_k, G_z]), np.eye(partition.n_k + partition.n_z)])
    reordered = np.block([[P_xx, P_xr], [P_xr.T, P_rr]])
    return symmetrize(T.T @ reordered @ T)


def _initial(partition: Partition, k0, z0) -> np.ndarray:
    return np.vstack(
        [validate_vector("k0", k0, partition.n_k), validate_vector("z0", z0, partition.n_z)]
    )


def welfare_value(S: np.ndarray, k0, z0) -> float:
    S = np.asarray(S, dtype=float)
    k = np.atleast_1d(np.asarray(k0 if k0 is not None else [], dtype=float)).reshape(-1, 1)
    z = np.atleast_1d(np.asarray(z0, dtype=float)).reshape(-1, 1)
    state = np.vstack([k, z])
    if S.shape != (state.shape[0], state.shape[0]):
        raise ValidationError(
            f"welfare matrix is {S.shape[0]}x{S.shape[1]} but (k0, z0) has {state.shape[0]} entries"
        )
    return -(state.T @ S @ state).item()


def naive_welfare(P: np.ndarray, partition: Partition, k0, z0, rcond_tol: Optional[float] = None) -> float:
    """Welfare recomputed with the P_zz block overwritten by zeros."""
    P_naive = np.array(P, dtype=float)
    P_naive[partition.z_slice, partition.z_slice] = 0.0
    S = welfare_matrix(P_naive, partition, rcond_tol)
    return welfare_value(S, k0, z0)


def welfare_report(P: np.ndarray, partition: Partition, k0=None, z0=None) -> WelfareReport:
    initial = _initial(partition, k0, z0)
    k, z = initial[: partition.n_k], initial[partition.n_k :]
    G_k, G_z = anchor_map(P, partition)
    S = welfare_matrix(P, partition)
    x0 = G_k @ k + G_z @ z
    report = WelfareReport(
        G_k=G_k,
        G_z=G_z,
        S=S,
        welfare=welfare_value(S, k, z),
        x0=x0,
        naive_welfare=naive_welfare(P, partition, k, z),
    )
    logger.info(f"Welfare {report.welfare:.6g} (naive, P_zz = 0: {report.naive_welfare:.6g})")
    return report
