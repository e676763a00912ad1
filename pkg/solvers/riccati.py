"""
solvers/riccati.py
Full augmented discounted Riccati equation, optimal feedback rule, and the
Hamiltonian pencil used to certify mirror roots.
"""
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import logging

import numpy as np
import scipy.linalg as linalg

from core.config import get_settings
from core.errors import ConvergenceError, SingularMatrixError
from solvers.model import AugmentedLQProblem, scaled_problem
from utils.linalg import max_abs, solve_checked, symmetrize

logger = logging.getLogger(__name__)

PROGRESS_EVERY = 1000
# defective zero roots are only resolved to about sqrt(eps)
ROOT_CUTOFF_FACTOR = 10.0


@dataclass(frozen=True)
class RiccatiSolution:
    P: np.ndarray
    n_y: int
    iterations: int
    residual_norm: float
    converged: bool
    last_update: float = float("nan")

    @property
    def P_yy(self) -> np.ndarray:
        return self.P[: self.n_y, : self.n_y]

    @property
    def P_yz(self) -> np.ndarray:
        return self.P[: self.n_y, self.n_y :]

    @property
    def P_zz(self) -> np.ndarray:
        return self.P[self.n_y :, self.n_y :]


@dataclass(frozen=True)
class FeedbackGain:
    F_y: np.ndarray
    F_z: np.ndarray

    @property
    def F(self) -> np.ndarray:
        return np.hstack([self.F_y, self.F_z])


@dataclass(frozen=True)
class HamiltonianPencil:
    L: np.ndarray
    N: np.ndarray


@dataclass(frozen=True)
class MirrorReport:
    eigenvalues: np.ndarray
    pairs: List[Tuple[complex, complex, float]] = field(default_factory=list)
    unpaired: List[complex] = field(default_factory=list)
    passed: bool = False


def inner_matrix(p: AugmentedLQProblem, P_yy: np.ndarray) -> np.ndarray:
    """R_uu + beta B_yu' P_yy B_yu (the shock rows of B drop out)."""
    return p.R_uu + p.beta * p.B_yu.T @ P_yy @ p.B_yu


def riccati_rhs(p: AugmentedLQProblem, P: np.ndarray, rcond_tol: Optional[float] = None) -> np.ndarray:
    """Q + b A'PA - b^2 A'PB (R + b B_yu'P_yy B_yu)^-1 B'PA on the full augmented blocks."""
    if rcond_tol is None:
        rcond_tol = get_settings().rcond_tol
    n_y = p.partition.n_y
    A, B = p.A, p.B
    PA = P @ A
    BtPA = B.T @ PA
    K = inner_matrix(p, P[:n_y, :n_y])
    correction = BtPA.T @ solve_checked(K, BtPA, "R_uu + beta B_yu' P_yy B_yu", rcond_tol)
    return p.Q + p.beta * A.T @ PA - p.beta**2 * correction


def riccati_residual(p: AugmentedLQProblem, P: np.ndarray, rcond_tol: Optional[float] = None) -> float:
    return max_abs(riccati_rhs(p, np.asarray(P, dtype=float), rcond_tol) - P)


def solve_full_riccati(
    p: AugmentedLQProblem,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
    damping: Optional[float] = None,
) -> RiccatiSolution:
    """Fixed-point iteration on the full Riccati display, starting from P = Q.

    Stops when the max-abs update falls below tol. Non-convergence (or a
    non-finite iterate) returns converged=False instead of raising.
    """
    settings = get_settings()
    tol = settings.riccati_tol if tol is None else tol
    max_iter = settings.max_iter if max_iter is None else max_iter
    damping = settings.damping if damping is None else damping

    P = symmetrize(p.Q)
    update = float("inf")
    converged = False
    iterations = 0

    with np.errstate(over="ignore", invalid="ignore"):
        for iterations in range(1, max_iter + 1):
            target = riccati_rhs(p, P, settings.rcond_tol)
            P_next = symmetrize((1.0 - damping) * P + damping * target)
            if not np.all(np.isfinite(P_next)):
                logger.warning(f"❌ Riccati iterate became non-finite at iteration {iterations}")
                update = float("inf")
                break
            update = max_abs(P_next - P)
            P = P_next
            if iterations % PROGRESS_EVERY == 0:
                logger.debug(f"Riccati iteration {iterations}: update {update:.3e}")
            if update < tol:
                converged = True
                break

    if converged:
        residual = riccati_residual(p, P, settings.rcond_tol)
        logger.info(f"✅ Full Riccati converged in {iterations} iterations (residual {residual:.3e})")
    else:
        residual = float("inf")
        if np.all(np.isfinite(P)):
            try:
                residual = riccati_residual(p, P, settings.rcond_tol)
            except SingularMatrixError:
                pass
        logger.warning(f"⚠️  Full Riccati did not converge after {iterations} iterations (update {update:.3e})")

    return RiccatiSolution(
        P=P,
        n_y=p.partition.n_y,
        iterations=iterations,
        residual_norm=residual,
        converged=converged,
        last_update=update,
    )


def solve_scaled_riccati(
    p: AugmentedLQProblem, tol: Optional[float] = None, max_iter: Optional[int] = None
) -> RiccatiSolution:
    """Undiscounted Riccati of the sqrt(beta)-scaled system; same P as the discounted one."""
    solution = solve_full_riccati(scaled_problem(p), tol=tol, max_iter=max_iter)
    residual = riccati_residual(p, solution.P) if solution.converged else solution.residual_norm
    return RiccatiSolution(
        P=solution.P,
        n_y=solution.n_y,
        iterations=solution.iterations,
        residual_norm=residual,
        converged=solution.converged,
        last_update=solution.last_update,
    )


def require_converged(sol: RiccatiSolution) -> None:
    if not sol.converged:
        raise ConvergenceError(
            f"Riccati solution did not converge after {sol.iterations} iterations",
            iterations=sol.iterations,
            last_update=sol.last_update,
        )


def compute_gain(p: AugmentedLQProblem, sol: RiccatiSolution) -> FeedbackGain:
    """u_t = F_y y_t + F_z z_t, read off the full Riccati cross terms."""
    require_converged(sol)
    K = inner_matrix(p, sol.P_yy)
    rhs = p.beta * p.B_yu.T @ np.hstack(
        [sol.P_yy @ p.A_yy, sol.P_yy @ p.A_yz + sol.P_yz @ p.A_zz]
    )
    F = -solve_checked(K, rhs, "R_uu + beta B_yu' P_yy B_yu", get_settings().rcond_tol)
    n_y = p.partition.n_y
    return FeedbackGain(F_y=F[:, :n_y], F_z=F[:, n_y:])


def closed_loop_matrix(p: AugmentedLQProblem, gain: FeedbackGain) -> np.ndarray:
    return p.A_yy + p.B_yu @ gain.F_y


def closed_loop_eigenvalues(p: AugmentedLQProblem, gain: FeedbackGain) -> np.ndarray:
    return linalg.eigvals(closed_loop_matrix(p, gain))


def closed_loop_transition(p: AugmentedLQProblem, gain: FeedbackGain) -> np.ndarray:
    """Full-state transition [[A_cl, A_yz + B_yu F_z], [0, A_zz]] under the optimal rule."""
    part = p.partition
    T = np.zeros((part.n, part.n))
    T[part.y_slice, part.y_slice] = closed_loop_matrix(p, gain)
    T[part.y_slice, part.z_slice] = p.A_yz + p.B_yu @ gain.F_z
    T[part.z_slice, part.z_slice] = p.A_zz
    return T


def closed_loop_spectral_radius(p: AugmentedLQProblem, gain: FeedbackGain) -> float:
    return float(np.max(np.abs(linalg.eigvals(closed_loop_transition(p, gain)))))


def build_pencil(p: AugmentedLQProblem, scaled: bool = False) -> HamiltonianPencil:
    """L = [[I, -b B R^-1 B'], [0, b A']], N = [[A, 0], [-Q, I]] on the full augmented blocks.

    With scaled=True the pencil of the sqrt(beta)-scaled, undiscounted system is returned.
    """
    if scaled:
        p = scaled_problem(p)
    n = p.partition.n
    B = p.B
    I = np.eye(n)
    L = np.block(
        [
            [I, -p.beta * B @ np.linalg.solve(p.R_uu, B.T)],
            [np.zeros((n, n)), p.beta * p.A.T],
        ]
    )
    N = np.block([[p.A, np.zeros((n, n))], [-p.Q, I]])
    return HamiltonianPencil(L=L, N=N)


def pencil_roots(pencil: HamiltonianPencil) -> np.ndarray:
    """Generalized eigenvalues of N v = lam L v; roots at infinity come back as inf.

    L is never inverted, so a singular A (i.i.d. shocks, shift matrices) is fine.
    Only a singular pencil, det(N - lam L) = 0 for every lam, is an error.
    """
    alpha, denom = linalg.eigvals(pencil.N, pencil.L, homogeneous_eigvals=True)
    small = np.finfo(float).eps * len(alpha) * max(max_abs(pencil.N), max_abs(pencil.L))
    if np.any((np.abs(alpha) <= small) & (np.abs(denom) <= small)):
        raise SingularMatrixError("Hamiltonian pencil (N, L) singular: det(N - lam L) vanishes identically")
    roots = np.full(len(alpha), np.inf, dtype=complex)
    finite = denom != 0.0
    roots[finite] = alpha[finite] / denom[finite]
    return roots


def pencil_mirror_check(
    pencil: HamiltonianPencil, beta: float, tol: Optional[float] = None
) -> MirrorReport:
    """Pair every root lam of the pencil (N, L) with a mirror root 1/(beta lam).

    Pairing is done on sqrt(beta)-scaled roots s = sqrt(beta) lam, where mirrors
    satisfy s s' = 1; each root is used at most once, nearest match first.
    Roots with |s| below the zero cutoff pair with roots at infinity.
    """
    settings = get_settings()
    tol = settings.mirror_tol if tol is None else tol
    eigenvalues = pencil_roots(pencil)
    scale = max(max_abs(pencil.N), max_abs(pencil.L))
    cutoff = max(tol, ROOT_CUTOFF_FACTOR * np.sqrt(np.finfo(float).eps * scale))
    scaled = np.sqrt(beta) * eigenvalues
    zero = np.abs(scaled) <= cutoff
    infinite = ~np.isfinite(scaled) | (np.abs(scaled) >= 1.0 / cutoff)

    pairs: List[Tuple[complex, complex, float]] = []
    unpaired: List[complex] = []
    zeros, infinities = np.flatnonzero(zero), np.flatnonzero(infinite)
    for i, j in zip(zeros, infinities):
        pairs.append((complex(eigenvalues[i]), complex(eigenvalues[j]), 0.0))
    for i in np.concatenate([zeros[len(infinities) :], infinities[len(zeros) :]]):
        unpaired.append(complex(eigenvalues[i]))

    used = zero | infinite
    for i in range(len(scaled)):
        if used[i]:
            continue
        gaps = np.full(len(scaled), np.inf)
        open_roots = ~used
        open_roots[i] = False
        gaps[open_roots] = np.abs(scaled[i] * scaled[open_roots] - 1.0)
        j = int(np.argmin(gaps))
        if np.isfinite(gaps[j]) and gaps[j] <= tol:
            used[i] = used[j] = True
            pairs.append((complex(eigenvalues[i]), complex(eigenvalues[j]), float(gaps[j])))
        else:
            used[i] = True
            unpaired.append(complex(eigenvalues[i]))

    passed = not unpaired
    if not passed:
        logger.warning(f"⚠️  {len(unpaired)} pencil roots without a mirror root")
    return MirrorReport(eigenvalues=eigenvalues, pairs=pairs, unpaired=unpaired, passed=passed)
