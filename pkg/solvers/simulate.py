"""
solvers/simulate.py
Deterministic closed-loop impulse responses and discounted-loss summation:
the simulation oracle for the closed-form welfare.
"""
from dataclasses import dataclass
from typing import List, Optional

import logging
import math

import numpy as np
import pandas as pd

from core.config import get_settings
from core.errors import SimulationError
from solvers.model import AugmentedLQProblem
from solvers.riccati import (
    FeedbackGain,
    RiccatiSolution,
    closed_loop_matrix,
    closed_loop_spectral_radius,
    require_converged,
)
from solvers.welfare import welfare_report
from utils.validators import ValidationError, validate_vector

logger = logging.getLogger(__name__)

MAX_ORACLE_HORIZON = 20000
TAIL_MARGIN = 1e-3


@dataclass(frozen=True)
class Trajectory:
    horizon: int
    y_path: np.ndarray  # n_y x (T+1)
    z_path: np.ndarray  # n_z x (T+1)
    u_path: np.ndarray  # n_u x (T+1)
    period_loss: np.ndarray
    discounted_cumulative: np.ndarray

    def to_frame(self, n_k: int) -> pd.DataFrame:
        n_y = self.y_path.shape[0]
        columns = {"t": np.arange(self.horizon + 1)}
        for i in range(n_k):
            columns[f"k_{i + 1}"] = self.y_path[i]
        for i in range(n_y - n_k):
            columns[f"x_{i + 1}"] = self.y_path[n_k + i]
        for i in range(self.z_path.shape[0]):
            columns[f"z_{i + 1}"] = self.z_path[i]
        for i in range(self.u_path.shape[0]):
            columns[f"u_{i + 1}"] = self.u_path[i]
        columns["period_loss"] = self.period_loss
        columns["discounted_cumulative"] = self.discounted_cumulative
        return pd.DataFrame(columns)


@dataclass(frozen=True)
class OracleResult:
    W_sim: float
    W_riccati: float
    gap: float


def period_loss(p: AugmentedLQProblem, y: np.ndarray, z: np.ndarray, u: np.ndarray) -> float:
    return (
        y.T @ p.Q_yy @ y + 2.0 * y.T @ p.Q_yz @ z + z.T @ p.Q_zz @ z + u.T @ p.R_uu @ u
    ).item()


def simulate_closed_loop(
    p: AugmentedLQProblem,
    F: FeedbackGain,
    k0,
    z0,
    x0,
    T: Optional[int] = None,
) -> Trajectory:
    """Run u_t = F_y y_t + F_z z_t through the transition with zero innovations."""
    part = p.partition
    T = get_settings().horizon if T is None else T
    if T < 0:
        raise ValidationError(f"horizon must be non-negative, got {T}")

    y = np.vstack([validate_vector("k0", k0, part.n_k), validate_vector("x0", x0, part.n_x)])
    z = validate_vector("z0", z0, part.n_z)

    y_path = np.zeros((part.n_y, T + 1))
    z_path = np.zeros((part.n_z, T + 1))
    u_path = np.zeros((part.n_u, T + 1))
    losses = np.zeros(T + 1)

    with np.errstate(over="ignore", invalid="ignore"):
        for t in range(T + 1):
            u = F.F_y @ y + F.F_z @ z
            if not (np.all(np.isfinite(y)) and np.all(np.isfinite(z)) and np.all(np.isfinite(u))):
                raise SimulationError(f"Non-finite closed-loop state at t={t}", index=t)
            y_path[:, t] = y[:, 0]
            z_path[:, t] = z[:, 0]
            u_path[:, t] = u[:, 0]
            losses[t] = period_loss(p, y, z, u)
            if t < T:
                y, z = p.A_yy @ y + p.A_yz @ z + p.B_yu @ u, p.A_zz @ z

    discounts = p.beta ** np.arange(T + 1)
    return Trajectory(
        horizon=T,
        y_path=y_path,
        z_path=z_path,
        u_path=u_path,
        period_loss=losses,
        discounted_cumulative=np.cumsum(discounts * losses),
    )


def discounted_loss(p: AugmentedLQProblem, traj: Trajectory) -> float:
    return float(np.sum(p.beta ** np.arange(traj.horizon + 1) * traj.period_loss))


def anchored_trajectory(
    p: AugmentedLQProblem, sol: RiccatiSolution, F: FeedbackGain, k0, z0, T: Optional[int] = None
) -> Trajectory:
    report = welfare_report(sol.P, p.partition, k0, z0)
    return simulate_closed_loop(p, F, k0, z0, report.x0, T)


def oracle_welfare(
    p: AugmentedLQProblem,
    sol: RiccatiSolution,
    F: FeedbackGain,
    k0,
    z0,
    T: Optional[int] = None,
) -> OracleResult:
    require_converged(sol)
    W_riccati = welfare_report(sol.P, p.partition, k0, z0).welfare
    traj = anchored_trajectory(p, sol, F, k0, z0, T)
    W_sim = -discounted_loss(p, traj)
    gap = abs(W_sim - W_riccati)
    logger.info(f"Oracle welfare over {traj.horizon} periods: {W_sim:.10g} vs {W_riccati:.10g} (gap {gap:.3e})")
    return OracleResult(W_sim=W_sim, W_riccati=W_riccati, gap=gap)


def oracle_horizon(p: AugmentedLQProblem, F: FeedbackGain, rel_tol: float, minimum: int = 0) -> int:
    """Shortest horizon T >= minimum with (beta rho_cl^2)^(T+1) <= TAIL_MARGIN * rel_tol.

    rho_cl is the spectral radius of the full closed-loop transition; the result
    is capped at MAX_ORACLE_HORIZON.
    """
    q = p.beta * closed_loop_spectral_radius(p, F) ** 2
    if q <= 0.0:
        return minimum
    if q >= 1.0:
        logger.warning(f"⚠️  Closed loop does not decay (beta rho_cl^2 = {q:.6g}); horizon capped")
        return max(minimum, MAX_ORACLE_HORIZON)
    needed = int(math.ceil(math.log(TAIL_MARGIN * rel_tol) / math.log(q))) - 1
    if needed > MAX_ORACLE_HORIZON:
        logger.warning(f"⚠️  Oracle horizon {needed} capped at {MAX_ORACLE_HORIZON} (beta rho_cl^2 = {q:.6g})")
    return max(minimum, min(needed, MAX_ORACLE_HORIZON))


def bellman_residuals(
    p: AugmentedLQProblem, sol: RiccatiSolution, traj: Trajectory, upto: Optional[int] = None
) -> List[float]:
    """|V_t - (-l_t + beta V_{t+1})| with V_t = -(y_t, z_t)' P (y_t, z_t)."""
    last = traj.horizon - 1 if upto is None else min(upto, traj.horizon - 1)
    states = np.vstack([traj.y_path, traj.z_path])
    values = -np.einsum("it,ij,jt->t", states, sol.P, states)
    return [
        abs(values[t] - (-traj.period_loss[t] + p.beta * values[t + 1])) for t in range(last + 1)
    ]


def closed_loop_shock_ratio(p: AugmentedLQProblem, F: FeedbackGain) -> np.ndarray:
    """y-loading of the shock eigen-directions of the closed loop.

    For a single shock with root rho the anchored path satisfies
    y_t / z_t -> (rho I - A_cl)^-1 (A_yz + B_yu F_z).
    """
    part = p.partition
    if part.n_z != 1:
        raise ValidationError("closed_loop_shock_ratio needs a single shock variable")
    rho = float(p.A_zz[0, 0])
    A_cl = closed_loop_matrix(p, F)
    return np.linalg.solve(rho * np.eye(part.n_y) - A_cl, p.A_yz + p.B_yu @ F.F_z)
