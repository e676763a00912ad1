"""
core/report.py
Machine-readable reports for the CLI.
"""
from typing import Any, Dict, List, Optional

import numpy as np
from pydantic import BaseModel

from core.pipeline import PipelineResult
from solvers.simulate import OracleResult

Matrix = List[List[float]]


def as_rows(matrix: np.ndarray) -> Matrix:
    return np.asarray(matrix, dtype=float).tolist()


class SolveReport(BaseModel):
    problem: Dict[str, Any]
    P: Dict[str, Matrix]
    F: Dict[str, Matrix]
    anchor: Dict[str, Matrix]
    welfare_matrix: Matrix
    welfare: float
    naive_welfare: float
    diagnostics: Dict[str, Any]


class SimulationSummary(BaseModel):
    periods: int
    W_sim: float
    W_riccati: float
    gap: float
    csv_path: Optional[str] = None


def build_solve_report(result: PipelineResult, k0: np.ndarray, z0: np.ndarray) -> SolveReport:
    p, sol = result.problem, result.solution
    part = p.partition
    validation = result.validation
    return SolveReport(
        problem={
            "n_k": part.n_k,
            "n_x": part.n_x,
            "n_z": part.n_z,
            "n_u": part.n_u,
            "beta": p.beta,
            "k0": np.asarray(k0, dtype=float).reshape(-1).tolist(),
            "z0": np.asarray(z0, dtype=float).reshape(-1).tolist(),
        },
        P={
            "full": as_rows(sol.P),
            "P_yy": as_rows(sol.P_yy),
            "P_yz": as_rows(sol.P_yz),
            "P_zz": as_rows(sol.P_zz),
        },
        F={"F_y": as_rows(result.gain.F_y), "F_z": as_rows(result.gain.F_z)},
        anchor={
            "G_k": as_rows(result.welfare.G_k),
            "G_z": as_rows(result.welfare.G_z),
            "x0": as_rows(result.welfare.x0),
        },
        welfare_matrix=as_rows(result.welfare.S),
        welfare=result.welfare.welfare,
        naive_welfare=result.welfare.naive_welfare,
        diagnostics={
            "method": result.method,
            "iterations": sol.iterations,
            "residual": sol.residual_norm,
            "last_update": sol.last_update,
            "converged": sol.converged,
            "cross_check_gap": result.cross_check_gap,
            "controllability_rank": validation.controllability_rank,
            "controllable": validation.controllable,
            "shock_eigenvalue_moduli": validation.shock_eigenvalue_moduli,
            "shock_stable": validation.shock_stable,
            "mirror_roots_passed": result.mirror.passed if result.mirror is not None else None,
        },
    )


def build_simulation_summary(oracle: OracleResult, periods: int, csv_path: Optional[str]) -> SimulationSummary:
    return SimulationSummary(
        periods=periods,
        W_sim=oracle.W_sim,
        W_riccati=oracle.W_riccati,
        gap=oracle.gap,
        csv_path=csv_path,
    )
