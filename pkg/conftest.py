"""
Shared pytest fixtures: the NKPC calibration and seeded random instances.
"""
from typing import List

import numpy as np
import pytest

from core.config import reset_settings
from solvers import blocks, riccati
from solvers.model import AugmentedLQProblem, Partition, build_nkpc, build_problem, validate_assumptions

NKPC_P = np.array([[1.7518055, -1.1389181], [-1.1389181, 3.4285107]])
RANDOM_SEED = 20200624
RANDOM_COUNT = 100


def random_problem(rng: np.random.Generator) -> AugmentedLQProblem:
    """Rejection-sample a problem satisfying both assumptions (n_y <= 4, n_z <= 3, n_u <= 2)."""
    while True:
        n_k = int(rng.integers(0, 3))
        n_x = int(rng.integers(0, 3))
        if n_k + n_x == 0:
            continue
        n_z = int(rng.integers(1, 4))
        n_u = int(rng.integers(1, 3))
        n_y = n_k + n_x
        n = n_y + n_z
        beta = float(rng.uniform(0.9, 0.999))

        A_yy = rng.normal(scale=0.6, size=(n_y, n_y))
        A_yz = rng.normal(scale=0.5, size=(n_y, n_z))
        A_zz = rng.normal(size=(n_z, n_z))
        A_zz *= rng.uniform(0.3, 0.85) / np.max(np.abs(np.linalg.eigvals(A_zz)))
        B_yu = rng.normal(size=(n_y, n_u))

        G = rng.normal(size=(n, n))
        Q = G.T @ G / n + 0.1 * np.eye(n)
        H = rng.normal(size=(n_u, n_u))
        R = H.T @ H + 0.5 * np.eye(n_u)

        problem = build_problem(
            {
                "A_yy": A_yy,
                "A_yz": A_yz,
                "A_zz": A_zz,
                "B_yu": B_yu,
                "Q_yy": Q[:n_y, :n_y],
                "Q_yz": Q[:n_y, n_y:],
                "Q_zz": Q[n_y:, n_y:],
                "R_uu": R,
            },
            beta,
            Partition(n_k=n_k, n_x=n_x, n_z=n_z, n_u=n_u),
        )
        if validate_assumptions(problem).passed:
            return problem


@pytest.fixture(autouse=True)
def clean_settings(monkeypatch):
    for name in ("RICCATI_TOL", "MAX_ITER", "DAMPING", "HORIZON", "LOG_LEVEL"):
        monkeypatch.delenv(f"RAMSEY_{name}", raising=False)
    reset_settings()
    yield
    reset_settings()


@pytest.fixture
def nkpc() -> AugmentedLQProblem:
    return build_nkpc(0.99, 0.1275, 6.0, 0.8)


@pytest.fixture(scope="session")
def nkpc_solution():
    problem = build_nkpc(0.99, 0.1275, 6.0, 0.8)
    sol = riccati.solve_full_riccati(problem)
    return problem, sol, riccati.compute_gain(problem, sol)


@pytest.fixture(scope="session")
def random_instances() -> List[AugmentedLQProblem]:
    rng = np.random.default_rng(RANDOM_SEED)
    return [random_problem(rng) for _ in range(RANDOM_COUNT)]


@pytest.fixture(scope="session")
def solved_random_instances(random_instances):
    solved = []
    for problem in random_instances:
        full = riccati.solve_full_riccati(problem)
        assembled = blocks.assemble(problem)
        solved.append((problem, full, assembled, riccati.compute_gain(problem, full)))
    return solved
