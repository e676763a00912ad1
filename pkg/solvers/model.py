"""
solvers/model.py
Augmented LQ problem data: construction, assumption checks, sqrt(beta) scaling,
the NKPC example factory and the JSON model schema.

Internal ordering of the full state is (k, x, z): y = (k, x) first, shocks last.
"""
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import logging

import numpy as np
import scipy.linalg as linalg
from pydantic import BaseModel, ConfigDict

from core.config import get_settings
from utils.linalg import numerical_rank
from utils.validators import (
    ValidationError,
    validate_beta,
    validate_matrix,
    validate_pd,
    validate_psd,
)

logger = logging.getLogger(__name__)

BLOCK_NAMES = ("A_yy", "A_yz", "A_zz", "B_yu", "Q_yy", "Q_yz", "Q_zz", "R_uu")


def _frozen(matrix: np.ndarray) -> np.ndarray:
    matrix = np.array(matrix, dtype=float)
    matrix.setflags(write=False)
    return matrix


@dataclass(frozen=True)
class Partition:
    n_k: int
    n_x: int
    n_z: int
    n_u: int

    def __post_init__(self):
        for name in ("n_k", "n_x", "n_z", "n_u"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or isinstance(value, bool) or value < 0:
                raise ValidationError(f"{name} must be a non-negative integer, got {value!r}")
        if self.n_k + self.n_x < 1:
            raise ValidationError("n_k + n_x must be at least 1")
        if self.n_z < 1:
            raise ValidationError("n_z must be at least 1")
        if self.n_u < 1:
            raise ValidationError("n_u must be at least 1")

    @property
    def n_y(self) -> int:
        return self.n_k + self.n_x

    @property
    def n(self) -> int:
        return self.n_y + self.n_z

    @property
    def k_slice(self) -> slice:
        return slice(0, self.n_k)

    @property
    def x_slice(self) -> slice:
        return slice(self.n_k, self.n_y)

    @property
    def y_slice(self) -> slice:
        return slice(0, self.n_y)

    @property
    def z_slice(self) -> slice:
        return slice(self.n_y, self.n)


@dataclass(frozen=True)
class AugmentedLQProblem:
    partition: Partition
    beta: float
    A_yy: np.ndarray
    A_yz: np.ndarray
    A_zz: np.ndarray
    B_yu: np.ndarray
    Q_yy: np.ndarray
    Q_yz: np.ndarray
    Q_zz: np.ndarray
    R_uu: np.ndarray

    def blocks(self) -> Dict[str, np.ndarray]:
        return {name: getattr(self, name) for name in BLOCK_NAMES}

    @property
    def A(self) -> np.ndarray:
        """Full transition [[A_yy, A_yz], [0, A_zz]]."""
        p = self.partition
        A = np.zeros((p.n, p.n))
        A[p.y_slice, p.y_slice] = self.A_yy
        A[p.y_slice, p.z_slice] = self.A_yz
        A[p.z_slice, p.z_slice] = self.A_zz
        return A

    @property
    def B(self) -> np.ndarray:
        """Full input matrix; the shock rows are structurally zero."""
        p = self.partition
        B = np.zeros((p.n, p.n_u))
        B[p.y_slice, :] = self.B_yu
        return B

    @property
    def Q(self) -> np.ndarray:
        p = self.partition
        Q = np.zeros((p.n, p.n))
        Q[p.y_slice, p.y_slice] = self.Q_yy
        Q[p.y_slice, p.z_slice] = self.Q_yz
        Q[p.z_slice, p.y_slice] = self.Q_yz.T
        Q[p.z_slice, p.z_slice] = self.Q_zz
        return Q


@dataclass(frozen=True)
class ScaledSystem:
    A_tilde: np.ndarray
    B_tilde: np.ndarray
    source: AugmentedLQProblem


@dataclass(frozen=True)
class ValidationReport:
    controllability_rank: Optional[int] = None
    controllable: Optional[bool] = None
    shock_eigenvalue_moduli: List[float] = field(default_factory=list)
    shock_stable: Optional[bool] = None
    messages: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.controllable) and bool(self.shock_stable)

    def merge(self, other: "ValidationReport") -> "ValidationReport":
        return ValidationReport(
            controllability_rank=(
                self.controllability_rank
                if self.controllability_rank is not None
                else other.controllability_rank
            ),
            controllable=self.controllable if self.controllable is not None else other.controllable,
            shock_eigenvalue_moduli=self.shock_eigenvalue_moduli or other.shock_eigenvalue_moduli,
            shock_stable=self.shock_stable if self.shock_stable is not None else other.shock_stable,
            messages=list(self.messages) + list(other.messages),
        )


def build_problem(
    blocks: Dict[str, Any],
    beta: float,
    partition: Partition,
    psd_tol: Optional[float] = None,
) -> AugmentedLQProblem:
    """Canonical constructor: checks dimensions, finiteness, Q_yy PSD and R_uu PD.

    Q_yy and R_uu are symmetrized as (M + M^T)/2 before the definiteness checks;
    Q_zz must already be symmetric.
    """
    if psd_tol is None:
        psd_tol = get_settings().psd_tol

    missing = [name for name in BLOCK_NAMES if name not in blocks]
    if missing:
        raise ValidationError(f"Missing block matrices: {', '.join(missing)}")
    unknown = sorted(set(blocks) - set(BLOCK_NAMES))
    if unknown:
        raise ValidationError(f"Unknown block matrices: {', '.join(unknown)}")

    beta = validate_beta(beta)
    n_y, n_z, n_u = partition.n_y, partition.n_z, partition.n_u
    shapes = {
        "A_yy": (n_y, n_y),
        "A_yz": (n_y, n_z),
        "A_zz": (n_z, n_z),
        "B_yu": (n_y, n_u),
        "Q_yy": (n_y, n_y),
        "Q_yz": (n_y, n_z),
        "Q_zz": (n_z, n_z),
        "R_uu": (n_u, n_u),
    }
    checked = {name: validate_matrix(name, blocks[name], shape) for name, shape in shapes.items()}

    checked["R_uu"] = validate_pd("R_uu", checked["R_uu"])
    checked["Q_yy"] = validate_psd("Q_yy", checked["Q_yy"], psd_tol)
    if np.max(np.abs(checked["Q_zz"] - checked["Q_zz"].T)) > psd_tol:
        raise ValidationError("Q_zz not symmetric")

    return AugmentedLQProblem(
        partition=partition,
        beta=beta,
        **{name: _frozen(value) for name, value in checked.items()},
    )


def controllability_matrix(p: AugmentedLQProblem) -> np.ndarray:
    """[sqrt(b) B, b A B, b^(3/2) A^2 B, ...] with n_y column blocks."""
    n_y = p.partition.n_y
    columns = []
    power = np.eye(n_y)
    for i in range(n_y):
        columns.append(p.beta ** ((i + 1) / 2.0) * power @ p.B_yu)
        power = power @ p.A_yy
    return np.hstack(columns)


def check_controllability(p: AugmentedLQProblem, tol: Optional[float] = None) -> ValidationReport:
    if tol is None:
        tol = get_settings().rank_tol
    rank = numerical_rank(controllability_matrix(p), tol)
    controllable = rank == p.partition.n_y
    messages = []
    if not controllable:
        messages.append(
            f"Controllability: controllability matrix has rank {rank} < n_k + n_x = {p.partition.n_y}"
        )
    return ValidationReport(controllability_rank=rank, controllable=controllable, messages=messages)


def check_shock_stability(p: AugmentedLQProblem) -> ValidationReport:
    try:
        eigenvalues = linalg.eigvals(p.A_zz)
    except linalg.LinAlgError as e:
        return ValidationReport(
            shock_stable=False,
            messages=[f"Shock stability: eigenvalue computation of A_zz failed: {e}"],
        )
    moduli = [float(m) for m in np.abs(eigenvalues)]
    bound = 1.0 / np.sqrt(p.beta)
    stable = all(m < bound for m in moduli)
    messages = []
    if not stable:
        worst = max(moduli)
        messages.append(f"Shock stability: A_zz eigenvalue modulus {worst:.6g} >= 1/sqrt(beta) = {bound:.6g}")
    return ValidationReport(shock_eigenvalue_moduli=moduli, shock_stable=stable, messages=messages)


def validate_assumptions(p: AugmentedLQProblem, tol: Optional[float] = None) -> ValidationReport:
    report = check_controllability(p, tol).merge(check_shock_stability(p))
    for message in report.messages:
        logger.warning(f"⚠️  {message}")
    return report


def scale_by_sqrt_beta(p: AugmentedLQProblem) -> ScaledSystem:
    root = np.sqrt(p.beta)
    return ScaledSystem(A_tilde=_frozen(root * p.A), B_tilde=_frozen(root * p.B), source=p)


def scaled_problem(p: AugmentedLQProblem) -> AugmentedLQProblem:
    """The sqrt(beta)-scaled system as an undiscounted (beta = 1) problem."""
    scaled = scale_by_sqrt_beta(p)
    part = p.partition
    blocks = dict(p.blocks())
    blocks["A_yy"] = scaled.A_tilde[part.y_slice, part.y_slice]
    blocks["A_yz"] = scaled.A_tilde[part.y_slice, part.z_slice]
    blocks["A_zz"] = scaled.A_tilde[part.z_slice, part.z_slice]
    blocks["B_yu"] = scaled.B_tilde[part.y_slice, :]
    return build_problem(blocks, 1.0, part)


def build_nkpc(
    beta: float = 0.99, kappa: float = 0.1275, epsilon: float = 6.0, rho: float = 0.8
) -> AugmentedLQProblem:
    """New-Keynesian Phillips curve with an AR(1) cost-push shock.

    Inflation is the single jump variable, the output gap the instrument.
    """
    if not 0.0 < beta < 1.0:
        raise ValidationError(f"beta must lie in (0, 1), got {beta}")
    if kappa <= 0.0:
        raise ValidationError(f"kappa must be positive, got {kappa}")
    if epsilon <= 0.0:
        raise ValidationError(f"epsilon must be positive, got {epsilon}")
    if not 0.0 < rho < 1.0:
        raise ValidationError(f"rho must lie in (0, 1), got {rho}")

    blocks = {
        "A_yy": [[1.0 / beta]],
        "A_yz": [[-1.0 / beta]],
        "A_zz": [[rho]],
        "B_yu": [[-kappa / beta]],
        "Q_yy": [[1.0]],
        "Q_yz": [[0.0]],
        "Q_zz": [[0.0]],
        "R_uu": [[kappa / epsilon]],
    }
    return build_problem(blocks, beta, Partition(n_k=0, n_x=1, n_z=1, n_u=1))


class ModelSpec(BaseModel):
    """JSON model file schema; unknown fields are rejected."""

    model_config = ConfigDict(extra="forbid")

    n_k: int
    n_x: int
    n_z: int
    n_u: int
    beta: float
    A_yy: List[List[float]]
    A_yz: List[List[float]]
    A_zz: List[List[float]]
    B_yu: List[List[float]]
    Q_yy: List[List[float]]
    Q_yz: List[List[float]]
    Q_zz: List[List[float]]
    R_uu: List[List[float]]

    def to_problem(self) -> AugmentedLQProblem:
        partition = Partition(n_k=self.n_k, n_x=self.n_x, n_z=self.n_z, n_u=self.n_u)
        blocks = {name: getattr(self, name) for name in BLOCK_NAMES}
        return build_problem(blocks, self.beta, partition)

    @classmethod
    def from_problem(cls, p: AugmentedLQProblem) -> "ModelSpec":
        part = p.partition
        return cls(
            n_k=part.n_k,
            n_x=part.n_x,
            n_z=part.n_z,
            n_u=part.n_u,
            beta=p.beta,
            **{name: getattr(p, name).tolist() for name in BLOCK_NAMES},
        )
