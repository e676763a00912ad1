"""
core/pipeline.py
Runs the full solve: validate -> full Riccati -> block cross-check -> gain -> welfare.
"""
from dataclasses import dataclass
from typing import Optional

import logging

from core.config import SolverSettings, get_settings
from core.errors import AssumptionError, ConvergenceError, SingularMatrixError
from solvers import blocks, riccati
from solvers.model import AugmentedLQProblem, ValidationReport, validate_assumptions
from solvers.riccati import FeedbackGain, MirrorReport, RiccatiSolution
from solvers.welfare import WelfareReport, welfare_report
from utils.linalg import max_abs

logger = logging.getLogger(__name__)

METHODS = ("full", "blocks", "scaled")


@dataclass(frozen=True)
class PipelineResult:
    problem: AugmentedLQProblem
    validation: ValidationReport
    solution: RiccatiSolution
    cross_check: RiccatiSolution
    cross_check_gap: float
    gain: FeedbackGain
    welfare: WelfareReport
    method: str
    mirror: Optional[MirrorReport] = None


class RamseyPipeline:
    def __init__(self, method: str = "full", settings: Optional[SolverSettings] = None):
        if method not in METHODS:
            raise ValueError(f"Unknown method {method!r}; expected one of {', '.join(METHODS)}")
        self.method = method
        self.settings = settings or get_settings()

    def check_assumptions(self, problem: AugmentedLQProblem) -> ValidationReport:
        report = validate_assumptions(problem, self.settings.rank_tol)
        if not report.controllable:
            raise AssumptionError("Controllability assumption", "; ".join(report.messages))
        if not report.shock_stable:
            raise AssumptionError("Shock stability assumption", "; ".join(report.messages))
        return report

    def _solve(self, problem: AugmentedLQProblem, method: str) -> RiccatiSolution:
        tol, max_iter = self.settings.riccati_tol, self.settings.max_iter
        if method == "blocks":
            return blocks.assemble(problem, tol, max_iter)
        if method == "scaled":
            return riccati.solve_scaled_riccati(problem, tol, max_iter)
        return riccati.solve_full_riccati(problem, tol, max_iter, self.settings.damping)

    def solve(self, problem: AugmentedLQProblem):
        """Primary solution plus the independent cross-check solution."""
        solution = self._solve(problem, self.method)
        riccati.require_converged(solution)
        cross_method = "full" if self.method == "blocks" else "blocks"
        cross_check = self._solve(problem, cross_method)
        riccati.require_converged(cross_check)
        gap = max_abs(solution.P - cross_check.P)
        logger.info(f"🔍 {self.method} vs {cross_method} max-abs gap {gap:.3e}")
        return solution, cross_check, gap

    def mirror_roots(self, problem: AugmentedLQProblem) -> Optional[MirrorReport]:
        try:
            return riccati.pencil_mirror_check(
                riccati.build_pencil(problem), problem.beta, self.settings.mirror_tol
            )
        except SingularMatrixError as e:
            logger.warning(f"⚠️  Mirror-root check skipped: {e}")
            return None

    def run(self, problem: AugmentedLQProblem, k0=None, z0=None) -> PipelineResult:
        logger.info(f"🚀 Solving Ramsey problem (n_y={problem.partition.n_y}, n_z={problem.partition.n_z}, beta={problem.beta})")
        validation = self.check_assumptions(problem)
        try:
            solution, cross_check, gap = self.solve(problem)
        except ConvergenceError:
            logger.error("❌ Riccati solver did not converge")
            raise
        gain = riccati.compute_gain(problem, solution)
        report = welfare_report(solution.P, problem.partition, k0, z0)
        mirror = self.mirror_roots(problem)
        logger.info(f"✅ Pipeline complete: welfare {report.welfare:.10g}")
        return PipelineResult(
            problem=problem,
            validation=validation,
            solution=solution,
            cross_check=cross_check,
            cross_check_gap=gap,
            gain=gain,
            welfare=report,
            method=self.method,
            mirror=mirror,
        )
