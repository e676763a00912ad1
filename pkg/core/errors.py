"""
core/errors.py
Exception hierarchy and the CLI exit-code contract.
"""
from utils.validators import ValidationError

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INVALID_INPUT = 2
EXIT_NOT_CONVERGED = 3
EXIT_ASSUMPTION = 4


class RamseyError(Exception):
    pass


class SolverError(RamseyError):
    pass


class SingularMatrixError(SolverError):
    pass


class ConvergenceError(SolverError):
    def __init__(self, message: str, iterations: int = 0, last_update: float = float("nan")):
        super().__init__(message)
        self.iterations = iterations
        self.last_update = last_update


class AssumptionError(RamseyError):
    def __init__(self, assumption: str, message: str):
        super().__init__(f"{assumption} violated: {message}")
        self.assumption = assumption


class SimulationError(RamseyError):
    def __init__(self, message: str, index: int):
        super().__init__(message)
        self.index = index


def exit_code_for(error: Exception) -> int:
    if isinstance(error, ValidationError):
        return EXIT_INVALID_INPUT
    if isinstance(error, AssumptionError):
        return EXIT_ASSUMPTION
    if isinstance(error, (SolverError, SimulationError)):
        # singular inner matrices and non-finite closed-loop states mean no stabilizing solution
        return EXIT_NOT_CONVERGED
    return EXIT_CHECK_FAILED
