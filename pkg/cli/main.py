"""
cli/main.py
Command-line front end: solve, simulate, verify and example commands.
"""
import argparse
import json
import os
import sys
from typing import Any, Dict, List, Optional

import logging

# Setup paths
CURRENT_DIR = os.path.dirname(os.path.abspath(__file__))
ROOT_DIR = os.path.dirname(CURRENT_DIR)
sys.path.insert(0, ROOT_DIR)

from pydantic import ValidationError as PydanticValidationError

from core.config import get_settings
from core.errors import EXIT_CHECK_FAILED, EXIT_OK, RamseyError, exit_code_for
from core.pipeline import METHODS, RamseyPipeline
from core.quality_gates import CertificateSuite
from core.report import build_simulation_summary, build_solve_report
from solvers import simulate
from solvers.model import AugmentedLQProblem, ModelSpec, build_nkpc
from utils.logger import setup_logging
from utils.validators import ValidationError, validate_vector

logger = logging.getLogger("cli")

NKPC_DEFAULTS = {"beta": 0.99, "kappa": 0.1275, "epsilon": 6.0, "rho": 0.8}
EXAMPLES = {"nkpc"}


def load_model(path: str) -> AugmentedLQProblem:
    """Parse and validate a model file ('-' reads standard input)."""
    try:
        if path == "-":
            text = sys.stdin.read()
        else:
            with open(path, "r") as f:
                text = f.read()
    except OSError as e:
        raise ValidationError(f"Cannot read model file {path}: {e}")

    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ValidationError(f"Malformed JSON in {path} at line {e.lineno}, column {e.colno}: {e.msg}")

    try:
        spec = ModelSpec.model_validate(data)
    except PydanticValidationError as e:
        raise ValidationError(f"Model file {path} does not match the schema: {e}")
    return spec.to_problem()


def parse_initial(raw: Optional[str]) -> Any:
    """Scalars for scalar blocks, JSON arrays for vector blocks."""
    if raw is None:
        return None
    try:
        return json.loads(raw)
    except json.JSONDecodeError:
        raise ValidationError(f"Initial condition {raw!r} is neither a number nor a JSON array")


def initial_conditions(problem: AugmentedLQProblem, args: argparse.Namespace):
    part = problem.partition
    k0 = validate_vector("k0", parse_initial(args.k0), part.n_k)
    z0_raw = parse_initial(args.z0)
    # unit shock impulse when no z0 is given
    z0 = validate_vector("z0", [1.0] * part.n_z if z0_raw is None else z0_raw, part.n_z)
    return k0, z0


def write_json(payload: Dict[str, Any], out_path: Optional[str]) -> None:
    text = json.dumps(payload, indent=2)
    if out_path:
        with open(out_path, "w") as f:
            f.write(text + "\n")
        logger.info(f"📄 Report written to {out_path}")
    else:
        sys.stdout.write(text + "\n")


def cmd_solve(args: argparse.Namespace) -> int:
    problem = load_model(args.model)
    k0, z0 = initial_conditions(problem, args)
    result = RamseyPipeline(method=args.method).run(problem, k0, z0)
    write_json(build_solve_report(result, k0, z0).model_dump(), args.out)
    return EXIT_OK


def cmd_simulate(args: argparse.Namespace) -> int:
    problem = load_model(args.model)
    k0, z0 = initial_conditions(problem, args)
    periods = get_settings().horizon if args.periods is None else args.periods
    result = RamseyPipeline().run(problem, k0, z0)

    traj = simulate.anchored_trajectory(problem, result.solution, result.gain, k0, z0, periods)
    frame = traj.to_frame(problem.partition.n_k)
    frame.to_csv(args.csv, index=False, float_format="%.17g")
    logger.info(f"📈 Trajectory with {periods + 1} rows written to {args.csv}")

    oracle = simulate.oracle_welfare(problem, result.solution, result.gain, k0, z0, periods)
    write_json(build_simulation_summary(oracle, periods, args.csv).model_dump(), None)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    problem = load_model(args.model)
    part = problem.partition
    k0 = validate_vector("k0", parse_initial(args.k0), part.n_k) if args.k0 else None
    z0 = validate_vector("z0", parse_initial(args.z0), part.n_z) if args.z0 else None
    report = CertificateSuite().run(problem, k0, z0)
    write_json(report, args.out)
    return EXIT_OK if report["passed"] else EXIT_CHECK_FAILED


def cmd_example(args: argparse.Namespace) -> int:
    if args.name not in EXAMPLES:
        raise ValidationError(f"Unknown example {args.name!r}; available: {', '.join(sorted(EXAMPLES))}")
    params = {key: getattr(args, key) if getattr(args, key) is not None else value for key, value in NKPC_DEFAULTS.items()}
    problem = build_nkpc(**params)
    write_json(ModelSpec.from_problem(problem).model_dump(), args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ramsey-welfare",
        description="Optimal rule, initial anchor and welfare of Ramsey policy in discounted LQ problems",
    )
    parser.add_argument("--log-level", default=None, help="Logging level (default from RAMSEY_LOG_LEVEL)")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_initial(p: argparse.ArgumentParser) -> None:
        p.add_argument("--k0", default=None, help="Initial predetermined state: number or JSON array")
        p.add_argument("--z0", default=None, help="Initial shock: number or JSON array")

    solve = sub.add_parser("solve", help="Solve a model and write the JSON report")
    solve.add_argument("model", help="Model JSON file ('-' for stdin)")
    add_initial(solve)
    solve.add_argument("--method", choices=METHODS, default="full")
    solve.add_argument("--out", default=None, help="Report path (default stdout)")
    solve.set_defaults(handler=cmd_solve)

    sim = sub.add_parser("simulate", help="Write the anchored closed-loop impulse response as CSV")
    sim.add_argument("model")
    add_initial(sim)
    sim.add_argument("--periods", type=int, default=None)
    sim.add_argument("--csv", required=True, help="Trajectory CSV path")
    sim.set_defaults(handler=cmd_simulate)

    verify = sub.add_parser("verify", help="Run the certificate suite")
    verify.add_argument("model")
    add_initial(verify)
    verify.add_argument("--out", default=None)
    verify.set_defaults(handler=cmd_verify)

    example = sub.add_parser("example", help="Emit a built-in example model")
    example.add_argument("name")
    for key in NKPC_DEFAULTS:
        example.add_argument(f"--{key}", type=float, default=None)
    example.add_argument("--out", default=None)
    example.set_defaults(handler=cmd_example)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        setup_logging(args.log_level or get_settings().log_level)
        return args.handler(args)
    except (RamseyError, ValidationError) as e:
        code = exit_code_for(e)
        logger.error(f"❌ {e}")
        sys.stderr.write(f"error: {e}\n")
        return code


if __name__ == "__main__":
    sys.exit(main())
