import argparse
import logging

from junction.models.grid_models import Grid
from junction.routes.base import CommandRouter, load_config
from junction.services.case_service import params_from_config
from junction.services.io_service import ArtifactWriter, solution_header
from junction.services.model_service import check_solution
from junction.services.reference_service import ReferenceSolver

logger = logging.getLogger(__name__)

router = CommandRouter()


@router.command("solve", help="reference solution of one parameter case")
def solve_command(args: argparse.Namespace) -> int:
    config = load_config(args, "solve")
    p = params_from_config(config)
    reference = ReferenceSolver(config.solver_options(), Grid(n_intervals=config.grid_n)).solve(p)
    solution = reference.solution
    writer = ArtifactWriter(config.out, config.formats)
    writer.write_solution(solution)
    writer.write_json({
        **solution_header(solution),
        "newton_iterations": reference.newton_iterations,
        "final_residual_norm": reference.final_residual_norm,
        "continuation_steps": reference.continuation_steps,
        "richardson": reference.richardson,
        "extrapolation_drift": reference.extrapolation_drift,
        "warnings": check_solution(solution),
    }, "solution.json")
    print(f"class {solution.class_label.value}")
    print(f"phi_plus {solution.phi_plus:.17g}")
    print(f"phi_minus {solution.phi_minus:.17g}")
    print(f"nu_e_max_sq {solution.nu_e_max_sq:.17g}")
    return 0
