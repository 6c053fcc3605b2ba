import argparse
import logging

from junction.routes.base import CommandRouter, argument, load_config
from junction.services.case_service import CaseService, params_from_config
from junction.services.io_service import ArtifactWriter

logger = logging.getLogger(__name__)

router = CommandRouter()


@router.command(
    "series",
    help="series against reference: error trace, verdict, condition Q, weight search",
    arguments=[
        argument("--dump-basis", dest="dump_basis", action="store_true", default=None,
                 help="write the Airy basis to basis.csv"),
    ],
)
def series_command(args: argparse.Namespace) -> int:
    config = load_config(args, "series")
    p = params_from_config(config)
    writer = ArtifactWriter(config.out, config.formats)
    basis_dump = None
    if config.dump_basis:
        config.out.mkdir(parents=True, exist_ok=True)
        basis_dump = config.out / "basis.csv"
    outcome = CaseService(config, writer).run(p, basis_dump=basis_dump)
    trace = outcome.trace
    label = "-" if trace.class_label is None else trace.class_label.value
    print(f"class {label}  nu_e_max_sq {trace.nu_e_max_sq:.6g}  delta_1 {trace.delta_1:.6g}")
    print(f"n3 {trace.n3}  n7 {trace.n7}  apparently {trace.verdict.value}")
    print(f"condition Q {'holds' if outcome.condition_q.holds else 'fails'}"
          f" over {outcome.condition_q.first}..{outcome.condition_q.last}"
          f"  violations {outcome.condition_q.violations}")
    print(f"monotone weights {outcome.weights.monotone_weights}")
    return 0
