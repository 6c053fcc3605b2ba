import argparse
import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, Iterable, Tuple

from junction.errors import JunctionError
from junction.models.config_models import RunConfig
from junction.routes.base import CommandRouter, argument, overrides
from junction.services import config_service
from junction.services.analysis_service import breakdown_brackets, case_report
from junction.services.case_service import CaseService
from junction.services.io_service import ArtifactWriter, JsonLinesCollector
from junction.services.model_service import validate_params

logger = logging.getLogger(__name__)

router = CommandRouter()

Case = Tuple[float, float, float, float]


def case_name(case: Case) -> str:
    nu, tau_plus, c0, delta_j = case
    return f"nu{nu:g}_tau{tau_plus:g}_c{c0:.6g}_dj{delta_j:+g}"


def sweep_case(payload: Tuple[Case, RunConfig]) -> Dict:
    """One sweep case; failures become part of the result row."""
    case, config = payload
    nu, tau_plus, c0, delta_j = case
    row: Dict = {"nu": nu, "tau_plus": tau_plus, "c0": c0, "delta_j": delta_j}
    try:
        p = validate_params(nu=nu, tau_plus=tau_plus, c0=c0, delta_j=delta_j)
        writer = None
        if config.case_traces:
            writer = ArtifactWriter(config.out / "cases" / case_name(case), config.formats)
        outcome = CaseService(config, writer).run(p)
        report = case_report(outcome.trace, outcome.condition_q, outcome.weights)
        report.pop("params")
        row.update(report)
    except JunctionError as exc:
        logger.error("sweep case %s failed: %s", case_name(case), exc)
        row.update({"verdict": None, "error": str(exc), "error_type": type(exc).__name__})
    return row


def run_cases(cases: Iterable[Case], config: RunConfig, jobs: int) -> Iterable[Dict]:
    payloads = [(case, config) for case in cases]
    if jobs > 1 and len(payloads) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            # map keeps the enumeration order
            yield from pool.map(sweep_case, payloads)
    else:
        for payload in payloads:
            yield sweep_case(payload)


@router.command(
    "sweep",
    help="cross product of parameter lists, one JSON line per case",
    arguments=[
        argument("--case-traces", dest="case_traces", action="store_true", default=None,
                 help="also write per-case artifacts under cases/"),
    ],
)
def sweep_command(args: argparse.Namespace) -> int:
    file_values = config_service.read_config_file(args.config)
    config, spec = config_service.build_sweep(file_values, overrides(args))
    print(f"sweep: {spec.case_count} cases")
    logger.info("sweep over %d cases with %d jobs", spec.case_count, spec.jobs)
    collector = JsonLinesCollector(config.out / "sweep.jsonl")
    rows = []
    for row in run_cases(spec.cases(), config, spec.jobs):
        collector.append(row)
        rows.append(row)
        logger.info("case %d/%d done", collector.count, spec.case_count)
    failed = sum(1 for row in rows if "error" in row)
    brackets = breakdown_brackets(rows)
    ArtifactWriter(config.out, config.formats).write_json(
        {"cases": spec.case_count, "failed": failed, "apparent": True, "brackets": brackets},
        "sweep_summary.json")
    for bracket in brackets:
        print(f"nu={bracket['nu']:g} tau_plus={bracket['tau_plus']:g} c0={bracket['c0']:.6g} "
              f"side {bracket['side']}: "
              f"breakdown between {bracket['lower']} and {bracket['upper']}")
    if failed:
        print(f"{failed} of {spec.case_count} cases failed")
        return 1
    return 0
