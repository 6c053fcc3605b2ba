import logging
from pathlib import Path
from typing import Optional

from junction.models.analysis_models import CaseOutcome
from junction.models.config_models import RunConfig
from junction.models.grid_models import Grid
from junction.models.params_models import ModelParams
from junction.models.series_models import SeriesRun
from junction.models.solution_models import RefSolution
from junction.services import airy_service, analysis_service, series_service
from junction.services.io_service import ArtifactWriter
from junction.services.model_service import validate_params
from junction.services.reference_service import ReferenceSolver

logger = logging.getLogger(__name__)


def params_from_config(config: RunConfig) -> ModelParams:
    """Model constants from a run config; a missing current means the Planck case."""
    nu, tau_plus, c0, j, delta_j = config.raw_params()
    if j is not None and delta_j is not None:
        j = None
    if j is None and delta_j is None:
        delta_j = 0.0
    return validate_params(nu=nu, tau_plus=tau_plus, c0=c0, j=j, delta_j=delta_j)


class CaseService:
    """Runs one parameter case end to end: reference, series and analyses."""

    def __init__(self, config: RunConfig, writer: Optional[ArtifactWriter] = None):
        """
        Initialize the case runner

        Args:
            config: Grid, order, solver and weight settings
            writer: When given, each artifact is written as soon as it exists
        """
        self.config = config
        self.writer = writer
        self.grid = Grid(n_intervals=config.grid_n)
        self.solver = ReferenceSolver(config.solver_options(), self.grid)

    def _write_series(self, run: SeriesRun, reference: RefSolution) -> None:
        self.writer.write_series(run)
        for n in self.config.snapshots:
            if 1 <= n <= run.order:
                self.writer.write_snapshot(run, n, reference.solution)
            else:
                logger.warning("snapshot order %d outside the computed range 1..%d", n, run.order)

    def run(self, p: ModelParams, basis_dump: Optional[Path] = None) -> CaseOutcome:
        """
        Reference solve, series run and every analysis of one parameter case

        Args:
            p: Validated model constants
            basis_dump: Optional CSV path for the Airy basis

        Returns:
            The reference, the series run and the analyses built on them
        """
        config = self.config
        reference = self.solver.solve(p)
        if self.writer is not None:
            self.writer.write_solution(reference.solution, "reference.csv")
        basis = airy_service.build_basis(p, self.grid)
        if basis_dump is not None:
            airy_service.dump_basis(basis, basis_dump)
        run = series_service.run_series(p, config.n_max, basis)
        trace = analysis_service.error_trace(run, reference)
        report = analysis_service.condition_q(trace)
        weights = analysis_service.weight_search(trace, config.weights, config.weight_refine)
        if self.writer is not None:
            self._write_series(run, reference)
            self.writer.write_trace(trace)
            self.writer.write_json(analysis_service.case_report(trace, report, weights),
                                   "report.json")
        logger.info("case %s done: apparently %s, condition Q %s, monotone weights %s",
                    p.describe(), trace.verdict.value, "holds" if report.holds else "fails",
                    weights.monotone_weights)
        return CaseOutcome(reference=reference, run=run, trace=trace, condition_q=report,
                           weights=weights)
