from enum import Enum
from typing import List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict

from junction.models.params_models import ModelParams
from junction.models.series_models import RunStatus, SeriesRun
from junction.models.solution_models import RefSolution, SolutionClass

RELIABILITY_FLOOR = 1e-7


class Verdict(str, Enum):
    CONVERGED = "converged"
    STILL_DECREASING = "still_decreasing"
    DIVERGING = "diverging"
    UNCLEAR = "unclear"


class ErrorTrace(BaseModel):
    """Per-order errors of the partial sums against the reference solution.

    ``field_error[n-1]`` and ``slope_error[n-1]`` hold the node-wise
    |E^(n) - E_num| and |E^(n)' - E_num'|; every weighted measure is derived
    from them.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    params: ModelParams
    n_max: int
    field_error: np.ndarray
    slope_error: np.ndarray
    delta_integral: Optional[np.ndarray] = None
    n3: Optional[int] = None
    n7: Optional[int] = None
    verdict: Optional[Verdict] = None
    nu_e_max_sq: float
    delta_1: float
    class_label: Optional[SolutionClass] = None
    run_status: RunStatus = RunStatus.COMPLETED

    @property
    def orders(self) -> np.ndarray:
        return np.arange(1, self.field_error.shape[0] + 1)

    @property
    def computed(self) -> int:
        return int(self.field_error.shape[0])

    def weighted(self, w: float) -> np.ndarray:
        """Delta_n(w) for every computed order."""
        return np.max(2.0 * w * self.field_error + 2.0 * (1.0 - w) * self.slope_error, axis=1)

    @property
    def delta(self) -> np.ndarray:
        return self.weighted(0.5)

    @property
    def delta_field(self) -> np.ndarray:
        return 2.0 * np.max(self.field_error, axis=1)

    @property
    def delta_slope(self) -> np.ndarray:
        return 2.0 * np.max(self.slope_error, axis=1)

    @property
    def unreliable(self) -> np.ndarray:
        return self.delta < RELIABILITY_FLOOR


class ConditionQReport(BaseModel):
    first: int
    last: int
    holds: bool
    violations: List[int] = []


class WeightSearchResult(BaseModel):
    weights: List[float]
    monotone_weights: List[float]
    conjecture_flag: bool


class CaseOutcome(BaseModel):
    """Everything one comparison of the series against the reference produces."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    reference: RefSolution
    run: SeriesRun
    trace: ErrorTrace
    condition_q: ConditionQReport
    weights: WeightSearchResult


class Turnaround(BaseModel):
    """Order and value at which the upper envelope of Delta_n bottoms out."""

    order: int
    value: float
