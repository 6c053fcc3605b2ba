from enum import Enum
from typing import List

import numpy as np
from pydantic import BaseModel, ConfigDict

from junction.models.grid_models import Grid, GridFn
from junction.models.params_models import ModelParams


class RunStatus(str, Enum):
    COMPLETED = "n_max_reached"
    OVERFLOW = "overflow"


class SeriesTerm(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    order: int
    E: GridFn
    R: GridFn
    u_left: float = 0.0
    u_right: float = 0.0
    max_abs: float


class SeriesRun(BaseModel):
    """Terms E_n of the field expansion and their running partial sums.

    Row n-1 of ``partial_E``/``partial_dE`` holds E^(n) and its derivative;
    row k of ``u_table`` holds U_k (rows 0 and 1 stay zero).
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    params: ModelParams
    grid: Grid
    n_max: int
    terms: List[SeriesTerm]
    partial_E: np.ndarray
    partial_dE: np.ndarray
    u_table: np.ndarray
    status: RunStatus

    @property
    def order(self) -> int:
        return len(self.terms)

    def term_matrix(self) -> np.ndarray:
        return np.array([term.E.values for term in self.terms])

    def term_slope_matrix(self) -> np.ndarray:
        return np.array([term.E.derivative for term in self.terms])

    def partial_sum(self, n: int) -> GridFn:
        if not 1 <= n <= self.order:
            raise IndexError(f"order {n} not computed (run holds 1..{self.order})")
        return GridFn(grid=self.grid, values=self.partial_E[n - 1],
                      derivative=self.partial_dE[n - 1])
