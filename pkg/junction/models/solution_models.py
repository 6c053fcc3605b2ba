from enum import Enum
from typing import Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

from junction.models.grid_models import Grid, GridFn
from junction.models.params_models import ModelParams


class SolutionClass(str, Enum):
    A = "A"
    B = "B"
    C = "C"


class FieldSolution(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    params: ModelParams
    E: GridFn
    c_plus: GridFn
    c_minus: GridFn
    phi_plus: float
    phi_minus: float
    class_label: Optional[SolutionClass] = None
    warnings: Tuple[str, ...] = ()

    @property
    def grid(self) -> Grid:
        return self.E.grid

    @property
    def x(self) -> np.ndarray:
        return self.E.grid.nodes

    @property
    def field(self) -> np.ndarray:
        return self.E.values

    @property
    def slope(self) -> np.ndarray:
        return self.E.derivative

    @property
    def e_max(self) -> float:
        return float(np.max(np.abs(self.E.values)))

    @property
    def nu_e_max_sq(self) -> float:
        return self.params.nu * self.e_max ** 2

    @property
    def current(self) -> float:
        return self.params.tau_plus * self.phi_plus - self.params.tau_minus * self.phi_minus


class RefSolution(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    solution: FieldSolution
    newton_iterations: int
    final_residual_norm: float
    continuation_steps: int = 0
    richardson: bool = False
    extrapolation_drift: float = 0.0
