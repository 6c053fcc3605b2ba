from typing import NamedTuple

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from junction.models.grid_models import Grid, GridFn, frozen_array
from junction.models.params_models import ModelParams


class AiryValue(NamedTuple):
    log_abs: float
    sign: float

    @property
    def value(self) -> float:
        return self.sign * float(np.exp(self.log_abs))


class AiryQuadruple(NamedTuple):
    ai: AiryValue
    bi: AiryValue
    aip: AiryValue
    bip: AiryValue


class AiryBasis(BaseModel):
    """Homogeneous solutions A(x) = Ai(s(x)), B(x) = Bi(s(x)) on a grid.

    Values are kept as exponentially scaled mantissas: the true values are
    ``ai * exp(-zeta)``, ``aip * k * exp(-zeta)``, ``bi * exp(zeta)`` and
    ``bip * k * exp(zeta)`` with zeta = (2/3) s^(3/2) and k = ds/dx. The same
    quantities are stored at the interval midpoints for the quadrature.
    """

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    params: ModelParams
    grid: Grid
    slope: float
    wronskian: float
    s: np.ndarray
    zeta: np.ndarray
    ai: np.ndarray
    aip: np.ndarray
    bi: np.ndarray
    bip: np.ndarray
    s_mid: np.ndarray
    zeta_mid: np.ndarray
    ai_mid: np.ndarray
    bi_mid: np.ndarray

    @field_validator("s", "zeta", "ai", "aip", "bi", "bip", "s_mid", "zeta_mid", "ai_mid",
                     "bi_mid", mode="before")
    @classmethod
    def _freeze(cls, value):
        return frozen_array(value)

    @property
    def log_ai(self) -> np.ndarray:
        return np.log(self.ai) - self.zeta

    @property
    def log_bi(self) -> np.ndarray:
        return np.log(self.bi) + self.zeta

    @property
    def log_abs_aip(self) -> np.ndarray:
        return np.log(np.abs(self.aip) * self.slope) - self.zeta

    @property
    def log_bip(self) -> np.ndarray:
        return np.log(self.bip * self.slope) + self.zeta

    def wronskian_error(self) -> np.ndarray:
        """Relative deviation of A B' - B A' from W at every node."""
        w = self.slope * (self.ai * self.bip - self.bi * self.aip)
        return np.abs(w - self.wronskian) / self.wronskian


class AirySolveResult(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    F: GridFn
    G: GridFn
    d_A: float
    d_B: float
    residual_norm: float

    def as_field(self) -> GridFn:
        return GridFn(grid=self.F.grid, values=self.F.values, derivative=self.G.values)
