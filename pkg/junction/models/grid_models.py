from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from junction.errors import DomainError, GridMismatchError


def frozen_array(value) -> np.ndarray:
    array = np.array(value, dtype=float, copy=True)
    array.setflags(write=False)
    return array


class Grid(BaseModel):
    model_config = ConfigDict(frozen=True)

    n_intervals: int = 1000

    @field_validator("n_intervals")
    @classmethod
    def _even(cls, n: int) -> int:
        if n <= 0 or n % 2:
            raise DomainError("grid_n", f"must be a positive even integer, got {n}")
        return n

    @property
    def size(self) -> int:
        return self.n_intervals + 1

    @property
    def h(self) -> float:
        return 1.0 / self.n_intervals

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.size) / self.n_intervals

    @property
    def midpoints(self) -> np.ndarray:
        return (np.arange(self.n_intervals) + 0.5) / self.n_intervals

    def refined(self) -> "Grid":
        return Grid(n_intervals=2 * self.n_intervals)


class GridFn(BaseModel):
    """Samples of a function (and optionally its derivative) at the grid nodes."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    grid: Grid
    values: np.ndarray
    derivative: Optional[np.ndarray] = None

    @field_validator("values", "derivative", mode="before")
    @classmethod
    def _freeze(cls, value):
        return None if value is None else frozen_array(value)

    @model_validator(mode="after")
    def _lengths(self) -> "GridFn":
        if self.values.shape != (self.grid.size,):
            raise GridMismatchError(f"expected {self.grid.size} samples, got {self.values.shape}")
        if self.derivative is not None and self.derivative.shape != self.values.shape:
            raise GridMismatchError("derivative samples do not match the value samples")
        return self

    @classmethod
    def zeros(cls, grid: Grid, with_derivative: bool = True) -> "GridFn":
        zero = np.zeros(grid.size)
        return cls(grid=grid, values=zero, derivative=zero if with_derivative else None)

    def scaled(self, factor: float) -> "GridFn":
        derivative = None if self.derivative is None else factor * self.derivative
        return GridFn(grid=self.grid, values=factor * self.values, derivative=derivative)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))


def require_same_grid(*grids: Grid) -> Grid:
    first = grids[0]
    for other in grids[1:]:
        if other != first:
            raise GridMismatchError(
                f"grid mismatch: {first.n_intervals} vs {other.n_intervals} intervals")
    return first
