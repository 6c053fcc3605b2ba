import itertools
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

DEFAULT_WEIGHTS = tuple(round(0.05 * k, 2) for k in range(1, 20))
FORMATS = ("csv", "json")


def split_list(value):
    if isinstance(value, str):
        return [item.strip() for item in value.split(",") if item.strip()]
    return value


def expand_values(value) -> List[float]:
    """Parse ``a,b,c`` or ``start:stop:step`` (stop inclusive within half a step)."""
    if value is None:
        return []
    if isinstance(value, (int, float)):
        return [float(value)]
    if not isinstance(value, str):
        return [float(item) for item in value]
    values: List[float] = []
    for chunk in split_list(value):
        if ":" in chunk:
            start, stop, step = (float(part) for part in chunk.split(":"))
            if step <= 0.0:
                raise ValueError(f"range step must be positive in {chunk!r}")
            count = int(np.floor((stop - start) / step + 0.5)) + 1
            values.extend(round(start + k * step, 12) for k in range(max(count, 0)))
        else:
            values.append(float(chunk))
    return values


class SolverOptions(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    newton_tol: float = Field(1e-10, gt=0.0)
    newton_max_iter: int = Field(50, gt=0)
    continuation_step: float = Field(0.25, gt=0.0)
    damping_min: float = Field(2.0 ** -20, gt=0.0, le=1.0)
    richardson: bool = True


class RunConfig(BaseModel):
    """Validated settings of one CLI invocation; unknown keys are rejected."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    command: str = "solve"
    nu: float = 0.1
    tau_plus: float = 0.6
    c0: float = 1.0 / 3.0
    j: Optional[float] = None
    delta_j: Optional[float] = None
    grid_n: int = 1000
    n_max: int = Field(500, gt=0)
    newton_tol: float = 1e-10
    newton_max_iter: int = 50
    continuation_step: float = 0.25
    damping_min: float = 2.0 ** -20
    richardson: bool = True
    weights: List[float] = list(DEFAULT_WEIGHTS)
    weight_refine: bool = False
    snapshots: List[int] = []
    formats: List[str] = list(FORMATS)
    jobs: int = Field(1, gt=0)
    out: Path = Path("results")
    dump_basis: bool = False
    case_traces: bool = False
    log_level: str = "INFO"

    @field_validator("weights", "snapshots", "formats", mode="before")
    @classmethod
    def _split(cls, value):
        return split_list(value)

    @field_validator("formats")
    @classmethod
    def _known_formats(cls, value: List[str]) -> List[str]:
        unknown = sorted(set(value) - set(FORMATS))
        if unknown:
            raise ValueError(f"unknown output formats {unknown}; choose from {list(FORMATS)}")
        return value

    @model_validator(mode="after")
    def _current(self) -> "RunConfig":
        if self.j is not None and self.delta_j is not None:
            j0 = (2.0 * self.tau_plus - 1.0) * (2.0 * self.c0 - 1.0)
            if abs(self.j - j0 - self.delta_j) > 1e-12:
                raise ValueError("give either j or delta_j, not two inconsistent values")
        return self

    def solver_options(self) -> SolverOptions:
        return SolverOptions(newton_tol=self.newton_tol, newton_max_iter=self.newton_max_iter,
                             continuation_step=self.continuation_step,
                             damping_min=self.damping_min, richardson=self.richardson)

    def raw_params(self) -> Tuple[float, float, float, Optional[float], Optional[float]]:
        return self.nu, self.tau_plus, self.c0, self.j, self.delta_j


class SweepSpec(BaseModel):
    """Cross product of parameter lists; enumeration order nu, tau_plus, c0, delta_j."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    nu: List[float] = []
    tau_plus: List[float] = [0.6]
    c0: List[float] = [1.0 / 3.0]
    delta_j: List[float] = []
    jobs: int = Field(1, gt=0)

    @field_validator("nu", "tau_plus", "c0", "delta_j", mode="before")
    @classmethod
    def _expand(cls, value):
        return expand_values(value)

    def cases(self) -> List[Tuple[float, float, float, float]]:
        return list(itertools.product(self.nu, self.tau_plus, self.c0, self.delta_j))

    @property
    def case_count(self) -> int:
        return len(self.nu) * len(self.tau_plus) * len(self.c0) * len(self.delta_j)
