import math

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from junction.errors import DomainError

EPS = float(np.finfo(float).eps)


def _require_finite(**values: float) -> None:
    for name, value in values.items():
        if not math.isfinite(value):
            raise DomainError(name, f"must be finite, got {value!r}")


class ModelParams(BaseModel):
    """Dimensionless constants of the two-ion junction.

    The boundary concentrations are normalised so that c0 + c1 = 1. Instances
    built directly only carry the structural checks; user input goes through
    ``model_service.validate_params`` which also enforces c0 < c1. Mirrored
    data (c0 > c1) exists only as the output of a reflection.
    """

    model_config = ConfigDict(frozen=True)

    nu: float
    tau_plus: float
    c0: float
    c1: float
    j: float

    @model_validator(mode="before")
    @classmethod
    def _complement(cls, data):
        if isinstance(data, dict) and data.get("c1") is None and "c0" in data:
            data = {**data, "c1": 1.0 - float(data["c0"])}
        return data

    @model_validator(mode="after")
    def _structural_checks(self) -> "ModelParams":
        _require_finite(nu=self.nu, tau_plus=self.tau_plus, c0=self.c0, j=self.j)
        if self.nu <= 0.0:
            raise DomainError("nu", f"must be positive, got {self.nu}")
        if not 0.0 < self.tau_plus < 1.0:
            raise DomainError("tau_plus", f"must lie in (0, 1), got {self.tau_plus}")
        if not 0.0 < self.c0 < 1.0 or self.c0 == 0.5:
            raise DomainError("c0", f"must lie in (0, 1) and differ from 1/2, got {self.c0}")
        if abs(self.c0 + self.c1 - 1.0) > 4.0 * EPS:
            raise DomainError("c1", f"must equal 1 - c0, got c0={self.c0}, c1={self.c1}")
        return self

    @classmethod
    def from_delta_j(cls, nu: float, tau_plus: float, c0: float, delta_j: float) -> "ModelParams":
        j0 = (tau_plus - (1.0 - tau_plus)) * (c0 - (1.0 - c0))
        return cls(nu=nu, tau_plus=tau_plus, c0=c0, j=j0 + delta_j)

    @property
    def tau_minus(self) -> float:
        return 1.0 - self.tau_plus

    @property
    def j0(self) -> float:
        return (self.tau_plus - self.tau_minus) * (self.c0 - self.c1)

    @property
    def delta_j(self) -> float:
        return self.j - self.j0

    @property
    def mirrored(self) -> bool:
        return self.c0 > self.c1

    def describe(self) -> str:
        return (f"nu={self.nu:g} tau_plus={self.tau_plus:g} c0={self.c0:.6g} "
                f"delta_j={self.delta_j:+.6g}")


class DimensionalParams(BaseModel):
    """Physical junction data in Gaussian (cgs) units.

    delta [cm], kT [erg], diffusion coefficients [cm^2/s], concentrations
    [1/cm^3], current density [statA/cm^2]; z and permittivity are pure numbers.
    """

    model_config = ConfigDict(frozen=True)

    delta: float
    z: float
    kT: float
    D_plus: float
    D_minus: float
    permittivity: float
    c0_hat: float
    c1_hat: float
    current: float

    @model_validator(mode="after")
    def _positive(self) -> "DimensionalParams":
        _require_finite(**self.model_dump())
        for name in ("delta", "z", "kT", "D_plus", "D_minus", "permittivity", "c0_hat", "c1_hat"):
            if getattr(self, name) <= 0.0:
                raise DomainError(name, f"must be positive, got {getattr(self, name)}")
        if self.c0_hat >= self.c1_hat:
            raise DomainError("c0_hat", "the left concentration must be below the right one")
        return self

    @property
    def c_ref(self) -> float:
        return self.c0_hat + self.c1_hat
