"""Dimensionless junction model: parameters, exact solutions, reconstruction."""
import logging
import math
from typing import List, Optional

import numpy as np

from junction.errors import ClassificationError, DomainError, PreconditionError
from junction.models.grid_models import Grid, GridFn
from junction.models.params_models import DimensionalParams, ModelParams
from junction.models.solution_models import FieldSolution, SolutionClass

logger = logging.getLogger(__name__)

TOL_ZERO = 1e-9
TOL_EXACT = 1e-14
ELEMENTARY_CHARGE_ESU = 4.803204712570263e-10


def validate_params(nu: float, tau_plus: float, c0: float, j: Optional[float] = None,
                    delta_j: Optional[float] = None) -> ModelParams:
    """
    Validate user-supplied constants

    Args:
        nu: Dimensionless Debye parameter, > 0
        tau_plus: Cation transport number in (0, 1)
        c0: Left concentration in (0, 1/2); the right one is 1 - c0
        j: Current, or None when delta_j is given
        delta_j: Current excess j - j0, or None when j is given

    Returns:
        Frozen model constants

    Raises:
        DomainError: naming the first offending argument
    """
    if (j is None) == (delta_j is None):
        raise DomainError("j", "exactly one of j and delta_j must be given")
    for name, value in (("nu", nu), ("tau_plus", tau_plus), ("c0", c0),
                        ("j", j), ("delta_j", delta_j)):
        if value is not None and not math.isfinite(value):
            raise DomainError(name, f"must be finite, got {value!r}")
    if not 0.0 < c0 < 0.5:
        raise DomainError("c0", f"must lie in (0, 1/2) so that c0 < c1 = 1 - c0, got {c0}")
    if delta_j is not None:
        return ModelParams.from_delta_j(nu=nu, tau_plus=tau_plus, c0=c0, delta_j=delta_j)
    return ModelParams(nu=nu, tau_plus=tau_plus, c0=c0, j=j)


def nondimensionalize(d: DimensionalParams) -> ModelParams:
    charge = d.z * ELEMENTARY_CHARGE_ESU
    c_ref = d.c_ref
    nu = d.permittivity * d.kT / (4.0 * math.pi * charge ** 2 * d.delta ** 2 * c_ref)
    d_sum = d.D_plus + d.D_minus
    j = d.delta * d.current / (charge * c_ref * d_sum)
    return validate_params(nu=nu, tau_plus=d.D_plus / d_sum, c0=d.c0_hat / c_ref, j=j)


def linear_profile(p: ModelParams, grid: Grid) -> np.ndarray:
    return p.c0 + (p.c1 - p.c0) * grid.nodes


def planck_solution(p: ModelParams, grid: Optional[Grid] = None) -> FieldSolution:
    """Zero-field solution, exact when j = j0."""
    if abs(p.delta_j) >= TOL_EXACT:
        raise PreconditionError(
            f"Planck's exact solution needs j = j0 = {p.j0:.17g}, got delta_j = {p.delta_j:.3e}")
    grid = grid or Grid()
    c = linear_profile(p, grid)
    return FieldSolution(params=p, E=GridFn.zeros(grid), c_plus=GridFn(grid=grid, values=c),
                         c_minus=GridFn(grid=grid, values=c), phi_plus=p.c0 - p.c1,
                         phi_minus=p.c0 - p.c1, class_label=SolutionClass.C)


def planck_approximation(p: ModelParams, grid: Optional[Grid] = None) -> FieldSolution:
    """Planck's small-nu outer solution for any current; exact at j = j0."""
    grid = grid or Grid()
    c = linear_profile(p, grid)
    phi_plus = 2.0 * p.tau_minus * (p.c0 - p.c1) + p.j
    phi_minus = 2.0 * p.tau_plus * (p.c0 - p.c1) - p.j
    E = (phi_plus - phi_minus) / (2.0 * c)
    dE = -(phi_plus - phi_minus) * (p.c1 - p.c0) / (2.0 * c ** 2)
    return FieldSolution(params=p, E=GridFn(grid=grid, values=E, derivative=dE),
                         c_plus=GridFn(grid=grid, values=c), c_minus=GridFn(grid=grid, values=c),
                         phi_plus=phi_plus, phi_minus=phi_minus)


def flux_sum(p: ModelParams, e_left: float, e_right: float) -> float:
    return 2.0 * (p.c0 - p.c1) + 0.5 * p.nu * (e_right ** 2 - e_left ** 2)


def reconstruct(E: GridFn, p: ModelParams) -> FieldSolution:
    """
    Concentrations and fluxes determined by a field and its derivative

    Args:
        E: Field with its derivative on the grid
        p: Model constants

    Returns:
        The full solution; nonpositive concentrations and a missing class are
        recorded as warnings rather than raised
    """
    if E.derivative is None:
        raise PreconditionError("reconstruction needs the field derivative")
    grid = E.grid
    x = grid.nodes
    e, de = E.values, E.derivative
    e_left, e_right = float(e[0]), float(e[-1])
    quarter_nu = 0.25 * p.nu
    base = (quarter_nu * e ** 2
            + ((p.c1 - p.c0) + quarter_nu * (e_left ** 2 - e_right ** 2)) * x
            + p.c0 - quarter_nu * e_left ** 2)
    c_plus = base + 0.5 * p.nu * de
    c_minus = base - 0.5 * p.nu * de
    total = flux_sum(p, e_left, e_right)
    warnings: List[str] = []
    if np.any(c_plus <= 0.0) or np.any(c_minus <= 0.0):
        warnings.append(f"nonpositive concentration (min c+ {c_plus.min():.3e}, "
                        f"min c- {c_minus.min():.3e})")
    solution = FieldSolution(params=p, E=E, c_plus=GridFn(grid=grid, values=c_plus),
                             c_minus=GridFn(grid=grid, values=c_minus),
                             phi_plus=p.tau_minus * total + p.j,
                             phi_minus=p.tau_plus * total - p.j)
    try:
        label = classify(solution)
    except ClassificationError as exc:
        logger.debug("reconstructed field left unclassified: %s", exc)
        label = None
        warnings.append(str(exc))
    return solution.model_copy(update={"class_label": label, "warnings": tuple(warnings)})


def classify(s: FieldSolution) -> SolutionClass:
    """Class A, B or C from the sign pattern of E and E' on the interior nodes."""
    if s.params.mirrored:
        return classify(reflect(s))
    e, de = s.field, s.slope
    if np.max(np.abs(e)) < TOL_ZERO:
        return SolutionClass.C
    e_in, de_in = e[1:-1], de[1:-1]
    if np.all(e_in > -TOL_ZERO) and np.all(de_in < TOL_ZERO):
        return SolutionClass.A
    if np.all(e_in < TOL_ZERO) and np.all(de_in > -TOL_ZERO):
        return SolutionClass.B
    raise ClassificationError(
        f"sign pattern of E, E' matches no solution class for {s.params.describe()}")


def reflect(s: FieldSolution) -> FieldSolution:
    """Apply x -> 1 - x: the solution of the problem with data (c1, c0, -j)."""
    p = s.params
    mirrored = ModelParams(nu=p.nu, tau_plus=p.tau_plus, c0=p.c1, c1=p.c0, j=-p.j)
    grid = s.grid
    return FieldSolution(
        params=mirrored,
        E=GridFn(grid=grid, values=-s.field[::-1], derivative=s.slope[::-1]),
        c_plus=GridFn(grid=grid, values=s.c_plus.values[::-1]),
        c_minus=GridFn(grid=grid, values=s.c_minus.values[::-1]),
        phi_plus=-s.phi_plus, phi_minus=-s.phi_minus,
        class_label=s.class_label, warnings=s.warnings)


def first_integral(s: FieldSolution) -> np.ndarray:
    return (s.c_plus.values + s.c_minus.values - 0.5 * s.params.nu * s.field ** 2
            + (s.phi_plus + s.phi_minus) * s.x)


def first_integral_drift(s: FieldSolution) -> float:
    values = first_integral(s)
    return float(np.max(np.abs(values - values[0])))


def sufficiency_ratio(s: FieldSolution) -> float:
    """nu * E_max^2, the a-posteriori check on the linearised field equation."""
    return s.nu_e_max_sq


def check_solution(s: FieldSolution, tol: float = 1e-8) -> List[str]:
    """Human-readable list of violated solution invariants (empty when all hold)."""
    p = s.params
    issues: List[str] = []
    drift = first_integral_drift(s)
    if drift > tol:
        issues.append(f"first integral drifts by {drift:.3e}")
    edges = (s.c_plus.values[0] - p.c0, s.c_minus.values[0] - p.c0,
             s.c_plus.values[-1] - p.c1, s.c_minus.values[-1] - p.c1)
    if max(abs(v) for v in edges) > tol:
        issues.append(f"boundary concentrations off by {max(abs(v) for v in edges):.3e}")
    if abs(s.current - p.j) > 1e-12:
        issues.append(f"current {s.current:.17g} differs from j = {p.j:.17g}")
    total = flux_sum(p, float(s.field[0]), float(s.field[-1]))
    if abs(s.phi_plus + s.phi_minus - total) > tol:
        issues.append("flux sum identity violated")
    if np.any(s.c_plus.values <= 0.0) or np.any(s.c_minus.values <= 0.0):
        issues.append("nonpositive concentration")
    if p.j > 0.0 and not s.phi_minus < 0.0:
        issues.append("j > 0 requires phi_minus < 0")
    if p.j < 0.0 and not s.phi_plus < 0.0:
        issues.append("j < 0 requires phi_plus < 0")
    if p.j == 0.0 and abs(p.delta_j) >= TOL_EXACT and not (s.phi_plus < 0.0 and s.phi_minus < 0.0):
        issues.append("j = 0 requires both fluxes negative")
    if not p.mirrored and s.class_label in (SolutionClass.A, SolutionClass.B):
        e0, e1 = float(s.field[0]), float(s.field[-1])
        ratio = p.c1 * e1 / p.c0
        bracketed = ratio > e0 > e1 if s.class_label is SolutionClass.A else ratio < e0 < e1
        if not bracketed:
            issues.append(f"class {s.class_label.value} bracketing of E(0), E(1) violated")
        if int(np.argmax(np.abs(s.field))) != 0:
            issues.append("|E| is not largest at x = 0")
    return issues
