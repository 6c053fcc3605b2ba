import math

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from junction.errors import ClassificationError, DomainError, PreconditionError
from junction.models.grid_models import Grid, GridFn
from junction.models.params_models import DimensionalParams, ModelParams
from junction.models.solution_models import FieldSolution, SolutionClass
from junction.services import model_service
from junction.services.model_service import (check_solution, classify, first_integral_drift,
                                             nondimensionalize, planck_approximation,
                                             planck_solution, reconstruct, reflect,
                                             validate_params)


@pytest.mark.parametrize("kwargs, constraint", [
    ({"nu": 0.1, "tau_plus": 1.2, "c0": 0.3, "delta_j": 0.0}, "tau_plus"),
    ({"nu": 0.0, "tau_plus": 0.6, "c0": 0.3, "delta_j": 0.0}, "nu"),
    ({"nu": -1.0, "tau_plus": 0.6, "c0": 0.3, "delta_j": 0.0}, "nu"),
    ({"nu": 0.1, "tau_plus": 0.6, "c0": 0.5, "delta_j": 0.0}, "c0"),
    ({"nu": 0.1, "tau_plus": 0.6, "c0": 0.7, "delta_j": 0.0}, "c0"),
    ({"nu": math.inf, "tau_plus": 0.6, "c0": 0.3, "delta_j": 0.0}, "nu"),
    ({"nu": 0.1, "tau_plus": 0.6, "c0": 0.3, "delta_j": math.nan}, "delta_j"),
    ({"nu": 0.1, "tau_plus": 0.6, "c0": 0.3, "j": 0.1, "delta_j": 0.0}, "j"),
    ({"nu": 0.1, "tau_plus": 0.6, "c0": 0.3}, "j"),
])
def test_validate_params_rejects_bad_input(kwargs, constraint):
    with pytest.raises(DomainError) as info:
        validate_params(**kwargs)
    assert info.value.constraint == constraint


def test_params_derived_quantities():
    p = validate_params(nu=0.1, tau_plus=0.6, c0=1.0 / 3.0, delta_j=-0.5)
    assert p.c1 == 1.0 - p.c0
    assert_allclose(p.tau_minus, 0.4)
    assert_allclose(p.j0, 0.2 * (1.0 / 3.0 - 2.0 / 3.0))
    assert_allclose(p.delta_j, -0.5, atol=1e-15)
    assert not p.mirrored


def test_params_given_by_current():
    p = validate_params(nu=0.1, tau_plus=0.6, c0=0.25, j=0.3)
    assert p.j == 0.3
    assert_allclose(p.j0 + p.delta_j, 0.3)


def test_nondimensionalize_matches_definitions():
    d = DimensionalParams(delta=1e-4, z=1.0, kT=4.1e-14, D_plus=2.0e-5, D_minus=1.0e-5,
                          permittivity=80.0, c0_hat=1e17, c1_hat=3e17, current=0.0)
    p = nondimensionalize(d)
    charge = model_service.ELEMENTARY_CHARGE_ESU
    assert_allclose(p.tau_plus, 2.0 / 3.0)
    assert_allclose(p.c0, 0.25)
    assert_allclose(p.nu, 80.0 * 4.1e-14 / (4.0 * math.pi * charge ** 2 * 1e-8 * 4e17))
    assert p.j == 0.0


def test_dimensional_params_reject_reversed_concentrations():
    with pytest.raises(DomainError):
        DimensionalParams(delta=1.0, z=1.0, kT=1.0, D_plus=1.0, D_minus=1.0, permittivity=1.0,
                          c0_hat=2.0, c1_hat=1.0, current=0.0)


def test_planck_solution_is_exact(planck_params, coarse_grid):
    s = planck_solution(planck_params, coarse_grid)
    assert s.class_label is SolutionClass.C
    assert_array_equal(s.field, 0.0)
    assert_allclose(s.c_plus.values, planck_params.c0 + (planck_params.c1 - planck_params.c0) * s.x)
    assert s.phi_plus == s.phi_minus == planck_params.c0 - planck_params.c1
    assert_allclose(s.current, planck_params.j, atol=1e-15)
    assert first_integral_drift(s) <= 1e-14
    assert check_solution(s) == []


def test_planck_solution_needs_zero_delta_j(smooth_params):
    with pytest.raises(PreconditionError):
        planck_solution(smooth_params)


def test_planck_approximation_reduces_to_exact_solution(planck_params, coarse_grid):
    approx = planck_approximation(planck_params, coarse_grid)
    exact = planck_solution(planck_params, coarse_grid)
    assert_allclose(approx.field, exact.field, atol=1e-15)
    assert_allclose(approx.phi_plus, exact.phi_plus)
    assert_allclose(approx.phi_minus, exact.phi_minus)


def test_planck_approximation_carries_the_current(smooth_params, coarse_grid):
    approx = planck_approximation(smooth_params, coarse_grid)
    assert_allclose(approx.current, smooth_params.j)
    # j < j0 gives a negative field
    assert np.all(approx.field < 0.0)


def _cosine_field(grid, amplitude):
    x = grid.nodes
    return GridFn(grid=grid, values=amplitude * np.cos(np.pi * x),
                  derivative=-amplitude * np.pi * np.sin(np.pi * x))


def test_reconstruct_zero_field_is_planck(planck_params, coarse_grid):
    s = reconstruct(GridFn.zeros(coarse_grid), planck_params)
    exact = planck_solution(planck_params, coarse_grid)
    assert_allclose(s.c_plus.values, exact.c_plus.values, atol=1e-15)
    assert_allclose(s.phi_plus, exact.phi_plus, atol=1e-15)
    assert s.class_label is SolutionClass.C


def test_reconstruct_conserves_first_integral(smooth_params, coarse_grid):
    s = reconstruct(_cosine_field(coarse_grid, 0.05), smooth_params)
    assert first_integral_drift(s) <= 1e-12
    assert_allclose(s.current, smooth_params.j, atol=1e-14)
    assert_allclose(s.c_plus.values[[0, -1]], [smooth_params.c0, smooth_params.c1], atol=1e-12)
    assert_allclose(s.c_minus.values[[0, -1]], [smooth_params.c0, smooth_params.c1], atol=1e-12)


def test_reconstruct_requires_derivative(smooth_params, coarse_grid):
    with pytest.raises(PreconditionError):
        reconstruct(GridFn.zeros(coarse_grid, with_derivative=False), smooth_params)


def test_reconstruct_flags_unclassifiable_fields(smooth_params, coarse_grid):
    s = reconstruct(_cosine_field(coarse_grid, 0.05), smooth_params)
    # cos changes sign, so no class fits
    assert s.class_label is None
    assert s.warnings


def _solution(p, grid, values, slope):
    zero = np.zeros(grid.size)
    return FieldSolution(params=p, E=GridFn(grid=grid, values=values, derivative=slope),
                         c_plus=GridFn(grid=grid, values=zero + 0.5),
                         c_minus=GridFn(grid=grid, values=zero + 0.5),
                         phi_plus=0.0, phi_minus=0.0)


def test_classify_sign_patterns(smooth_params, coarse_grid):
    x = coarse_grid.nodes
    a = _solution(smooth_params, coarse_grid, np.exp(-x), -np.exp(-x))
    b = _solution(smooth_params, coarse_grid, -np.exp(-x), np.exp(-x))
    c = _solution(smooth_params, coarse_grid, np.zeros_like(x), np.zeros_like(x))
    assert classify(a) is SolutionClass.A
    assert classify(b) is SolutionClass.B
    assert classify(c) is SolutionClass.C
    with pytest.raises(ClassificationError):
        classify(_solution(smooth_params, coarse_grid, x - 0.5, np.ones_like(x)))


def test_reflection_is_an_exact_involution(smooth_params, coarse_grid):
    s = reconstruct(_cosine_field(coarse_grid, 0.05), smooth_params)
    twice = reflect(reflect(s))
    assert twice.params == s.params
    assert_array_equal(twice.field, s.field)
    assert_array_equal(twice.slope, s.slope)
    assert_array_equal(twice.c_plus.values, s.c_plus.values)
    assert twice.phi_plus == s.phi_plus and twice.phi_minus == s.phi_minus


def test_reflection_mirrors_data(smooth_params, coarse_grid):
    x = coarse_grid.nodes
    s = _solution(smooth_params, coarse_grid, -np.exp(-x), np.exp(-x))
    mirrored = reflect(s)
    assert mirrored.params.c0 == smooth_params.c1
    assert mirrored.params.c1 == smooth_params.c0
    assert mirrored.params.j == -smooth_params.j
    assert mirrored.params.mirrored
    assert np.all(mirrored.field > 0.0)
    # classification of mirrored data refers back to the original orientation
    assert classify(mirrored) is SolutionClass.B


def test_mirrored_params_are_structurally_valid():
    p = ModelParams(nu=1.0, tau_plus=0.6, c0=0.7, j=0.1)
    assert p.mirrored
    with pytest.raises(DomainError):
        ModelParams(nu=1.0, tau_plus=0.6, c0=0.7, c1=0.4, j=0.1)


def test_grid_rejects_odd_interval_counts():
    with pytest.raises(DomainError):
        Grid(n_intervals=999)
    assert Grid().size == 1001
