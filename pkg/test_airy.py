import numpy as np
import pandas as pd
import pytest
from numpy.testing import assert_allclose

from junction.errors import DomainError, GridMismatchError
from junction.models.grid_models import Grid, GridFn
from junction.models.params_models import ModelParams
from junction.services.airy_service import (build_basis, dump_basis, eval_airy, ode_residual,
                                            solve_linear_bvp, solve_linear_bvp_oracle)
from junction.services.model_service import validate_params


ORACLE_TOL = 1e-5
CUBIC = (1.0, -3.0, 0.0, 2.0)


def _params(nu, c0=1.0 / 3.0):
    return validate_params(nu=nu, tau_plus=0.6, c0=c0, delta_j=0.0)


def _polynomial(grid, coefficients):
    return GridFn(grid=grid, values=np.polynomial.polynomial.polyval(grid.nodes, coefficients))


def _oracle_gap(R, p, basis):
    airy = solve_linear_bvp(R, basis)
    return float(np.max(np.abs(airy.F.values - solve_linear_bvp_oracle(R, p).F.values)))


def _random_smooth(grid, rng, modes=4):
    x = grid.nodes
    coefficients = rng.uniform(-1.0, 1.0, size=modes)
    values = sum(c * np.cos(np.pi * k * x + 0.3 * k) for k, c in enumerate(coefficients))
    return GridFn(grid=grid, values=values)


def _oracle_extrapolated(R_values, p, grid):
    """Finite-difference oracle on h and h/2 combined to cancel the h^2 error."""
    coarse = solve_linear_bvp_oracle(GridFn(grid=grid, values=R_values(grid)), p).F.values
    fine_grid = grid.refined()
    fine = solve_linear_bvp_oracle(GridFn(grid=fine_grid, values=R_values(fine_grid)), p).F.values
    return (4.0 * fine[::2] - coarse) / 3.0


def test_airy_values_at_zero():
    q = eval_airy(0.0)
    assert_allclose(q.ai.value, 0.355028053887817, rtol=1e-14)
    assert_allclose(q.bi.value, 0.614926627446001, rtol=1e-14)
    assert_allclose(q.aip.value, -0.258819403792807, rtol=1e-14)
    assert_allclose(q.bip.value, 0.448288357353826, rtol=1e-14)
    assert q.aip.sign == -1.0


def test_airy_values_stay_finite_for_large_arguments():
    q = eval_airy(400.0)
    zeta = 2.0 / 3.0 * 400.0 ** 1.5
    assert np.isfinite(q.ai.log_abs) and np.isfinite(q.bi.log_abs)
    assert_allclose(q.ai.log_abs, -zeta - np.log(2.0 * np.sqrt(np.pi) * 400.0 ** 0.25), rtol=1e-6)
    assert_allclose(q.bi.log_abs, zeta - np.log(np.sqrt(np.pi) * 400.0 ** 0.25), rtol=1e-6)


@pytest.mark.parametrize("s", [-1.0, np.nan, np.inf])
def test_airy_rejects_bad_arguments(s):
    with pytest.raises(DomainError):
        eval_airy(s)


@pytest.mark.parametrize("nu", [0.01, 0.1, 1.0, 10.0])
def test_wronskian_identity_holds_per_node(nu, grid):
    basis = build_basis(_params(nu), grid)
    assert np.all(basis.wronskian_error() <= 1e-8)
    assert np.all(np.diff(basis.s) > 0.0)


def test_basis_needs_increasing_concentration(grid):
    with pytest.raises(DomainError):
        build_basis(ModelParams(nu=1.0, tau_plus=0.6, c0=0.7, j=0.0), grid)


@pytest.mark.parametrize("nu", [0.5, 1.0, 5.0])
def test_extrapolated_oracle_matches_closely(nu, grid, rng):
    p = _params(nu)
    basis = build_basis(p, grid)
    for _ in range(3):
        coefficients = rng.uniform(-1.0, 1.0, size=4)

        def R_values(g, c=coefficients):
            return sum(a * np.cos(np.pi * k * g.nodes + 0.3 * k) for k, a in enumerate(c))

        airy = solve_linear_bvp(GridFn(grid=grid, values=R_values(grid)), basis)
        oracle = _oracle_extrapolated(R_values, p, grid)
        assert np.max(np.abs(airy.F.values - oracle)) <= 1e-6


@pytest.mark.parametrize("nu", [0.1, 1.0, 10.0])
@pytest.mark.parametrize("c0", [0.1, 1.0 / 3.0, 0.45])
def test_airy_operator_matches_finite_differences(nu, c0, grid, rng):
    p = _params(nu, c0)
    basis = build_basis(p, grid)
    sources = [CUBIC] + [rng.uniform(-1.0, 1.0, size=4) for _ in range(3)]
    for coefficients in sources:
        R = _polynomial(grid, coefficients)
        scale = max(1.0, float(np.max(np.abs(R.values))))
        assert _oracle_gap(R, p, basis) <= ORACLE_TOL * scale


def test_oracle_gap_falls_with_h_squared():
    p = _params(1.0)
    gaps = []
    for n in (1000, 2000):
        grid = Grid(n_intervals=n)
        gaps.append(_oracle_gap(_polynomial(grid, CUBIC), p, build_basis(p, grid)))
    assert 3.5 <= gaps[0] / gaps[1] <= 4.5


def test_neumann_conditions_hold(grid, rng):
    basis = build_basis(_params(0.1), grid)
    result = solve_linear_bvp(_random_smooth(grid, rng), basis)
    assert abs(result.G.values[0]) <= 1e-10
    assert abs(result.G.values[-1]) <= 1e-10
    assert result.residual_norm <= 1e-4


def test_operator_is_linear(grid, rng):
    basis = build_basis(_params(0.5), grid)
    r1, r2 = _random_smooth(grid, rng), _random_smooth(grid, rng)
    combined = GridFn(grid=grid, values=2.5 * r1.values - 0.75 * r2.values)
    f1 = solve_linear_bvp(r1, basis)
    f2 = solve_linear_bvp(r2, basis)
    f = solve_linear_bvp(combined, basis)
    assert_allclose(f.F.values, 2.5 * f1.F.values - 0.75 * f2.F.values, atol=1e-12)
    assert_allclose(f.G.values, 2.5 * f1.G.values - 0.75 * f2.G.values, atol=1e-12)
    scaled = solve_linear_bvp(GridFn(grid=grid, values=1e-3 * r1.values), basis)
    assert_allclose(scaled.F.values, 1e-3 * f1.F.values, rtol=1e-12, atol=1e-15)


def test_zero_source_gives_zero_solution(grid):
    basis = build_basis(_params(2.0), grid)
    result = solve_linear_bvp(GridFn.zeros(grid, with_derivative=False), basis)
    assert np.all(result.F.values == 0.0)
    assert result.d_A == 0.0


def test_constant_source_far_from_boundaries(grid):
    # Small nu: away from the boundary layers y ~ -R / (2 c)
    p = _params(1e-4)
    basis = build_basis(p, grid)
    result = solve_linear_bvp(GridFn(grid=grid, values=np.ones(grid.size)), basis)
    c = p.c0 + (p.c1 - p.c0) * grid.nodes
    middle = slice(400, 601)
    assert_allclose(result.F.values[middle], -1.0 / (2.0 * c[middle]), rtol=1e-3)


def test_grid_mismatch_is_rejected(grid):
    basis = build_basis(_params(1.0), grid)
    with pytest.raises(GridMismatchError):
        solve_linear_bvp(GridFn.zeros(Grid(n_intervals=100)), basis)


def test_ode_residual_of_oracle_is_small(coarse_grid, rng):
    p = _params(1.0)
    r = _random_smooth(coarse_grid, rng)
    oracle = solve_linear_bvp_oracle(r, p)
    assert ode_residual(oracle.F.values, r.values, p, coarse_grid) <= 1e-10


def test_dump_basis_writes_log_magnitudes(tmp_path, coarse_grid):
    basis = build_basis(_params(0.1), coarse_grid)
    path = dump_basis(basis, tmp_path / "basis.csv")
    frame = pd.read_csv(path)
    assert list(frame.columns) == ["x", "s", "log_ai", "log_bi"]
    assert len(frame) == coarse_grid.size
    assert_allclose(frame["log_ai"].iloc[0], np.log(eval_airy(basis.s[0]).ai.value), rtol=1e-12)
