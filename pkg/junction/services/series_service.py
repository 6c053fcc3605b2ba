"""Perturbation recursion for the field.

Each order solves nu E_n'' = 2 c(x) E_n + R_n with Neumann conditions, where
R_n depends only on E_1..E_{n-1}. The perturbation amplitude is carried by
delta_j, so the book-keeping parameter of the expansion is fixed at one.
"""
import logging
from typing import List, Sequence

import numpy as np

from junction.errors import ClassificationError, PreconditionError
from junction.models.airy_models import AiryBasis
from junction.models.grid_models import Grid, GridFn
from junction.models.params_models import ModelParams
from junction.models.series_models import RunStatus, SeriesRun, SeriesTerm
from junction.models.solution_models import FieldSolution
from junction.services import model_service
from junction.services.airy_service import solve_linear_bvp

logger = logging.getLogger(__name__)

MAX_ORDER = 500
OVERFLOW_LIMIT = 1e30


def _seed(p: ModelParams, grid: Grid) -> GridFn:
    return GridFn(grid=grid, values=np.full(grid.size, -2.0 * p.delta_j))


def first_order(p: ModelParams, basis: AiryBasis) -> SeriesTerm:
    """E_1 = F_{R_1} with R_1 = -2 delta_j."""
    r1 = _seed(p, basis.grid)
    E1 = solve_linear_bvp(r1, basis).as_field()
    return SeriesTerm(order=1, E=E1, R=r1, max_abs=E1.max_abs())


def first_order_solution(p: ModelParams, basis: AiryBasis) -> FieldSolution:
    """Closed-form linearised solution: c = c(x) +- nu G / 2 and the fluxes it fixes."""
    term = first_order(p, basis)
    grid = basis.grid
    c = model_service.linear_profile(p, grid)
    half = 0.5 * p.nu * term.E.derivative
    solution = FieldSolution(
        params=p, E=term.E,
        c_plus=GridFn(grid=grid, values=c + half), c_minus=GridFn(grid=grid, values=c - half),
        phi_plus=p.c0 - p.c1 - p.j0 + p.j, phi_minus=p.c0 - p.c1 + p.j0 - p.j)
    try:
        label = model_service.classify(solution)
    except ClassificationError as exc:
        logger.debug("first-order solution left unclassified: %s", exc)
        label = None
    return solution.model_copy(update={"class_label": label})


def _convolve(E: np.ndarray, n: int) -> np.ndarray:
    """U_n = sum_{k=1}^{n-1} E_k E_{n-k}; row k-1 of E holds E_k."""
    if n < 2:
        raise IndexError(f"U_n is defined for n >= 2, got {n}")
    if E.shape[0] < n - 1:
        raise IndexError(f"U_{n} needs orders 1..{n - 1}, only {E.shape[0]} available")
    return np.einsum("ij,ij->j", E[:n - 1], E[n - 2::-1][:n - 1])


def _assemble(E: np.ndarray, u_table: np.ndarray, n: int, p: ModelParams,
              x: np.ndarray) -> np.ndarray:
    if n < 2:
        raise IndexError(f"R_n from the recursion needs n >= 2, got {n}")
    if u_table.shape[0] <= n:
        raise IndexError(f"U_{n} is missing from the table")
    u_n = u_table[n]
    tau_term = (p.tau_minus - p.tau_plus) * (u_n[0] - u_n[-1])
    if n == 2:
        return np.full(x.size, 0.5 * p.nu * tau_term)
    if E.shape[0] < n - 2:
        raise IndexError(f"R_{n} needs orders 1..{n - 2}, only {E.shape[0]} available")
    lower = E[:n - 2]
    # rows U_{n-1}, ..., U_2 paired with E_1, ..., E_{n-2}
    upper = u_table[n - 1:1:-1]
    v_left = lower.T @ upper[:, 0]
    v_right = lower.T @ upper[:, -1]
    v_diag = np.einsum("ij,ij->j", lower, upper)
    return 0.5 * p.nu * (x * (v_left - v_right) - v_left + v_diag + tau_term)


def convolve_U(terms: Sequence[SeriesTerm], n: int) -> GridFn:
    if not terms:
        raise IndexError("no series terms to convolve")
    E = np.array([term.E.values for term in terms])
    return GridFn(grid=terms[0].E.grid, values=_convolve(E, n))


def assemble_R(terms: Sequence[SeriesTerm], u_table: np.ndarray, n: int,
               p: ModelParams) -> GridFn:
    if not terms:
        raise IndexError("no series terms to assemble from")
    grid = terms[0].E.grid
    E = np.array([term.E.values for term in terms])
    return GridFn(grid=grid, values=_assemble(E, np.asarray(u_table), n, p, grid.nodes))


def run_series(p: ModelParams, n_max: int, basis: AiryBasis) -> SeriesRun:
    """
    Compute the series terms E_1..E_n_max and their partial sums

    Args:
        p: Model constants
        n_max: Highest order, at most MAX_ORDER
        basis: Airy basis the term solves use

    Returns:
        The run, cut short with overflow status once max|E_n| exceeds OVERFLOW_LIMIT
    """
    if not 1 <= n_max <= MAX_ORDER:
        raise PreconditionError(f"n_max must lie in 1..{MAX_ORDER}, got {n_max}")
    grid = basis.grid
    x = grid.nodes
    E = np.zeros((n_max, grid.size))
    dE = np.zeros((n_max, grid.size))
    partial_E = np.zeros((n_max, grid.size))
    partial_dE = np.zeros((n_max, grid.size))
    u_table = np.zeros((n_max + 1, grid.size))
    terms: List[SeriesTerm] = []
    status = RunStatus.COMPLETED

    for n in range(1, n_max + 1):
        if n == 1:
            r = _seed(p, grid).values
        else:
            u_table[n] = _convolve(E[:n - 1], n)
            r = _assemble(E[:n - 1], u_table, n, p, x)
        result = solve_linear_bvp(GridFn(grid=grid, values=r), basis)
        E[n - 1], dE[n - 1] = result.F.values, result.G.values
        if n == 1:
            partial_E[0], partial_dE[0] = E[0], dE[0]
        else:
            partial_E[n - 1] = partial_E[n - 2] + E[n - 1]
            partial_dE[n - 1] = partial_dE[n - 2] + dE[n - 1]
        size = float(np.max(np.abs(E[n - 1])))
        terms.append(SeriesTerm(order=n, E=result.as_field(), R=GridFn(grid=grid, values=r),
                                u_left=float(u_table[n, 0]), u_right=float(u_table[n, -1]),
                                max_abs=size))
        if not size <= OVERFLOW_LIMIT:
            status = RunStatus.OVERFLOW
            logger.info("series for %s overflows at order %d (max|E_n| = %.3e)",
                        p.describe(), n, size)
            break
        if n % 100 == 0:
            logger.debug("series for %s: order %d, max|E_n| = %.3e", p.describe(), n, size)

    order = len(terms)
    logger.info("series for %s finished at order %d (%s)", p.describe(), order, status.value)
    return SeriesRun(params=p, grid=grid, n_max=n_max, terms=terms,
                     partial_E=partial_E[:order], partial_dE=partial_dE[:order],
                     u_table=u_table[:order + 1], status=status)


def partial_sum_solution(run: SeriesRun, n: int) -> FieldSolution:
    return model_service.reconstruct(run.partial_sum(n), run.params)


def nonlinear_residual(run: SeriesRun, n: int) -> float:
    """Max interior residual of the full field equation for the partial sum E^(n).

    The equation is nu E'' = nu E^3 / 2 + (2 c0 - nu E(0)^2 / 2 + k x) E
    + (tau_- - tau_+) k - 2 j with k = 2 (c1 - c0) + nu (E(0)^2 - E(1)^2) / 2.
    """
    p = run.params
    e = run.partial_sum(n).values
    x = run.grid.nodes
    h = run.grid.h
    e_left, e_right = e[0], e[-1]
    k = 2.0 * (p.c1 - p.c0) + 0.5 * p.nu * (e_left ** 2 - e_right ** 2)
    second = (e[2:] - 2.0 * e[1:-1] + e[:-2]) / h ** 2
    inner = e[1:-1]
    rhs = (0.5 * p.nu * inner ** 3 + (2.0 * p.c0 - 0.5 * p.nu * e_left ** 2 + k * x[1:-1]) * inner
           + (p.tau_minus - p.tau_plus) * k - 2.0 * p.j)
    return float(np.max(np.abs(p.nu * second - rhs)))
