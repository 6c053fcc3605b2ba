"""Reference solutions of the full five-equation boundary value problem.

Unknowns per node are (c+, c-, E, phi+, phi-), stored node-major. Every
interval contributes five trapezoidal box equations; the boundary rows fix the
end concentrations and the current. The system is solved by damped Newton with
an analytic sparse Jacobian, falling back to continuation in delta_j.
"""
import logging
import warnings
from typing import Optional, Tuple

import numpy as np
from scipy import sparse
from scipy.sparse import linalg as sparse_linalg

from junction.errors import ClassificationError, LinearSolveError, NonConvergence
from junction.models.config_models import SolverOptions
from junction.models.grid_models import Grid, GridFn, require_same_grid
from junction.models.params_models import ModelParams
from junction.models.solution_models import FieldSolution, RefSolution
from junction.services import model_service

logger = logging.getLogger(__name__)

FIELDS = 5
CP, CM, EF, PP, PM = range(FIELDS)
MAX_HALVINGS = 6
# residual below which a converged state is not polished further
POLISH_FLOOR = 1e-13


def state_from_solution(s: FieldSolution) -> np.ndarray:
    n = s.grid.size
    state = np.empty((n, FIELDS))
    state[:, CP] = s.c_plus.values
    state[:, CM] = s.c_minus.values
    state[:, EF] = s.field
    state[:, PP] = s.phi_plus
    state[:, PM] = s.phi_minus
    return state


def box_residual(state: np.ndarray, p: ModelParams, grid: Grid) -> np.ndarray:
    """Residual vector of the discrete system, boundary rows first and last."""
    h = grid.h
    cp, cm, e = state[:, CP], state[:, CM], state[:, EF]
    pp, pm = state[:, PP], state[:, PM]
    flow_p = e * cp - pp
    flow_m = -e * cm - pm
    charge = cp - cm
    inner = np.empty((grid.n_intervals, FIELDS))
    inner[:, 0] = np.diff(cp) - 0.5 * h * (flow_p[:-1] + flow_p[1:])
    inner[:, 1] = np.diff(cm) - 0.5 * h * (flow_m[:-1] + flow_m[1:])
    inner[:, 2] = p.nu * np.diff(e) - 0.5 * h * (charge[:-1] + charge[1:])
    inner[:, 3] = np.diff(pp)
    inner[:, 4] = np.diff(pm)
    left = [cp[0] - p.c0, cm[0] - p.c0, p.tau_plus * pp[0] - p.tau_minus * pm[0] - p.j]
    right = [cp[-1] - p.c1, cm[-1] - p.c1]
    return np.concatenate([left, inner.ravel(), right])


def box_jacobian(state: np.ndarray, p: ModelParams, grid: Grid) -> sparse.csc_matrix:
    h2 = 0.5 * grid.h
    n = grid.size
    cp, cm, e = state[:, CP], state[:, CM], state[:, EF]
    a = FIELDS * np.arange(n - 1)
    b = a + FIELDS
    row = 3 + a
    ones = np.ones(n - 1)
    ea, eb = e[:-1], e[1:]
    entries = [
        (row, a + CP, -1.0 - h2 * ea), (row, b + CP, 1.0 - h2 * eb),
        (row, a + EF, -h2 * cp[:-1]), (row, b + EF, -h2 * cp[1:]),
        (row, a + PP, h2 * ones), (row, b + PP, h2 * ones),
        (row + 1, a + CM, -1.0 + h2 * ea), (row + 1, b + CM, 1.0 + h2 * eb),
        (row + 1, a + EF, h2 * cm[:-1]), (row + 1, b + EF, h2 * cm[1:]),
        (row + 1, a + PM, h2 * ones), (row + 1, b + PM, h2 * ones),
        (row + 2, a + EF, -p.nu * ones), (row + 2, b + EF, p.nu * ones),
        (row + 2, a + CP, -h2 * ones), (row + 2, b + CP, -h2 * ones),
        (row + 2, a + CM, h2 * ones), (row + 2, b + CM, h2 * ones),
        (row + 3, a + PP, -ones), (row + 3, b + PP, ones),
        (row + 4, a + PM, -ones), (row + 4, b + PM, ones),
    ]
    last = FIELDS * (n - 1)
    size = FIELDS * n
    boundary = [(0, CP, 1.0), (1, CM, 1.0), (2, PP, p.tau_plus), (2, PM, -p.tau_minus),
                (size - 2, last + CP, 1.0), (size - 1, last + CM, 1.0)]
    rows = np.concatenate([r for r, _, _ in entries] + [np.array([r for r, _, _ in boundary])])
    cols = np.concatenate([c for _, c, _ in entries] + [np.array([c for _, c, _ in boundary])])
    vals = np.concatenate([v for _, _, v in entries] + [np.array([v for _, _, v in boundary])])
    return sparse.coo_matrix((vals, (rows, cols)), shape=(size, size)).tocsc()


class ReferenceSolver:
    """Damped Newton on the box discretization, with continuation and Richardson steps."""

    def __init__(self, options: Optional[SolverOptions] = None, grid: Optional[Grid] = None):
        """
        Initialize the solver

        Args:
            options: Newton, continuation and extrapolation settings
            grid: Base grid; the Richardson step also solves on its refinement
        """
        self.options = options or SolverOptions()
        self.grid = grid or Grid()

    def _step(self, p: ModelParams, grid: Grid, state: np.ndarray,
              current: np.ndarray, norm: float) -> np.ndarray:
        jacobian = box_jacobian(state, p, grid)
        with warnings.catch_warnings():
            warnings.simplefilter("error", sparse_linalg.MatrixRankWarning)
            try:
                step = sparse_linalg.spsolve(jacobian, -current)
            except (RuntimeError, sparse_linalg.MatrixRankWarning) as exc:
                raise LinearSolveError(
                    f"Newton system is singular for {p.describe()}: {exc}") from exc
        if not np.all(np.isfinite(step)):
            raise NonConvergence(f"non-finite Newton step for {p.describe()}", norm)
        return step.reshape(state.shape)

    def _polish(self, p: ModelParams, grid: Grid, state: np.ndarray, current: np.ndarray,
                norm: float) -> Tuple[np.ndarray, int, float]:
        # one full step from a converged state takes the residual down to roundoff
        if norm <= POLISH_FLOOR:
            return state, 0, norm
        trial = state + self._step(p, grid, state, current, norm)
        trial_norm = float(np.max(np.abs(box_residual(trial, p, grid))))
        if trial_norm < norm:
            logger.debug("polished %s: residual %.3e -> %.3e", p.describe(), norm, trial_norm)
            return trial, 1, trial_norm
        return state, 0, norm

    def newton(self, p: ModelParams, grid: Grid,
               state: np.ndarray) -> Tuple[np.ndarray, int, float]:
        """
        Damped Newton iteration on one grid

        Args:
            p: Model constants
            grid: Grid of the state
            state: Starting state, shape (nodes, 5)

        Returns:
            The converged state, the iterations used and the final residual max-norm

        Raises:
            NonConvergence: when the tolerance is not met or the line search stalls
            LinearSolveError: when the Jacobian is singular
        """
        opts = self.options
        current = box_residual(state, p, grid)
        norm = float(np.max(np.abs(current)))
        for iteration in range(opts.newton_max_iter + 1):
            if norm <= opts.newton_tol:
                state, extra, norm = self._polish(p, grid, state, current, norm)
                return state, iteration + extra, norm
            if iteration == opts.newton_max_iter:
                break
            step = self._step(p, grid, state, current, norm)
            damping = 1.0
            while damping >= opts.damping_min:
                trial = state + damping * step
                trial_residual = box_residual(trial, p, grid)
                trial_norm = float(np.max(np.abs(trial_residual)))
                if trial_norm < norm:
                    break
                damping *= 0.5
            else:
                raise NonConvergence(f"line search stalled for {p.describe()}", norm)
            state, current, norm = trial, trial_residual, trial_norm
            logger.debug("Newton %d for %s: residual %.3e, damping %.3g",
                         iteration + 1, p.describe(), norm, damping)
        raise NonConvergence(
            f"Newton did not reach {opts.newton_tol:.1e} in {opts.newton_max_iter} iterations "
            f"for {p.describe()}", norm)

    def continuation(self, p: ModelParams, grid: Grid) -> Tuple[np.ndarray, int, float, int]:
        """March delta_j from zero to its target, warm-starting every solve."""
        start = p.model_copy(update={"j": p.j0})
        state = state_from_solution(model_service.planck_solution(start, grid))
        target = p.delta_j
        base_step = min(1.0, self.options.continuation_step / abs(target))
        step = base_step
        progress = 0.0
        iterations = steps = 0
        best = float("inf")
        norm = float("inf")
        while progress < 1.0:
            trial_progress = min(1.0, progress + step)
            stage = p if trial_progress == 1.0 else p.model_copy(
                update={"j": p.j0 + trial_progress * target})
            try:
                state_next, used, norm = self.newton(stage, grid, state)
            except NonConvergence as exc:
                best = min(best, exc.best_residual)
                step *= 0.5
                if step < base_step / 2 ** MAX_HALVINGS:
                    logger.error("continuation stalled for %s at %.1f%%", p.describe(),
                                 100.0 * progress)
                    raise NonConvergence(f"continuation stalled for {p.describe()}", best,
                                         progress=progress) from exc
                logger.debug("continuation step halved to %.3g for %s", step * abs(target),
                             p.describe())
                continue
            state, progress = state_next, trial_progress
            iterations += used
            steps += 1
            step = base_step
            logger.debug("continuation for %s at %.1f%% (%d Newton iterations)",
                         p.describe(), 100.0 * progress, used)
        return state, iterations, norm, steps

    def solve_on(self, p: ModelParams, grid: Grid,
                 guess: Optional[np.ndarray] = None) -> Tuple[np.ndarray, int, float, int]:
        if guess is None:
            if abs(p.delta_j) < model_service.TOL_EXACT:
                start = model_service.planck_solution(p, grid)
            else:
                start = model_service.planck_approximation(p, grid)
            guess = state_from_solution(start)
        try:
            state, iterations, norm = self.newton(p, grid, guess)
            return state, iterations, norm, 0
        except NonConvergence as exc:
            if abs(p.delta_j) < model_service.TOL_EXACT:
                raise
            logger.info("direct Newton failed for %s (%s); switching to continuation",
                        p.describe(), exc)
        return self.continuation(p, grid)

    def solve(self, p: ModelParams) -> RefSolution:
        """
        Reference solution on the base grid

        With Richardson extrapolation on, the problem is solved on the base grid
        and on its refinement and the two are combined node by node. The
        combined state is not a root of either discrete system; its residual
        on the base grid is reported as ``extrapolation_drift``.

        Args:
            p: Model constants

        Returns:
            The classified solution with its Newton diagnostics
        """
        grid = self.grid
        state, iterations, norm, steps = self.solve_on(p, grid)
        drift = 0.0
        if self.options.richardson:
            fine = grid.refined()
            guess = np.column_stack([np.interp(fine.nodes, grid.nodes, state[:, k])
                                     for k in range(FIELDS)])
            fine_state, fine_iterations, fine_norm, fine_steps = self.solve_on(p, fine, guess)
            state = (4.0 * fine_state[::2] - state) / 3.0
            iterations += fine_iterations
            steps += fine_steps
            norm = max(norm, fine_norm)
        solution = to_field_solution(p, grid, state)
        if self.options.richardson:
            drift = residual(p, solution)
        logger.info("reference for %s: class %s, nu E_max^2 = %.6g, %d Newton iterations",
                    p.describe(), solution.class_label.value, solution.nu_e_max_sq, iterations)
        return RefSolution(solution=solution, newton_iterations=iterations,
                           final_residual_norm=norm, continuation_steps=steps,
                           richardson=self.options.richardson, extrapolation_drift=drift)


def to_field_solution(p: ModelParams, grid: Grid, state: np.ndarray) -> FieldSolution:
    cp, cm = state[:, CP], state[:, CM]
    solution = FieldSolution(
        params=p, E=GridFn(grid=grid, values=state[:, EF], derivative=(cp - cm) / p.nu),
        c_plus=GridFn(grid=grid, values=cp), c_minus=GridFn(grid=grid, values=cm),
        phi_plus=float(state[0, PP]), phi_minus=float(state[0, PM]))
    try:
        label = model_service.classify(solution)
    except ClassificationError:
        logger.error("reference solution for %s has no solution class", p.describe())
        raise
    return solution.model_copy(update={"class_label": label})


def solve_reference(p: ModelParams, opts: Optional[SolverOptions] = None,
                    grid: Optional[Grid] = None) -> RefSolution:
    return ReferenceSolver(opts, grid).solve(p)


def residual(p: ModelParams, candidate: FieldSolution, grid: Optional[Grid] = None) -> float:
    """Max-norm of the discrete residual for any candidate solution."""
    if grid is not None:
        require_same_grid(grid, candidate.grid)
    return float(np.max(np.abs(box_residual(state_from_solution(candidate), p, candidate.grid))))
