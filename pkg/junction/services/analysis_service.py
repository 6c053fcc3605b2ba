"""Error measures of the partial sums and the verdicts built on them."""
import logging
from collections import defaultdict
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np
from scipy.integrate import simpson
from scipy.ndimage import maximum_filter1d

from junction.errors import GridMismatchError
from junction.models.analysis_models import (RELIABILITY_FLOOR, ConditionQReport, ErrorTrace,
                                             Turnaround, Verdict, WeightSearchResult)
from junction.models.config_models import DEFAULT_WEIGHTS
from junction.models.grid_models import require_same_grid
from junction.models.series_models import RunStatus, SeriesRun
from junction.models.solution_models import RefSolution

logger = logging.getLogger(__name__)

COARSE_THRESHOLD = 1e-3
FINE_THRESHOLD = RELIABILITY_FLOOR
TREND_WINDOW = 50
GROWTH_FACTOR = 10.0
# trailing geometric mean over the minimum for a sustained rise
RISE_FACTOR = 2.0
# decades per order below which a trend counts as flat
FLAT_TREND = 1e-9
NAMED_WEIGHTS = (0.2, 0.25, 0.5)
REFINE_STEP = 0.01
REFINE_SPAN = 5
ENVELOPE_HALF_WIDTH = 10


def threshold_order(values: np.ndarray, threshold: float) -> Optional[int]:
    """Smallest order after which every value stays below ``threshold``.

    Returns 0 when the whole trace is below it and None when the last
    computed value is still at or above it.
    """
    above = np.nonzero(np.asarray(values) >= threshold)[0]
    if above.size == 0:
        return 0
    last = int(above[-1]) + 1
    if last == len(values):
        return None
    return last


def _errors(run: SeriesRun, ref: RefSolution, n: int):
    try:
        require_same_grid(run.grid, ref.solution.grid)
    except GridMismatchError:
        logger.error("series and reference for %s live on different grids", run.params.describe())
        raise
    field = np.abs(run.partial_E[:n] - ref.solution.field)
    slope = np.abs(run.partial_dE[:n] - ref.solution.slope)
    return field, slope


def _integral_measure(field: np.ndarray, slope: np.ndarray, x: np.ndarray) -> np.ndarray:
    return np.sqrt(simpson(field ** 2 + slope ** 2, x=x, axis=-1))


def error_trace(run: SeriesRun, ref: RefSolution, n_max: Optional[int] = None) -> ErrorTrace:
    """
    Compare every partial sum of a series run against the reference solution

    Args:
        run: Series run on the reference grid
        ref: Reference solution
        n_max: Optional cap on the orders compared

    Returns:
        The trace with n3, n7 and the apparent verdict filled in
    """
    n = run.order if n_max is None else min(n_max, run.order)
    field, slope = _errors(run, ref, n)
    trace = ErrorTrace(
        params=run.params, n_max=n, field_error=field, slope_error=slope,
        delta_integral=_integral_measure(field, slope, run.grid.nodes),
        nu_e_max_sq=ref.solution.nu_e_max_sq, delta_1=float(np.max(field[0] + slope[0])),
        class_label=ref.solution.class_label, run_status=run.status)
    delta = trace.delta
    trace = trace.model_copy(update={"n3": threshold_order(delta, COARSE_THRESHOLD),
                                     "n7": threshold_order(delta, FINE_THRESHOLD)})
    trace = trace.model_copy(update={"verdict": verdict(trace)})
    logger.info("trace for %s: delta_1 = %.4g, n3 = %s, n7 = %s, apparently %s",
                run.params.describe(), trace.delta_1, trace.n3, trace.n7, trace.verdict.value)
    return trace


def error_trace_integral(run: SeriesRun, ref: RefSolution, n: int) -> float:
    run.partial_sum(n)
    field, slope = _errors(run, ref, n)
    return float(_integral_measure(field[-1], slope[-1], run.grid.nodes))


def _logs(values: np.ndarray) -> np.ndarray:
    return np.log10(np.maximum(values, np.finfo(float).tiny))


def _trend(delta: np.ndarray) -> float:
    window = delta[-TREND_WINDOW:]
    if window.size < 2:
        return 0.0
    return float(np.polyfit(np.arange(window.size), _logs(window), 1)[0])


def _sustained_rise(delta: np.ndarray) -> bool:
    # the minimum lies before the trailing window and the window sits well above it
    if delta.size <= TREND_WINDOW or int(np.argmin(delta)) >= delta.size - TREND_WINDOW:
        return False
    level = 10.0 ** np.mean(_logs(delta[-TREND_WINDOW:]))
    return bool(level > RISE_FACTOR * delta.min())


def verdict(trace: ErrorTrace) -> Verdict:
    """
    Apparent verdict on the computed orders of a trace

    Args:
        trace: Error trace, possibly cut short by overflow

    Returns:
        converged once Delta_n stays below the reliability floor; diverging on
        overflow or when Delta_n has turned upward for good; still_decreasing
        for a falling tail; unclear otherwise
    """
    delta = trace.delta
    if trace.run_status is RunStatus.OVERFLOW:
        return Verdict.DIVERGING
    n7 = threshold_order(delta, FINE_THRESHOLD)
    if n7 is not None:
        return Verdict.CONVERGED
    slope = _trend(delta)
    if slope > FLAT_TREND:
        if delta[-1] > GROWTH_FACTOR * delta.min() or _sustained_rise(delta):
            return Verdict.DIVERGING
    if slope < -FLAT_TREND:
        return Verdict.STILL_DECREASING
    return Verdict.UNCLEAR


def turnaround(trace: ErrorTrace, half_width: int = ENVELOPE_HALF_WIDTH) -> Optional[Turnaround]:
    """
    Where the upper envelope of Delta_n reaches its minimum

    The envelope at order n is the largest Delta over orders n-half_width to
    n+half_width, so the odd/even oscillation of the partial sums does not
    pull the minimum down.

    Args:
        trace: Error trace
        half_width: Orders on each side of n covered by the envelope

    Returns:
        The order and envelope value at the minimum, or None for an empty trace
    """
    delta = trace.delta
    if delta.size == 0:
        return None
    envelope = maximum_filter1d(delta, size=2 * half_width + 1, mode="nearest")
    k = int(np.argmin(envelope))
    return Turnaround(order=k + 1, value=float(envelope[k]))


def condition_q(trace: ErrorTrace) -> ConditionQReport:
    """Check that the field and slope errors never grow at the same step.

    An order n violates the condition when both Delta_{n+1}(1) and
    Delta_{n+1}(0) exceed their predecessors. A tie in either measure is
    not a violation.
    """
    field, slope = trace.delta_field, trace.delta_slope
    last = trace.computed - 1
    if trace.n7 is not None:
        last = min(trace.n7 + 1, last)
    violations = [n for n in range(1, last + 1)
                  if field[n] > field[n - 1] and slope[n] > slope[n - 1]]
    return ConditionQReport(first=1, last=last, holds=not violations, violations=violations)


def is_monotone(trace: ErrorTrace, w: float) -> bool:
    values = trace.weighted(w)
    n7 = threshold_order(values, FINE_THRESHOLD)
    if n7 is None:
        return False
    stop = min(n7 + 1, values.size)
    return bool(np.all(np.diff(values[:stop]) < 0.0))


def _neighbours(centre: float) -> List[float]:
    steps = range(-REFINE_SPAN, REFINE_SPAN + 1)
    return [w for w in (round(centre + k * REFINE_STEP, 4) for k in steps) if 0.0 < w < 1.0]


def weight_search(trace: ErrorTrace, weights: Optional[Iterable[float]] = None,
                  refine: bool = False) -> WeightSearchResult:
    """
    Find the weights w for which Delta_n(w) decreases strictly up to its n7

    Args:
        trace: Error trace
        weights: Weights to scan; the configured defaults when None. The named
            weights 0.2, 0.25 and 0.5 are always scanned
        refine: Also scan 0.01 steps within 0.05 of every hit and of every
            named weight

    Returns:
        The weights scanned and the monotone ones
    """
    scan = set(DEFAULT_WEIGHTS if weights is None else weights) | set(NAMED_WEIGHTS)
    scan = {round(w, 4) for w in scan if 0.0 < w < 1.0}
    monotone = {w for w in scan if is_monotone(trace, w)}
    if refine:
        centres = monotone | set(NAMED_WEIGHTS)
        extra = {w for centre in centres for w in _neighbours(centre)} - scan
        scan |= extra
        monotone |= {w for w in extra if is_monotone(trace, w)}
    return WeightSearchResult(weights=sorted(scan), monotone_weights=sorted(monotone),
                              conjecture_flag=bool(monotone))


def case_report(trace: ErrorTrace, q: ConditionQReport, weights: WeightSearchResult) -> Dict:
    p = trace.params
    turn = turnaround(trace) if trace.verdict is Verdict.DIVERGING else None
    return {
        "params": {"nu": p.nu, "tau_plus": p.tau_plus, "c0": p.c0, "c1": p.c1,
                   "j": p.j, "delta_j": p.delta_j},
        "class": None if trace.class_label is None else trace.class_label.value,
        "nu_e_max_sq": trace.nu_e_max_sq,
        "delta_1": trace.delta_1,
        "n3": trace.n3,
        "n7": trace.n7,
        "verdict": trace.verdict.value,
        "apparent": True,
        "orders_computed": trace.computed,
        "run_status": trace.run_status.value,
        "condition_q": q.model_dump(),
        "monotone_weights": weights.monotone_weights,
        "conjecture_flag": weights.conjecture_flag,
        "turnaround": None if turn is None else turn.model_dump(),
    }


def breakdown_brackets(results: Sequence[Dict]) -> List[Dict]:
    """Per (nu, tau_plus, c0) slice and sign of delta_j, bracket the onset of divergence.

    ``lower`` is the largest |delta_j| that still converges or decreases below
    the first diverging value ``upper``.
    """
    slices: Dict[tuple, List[Dict]] = defaultdict(list)
    for row in results:
        if row.get("verdict") is None or row["delta_j"] == 0.0:
            continue
        side = "+" if row["delta_j"] > 0.0 else "-"
        slices[(row["nu"], row["tau_plus"], row["c0"], side)].append(row)
    brackets = []
    for (nu, tau_plus, c0, side), rows in slices.items():
        rows = sorted(rows, key=lambda row: abs(row["delta_j"]))
        lower = upper = None
        for row in rows:
            if row["verdict"] == Verdict.DIVERGING.value:
                upper = row["delta_j"]
                break
            if row["verdict"] in (Verdict.CONVERGED.value, Verdict.STILL_DECREASING.value):
                lower = row["delta_j"]
        brackets.append({"nu": nu, "tau_plus": tau_plus, "c0": c0, "side": side,
                         "lower": lower, "upper": upper})
    return brackets
