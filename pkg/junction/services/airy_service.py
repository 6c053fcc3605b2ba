"""Airy basis and the Neumann solution operators F_R, G_R.

The operators solve

    nu y'' = 2 c(x) y + R(x),   y'(0) = y'(1) = 0,   c(x) = c0 + (c1 - c0) x,

by variation of parameters with A(x) = Ai(s(x)) and B(x) = Bi(s(x)). Products
of a growing and a decaying Airy function are assembled from exponentially
scaled mantissas so that only exponent differences zeta(y) - zeta(x) with a
non-positive sign are ever exponentiated.
"""
import logging
import math
from pathlib import Path

import numpy as np
import pandas as pd
from scipy import linalg, special
from scipy.interpolate import CubicSpline

from junction.errors import (DomainError, LinearSolveError, QuadratureError,
                             SingularityError)
from junction.models.airy_models import AiryBasis, AiryQuadruple, AirySolveResult, AiryValue
from junction.models.grid_models import Grid, GridFn, require_same_grid
from junction.models.params_models import ModelParams

logger = logging.getLogger(__name__)

WRONSKIAN_RTOL = 1e-8
SINGULAR_TOL = 1e-14
# Largest exponent difference accumulated in one block of the cumulative sums.
EXPONENT_SPAN = 600.0


def _pair(mantissa: float, exponent: float) -> AiryValue:
    return AiryValue(log_abs=math.log(abs(mantissa)) + exponent, sign=math.copysign(1.0, mantissa))


def eval_airy(s: float) -> AiryQuadruple:
    """Ai, Bi, Ai', Bi' at s >= 0 as (log-magnitude, sign) pairs."""
    if not math.isfinite(s) or s < 0.0:
        raise DomainError("s", f"Airy arguments must be finite and non-negative, got {s!r}")
    eai, eaip, ebi, ebip = special.airye(s)
    zeta = 2.0 / 3.0 * s ** 1.5
    return AiryQuadruple(ai=_pair(eai, -zeta), bi=_pair(ebi, zeta),
                         aip=_pair(eaip, -zeta), bip=_pair(ebip, zeta))


def build_basis(p: ModelParams, grid: Grid) -> AiryBasis:
    """
    Exponent-scaled Airy functions at the nodes and interval midpoints

    Args:
        p: Model constants with c0 < c1
        grid: Grid of the basis

    Returns:
        The basis with its Wronskian constant

    Raises:
        DomainError: when c1 <= c0
        QuadratureError: when the Wronskian identity fails at some node
    """
    if p.c1 <= p.c0:
        raise DomainError("c0", "the Airy basis needs c0 < c1; reflect mirrored data first")
    spread = p.c1 - p.c0
    scale = (4.0 * p.nu * spread ** 2) ** (1.0 / 3.0)
    s = 2.0 * (p.c0 + spread * grid.nodes) / scale
    s_mid = 2.0 * (p.c0 + spread * grid.midpoints) / scale
    ai, aip, bi, bip = special.airye(s)
    ai_mid, _, bi_mid, _ = special.airye(s_mid)
    basis = AiryBasis(
        params=p, grid=grid, slope=2.0 * spread / scale,
        wronskian=(2.0 * spread / (math.pi ** 3 * p.nu)) ** (1.0 / 3.0),
        s=s, zeta=2.0 / 3.0 * s ** 1.5, ai=ai, aip=aip, bi=bi, bip=bip,
        s_mid=s_mid, zeta_mid=2.0 / 3.0 * s_mid ** 1.5, ai_mid=ai_mid, bi_mid=bi_mid)
    error = basis.wronskian_error()
    if not np.all(error <= WRONSKIAN_RTOL):
        raise QuadratureError(f"Wronskian identity fails by {error.max():.3e} for {p.describe()}")
    logger.debug("Airy basis for %s: s in [%.4f, %.4f], W = %.6g",
                 p.describe(), s[0], s[-1], basis.wronskian)
    return basis


def _decaying_cumsum(increments: np.ndarray, zeta: np.ndarray) -> np.ndarray:
    """out[0] = 0, out[i+1] = exp(zeta[i] - zeta[i+1]) out[i] + increments[i]; zeta increasing."""
    out = np.zeros(zeta.size)
    n = increments.size
    start = 0
    while start < n:
        stop = int(np.searchsorted(zeta, zeta[start] + EXPONENT_SPAN, side="right")) - 1
        stop = min(max(stop, start + 1), n)
        ref = zeta[start]
        block = slice(start + 1, stop + 1)
        acc = np.cumsum(np.exp(zeta[block] - ref) * increments[start:stop])
        out[block] = np.exp(ref - zeta[block]) * (out[start] + acc)
        start = stop
    return out


def solve_linear_bvp(R: GridFn, basis: AiryBasis) -> AirySolveResult:
    """
    Solve nu F'' - 2 c(x) F = R with F'(0) = F'(1) = 0 through the Airy Green's operator

    Args:
        R: Inhomogeneous term sampled on the basis grid
        basis: Airy basis of the same grid and constants

    Returns:
        F_R, G_R = F_R', the homogeneous constants and the finite-difference residual
    """
    grid = require_same_grid(R.grid, basis.grid)
    r = R.values
    if not np.all(np.isfinite(r)):
        raise QuadratureError("inhomogeneous term has non-finite samples")
    p = basis.params
    h = grid.h
    zeta, zeta_mid = basis.zeta, basis.zeta_mid
    ai, bi, aip, bip = basis.ai, basis.bi, basis.aip, basis.bip
    r_mid = CubicSpline(grid.nodes, r)(grid.midpoints)
    step = np.exp(zeta[:-1] - zeta[1:])

    # Simpson pieces of int R B exp(-zeta(x_{i+1})) and int R A exp(zeta(x_i)) over each interval.
    forward = h / 6.0 * (r[:-1] * bi[:-1] * step
                         + 4.0 * r_mid * basis.bi_mid * np.exp(zeta_mid - zeta[1:])
                         + r[1:] * bi[1:])
    backward = h / 6.0 * (r[:-1] * ai[:-1]
                          + 4.0 * r_mid * basis.ai_mid * np.exp(zeta[:-1] - zeta_mid)
                          + r[1:] * ai[1:] * step)
    int_rb = _decaying_cumsum(forward, zeta)
    int_ra = _decaying_cumsum(backward[::-1], -zeta[::-1])[::-1]
    if not (np.all(np.isfinite(int_rb)) and np.all(np.isfinite(int_ra))):
        raise QuadratureError(f"non-finite quadrature accumulation for {p.describe()}")

    nu_w = p.nu * basis.wronskian
    span = math.exp(zeta[0] - zeta[-1])
    system = np.array([[aip[0], bip[0] * span], [aip[-1] * span, bip[-1]]])
    scale = abs(aip[0] * bip[-1]) + abs(bip[0] * aip[-1]) * span ** 2
    if abs(np.linalg.det(system)) <= SINGULAR_TOL * scale:
        raise SingularityError(f"Neumann constants are undetermined for {p.describe()}")
    rhs = np.array([bip[0] * int_ra[0], aip[-1] * int_rb[-1]]) / nu_w
    a_scaled, b_scaled = np.linalg.solve(system, rhs)

    left = np.exp(zeta[0] - zeta)
    right = np.exp(zeta - zeta[-1])
    F = -(ai * int_rb + bi * int_ra) / nu_w + a_scaled * ai * left + b_scaled * bi * right
    G = basis.slope * (-(aip * int_rb + bip * int_ra) / nu_w
                       + a_scaled * aip * left + b_scaled * bip * right)
    if not (np.all(np.isfinite(F)) and np.all(np.isfinite(G))):
        raise QuadratureError(f"non-finite Airy solution for {p.describe()}")

    with np.errstate(over="ignore"):
        d_A = a_scaled * np.exp(zeta[0])
    d_B = b_scaled * np.exp(-zeta[-1]) - np.exp(-zeta[0]) * int_ra[0] / nu_w
    return AirySolveResult(F=GridFn(grid=grid, values=F), G=GridFn(grid=grid, values=G),
                           d_A=float(d_A), d_B=float(d_B),
                           residual_norm=ode_residual(F, r, p, grid))


def ode_residual(y: np.ndarray, r: np.ndarray, p: ModelParams, grid: Grid) -> float:
    """Max interior-node residual of nu y'' - 2 c y - R by central differences."""
    c = p.c0 + (p.c1 - p.c0) * grid.nodes
    second = (y[2:] - 2.0 * y[1:-1] + y[:-2]) / grid.h ** 2
    return float(np.max(np.abs(p.nu * second - 2.0 * c[1:-1] * y[1:-1] - r[1:-1])))


def solve_linear_bvp_oracle(R: GridFn, p: ModelParams) -> AirySolveResult:
    """Second-order finite-difference solution of the same Neumann problem.

    The one-sided boundary stencils are eliminated against the first and last
    interior rows, which keeps the system tridiagonal.
    """
    grid = R.grid
    r = R.values
    h2 = grid.h ** 2 / p.nu
    c = p.c0 + (p.c1 - p.c0) * grid.nodes
    n = grid.size
    ab = np.zeros((3, n))
    ab[0, 1:] = 1.0
    ab[1, :] = -(2.0 + 2.0 * c * h2)
    ab[2, :-1] = 1.0
    rhs = h2 * r.copy()
    ab[1, 0], ab[0, 1] = -2.0, 2.0 - 2.0 * c[1] * h2
    rhs[0] = h2 * r[1]
    ab[1, -1], ab[2, -2] = 2.0, -2.0 + 2.0 * c[-2] * h2
    rhs[-1] = -h2 * r[-2]
    try:
        y = linalg.solve_banded((1, 1), ab, rhs)
    except linalg.LinAlgError as exc:
        raise LinearSolveError(f"finite-difference oracle is singular: {exc}") from exc
    dy = np.gradient(y, grid.h, edge_order=2)
    return AirySolveResult(F=GridFn(grid=grid, values=y), G=GridFn(grid=grid, values=dy),
                           d_A=float("nan"), d_B=float("nan"),
                           residual_norm=ode_residual(y, r, p, grid))


def dump_basis(basis: AiryBasis, path: Path) -> Path:
    frame = pd.DataFrame({"x": basis.grid.nodes, "s": basis.s,
                          "log_ai": basis.log_ai, "log_bi": basis.log_bi})
    frame.to_csv(path, index=False, float_format="%.17g")
    logger.info("Airy basis written to %s", path)
    return path
