"""Magnetometry analysis: peak FWM intensity against field, and contrast.

The contrast between two peak intensities is ``(I_hi - I_lo)/(I_hi + I_lo)``
taken in grid order, so it is signed.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import fwm
from .errors import OutOfRangeError, PhysicsError, UndefinedContrastError, annotate
from .params import SystemParams
from .steady import solve_steady, steady_vs_field

DEFAULT_THRESHOLD = 0.01
#: Contrast grid: five consecutive 1e-11 T steps from zero field.
DEFAULT_B_STEP = 1e-11
DEFAULT_B_STEPS = 5
STEP_RANGE = (1e-13, 1e-6)
_SCAN_PER_DECADE = 8
_BISECT_RTOL = 1e-6


def default_b_grid(step: float = DEFAULT_B_STEP, steps: int = DEFAULT_B_STEPS) -> np.ndarray:
    return step * np.arange(steps + 1)


def contrast(i_next: float, i_prev: float) -> float:
    """Signed contrast of ``i_next`` relative to ``i_prev``."""
    total = i_next + i_prev
    if total == 0:
        raise UndefinedContrastError("both peak intensities are zero")
    return (i_next - i_prev) / total


def pairwise_contrasts(values) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    nxt, prev = values[1:], values[:-1]
    total = nxt + prev
    if np.any(total == 0):
        raise UndefinedContrastError("both peak intensities are zero in a pair")
    return (nxt - prev) / total


def imax_vs_field(params: SystemParams, b_grid, omega_grid=None) -> list[tuple[float, float]]:
    """Peak FWM intensity at each field, with steady-state continuation."""
    rows = []
    for b_field, state in steady_vs_field(params, b_grid):
        try:
            i_max, _ = fwm.peak(params.replace(B=b_field), state, omega_grid)
        except PhysicsError as exc:
            raise annotate(exc, f"B = {b_field!r} T") from exc
        rows.append((b_field, i_max))
    return rows


@dataclass(frozen=True)
class ContrastReport:
    b_grid: list
    i_max_values: list
    pairwise_contrasts: list
    average_contrast: float
    resolvable_step: float | None
    threshold: float = DEFAULT_THRESHOLD


def _smallest_resolvable_step(b_grid, values, threshold):
    best = None
    for i in range(len(b_grid)):
        for j in range(i + 1, len(b_grid)):
            if abs(contrast(values[j], values[i])) >= threshold:
                step = abs(b_grid[j] - b_grid[i])
                best = step if best is None else min(best, step)
    return best


def contrast_report(
    params: SystemParams,
    b_grid=None,
    threshold: float = DEFAULT_THRESHOLD,
    omega_grid=None,
) -> ContrastReport:
    b_grid = default_b_grid() if b_grid is None else b_grid
    b_grid = [float(b) for b in b_grid]
    if len(b_grid) < 2:
        raise ValueError("contrast needs at least two field values")
    values = [i for _, i in imax_vs_field(params, b_grid, omega_grid)]
    etas = pairwise_contrasts(values)
    return ContrastReport(
        b_grid=b_grid,
        i_max_values=values,
        pairwise_contrasts=[float(e) for e in etas],
        average_contrast=float(np.mean(np.abs(etas))),
        resolvable_step=_smallest_resolvable_step(b_grid, values, threshold),
        threshold=threshold,
    )


@dataclass
class Sweep2D:
    b_grid: list
    j_grid: list
    i_max: np.ndarray  # shape (len(b_grid), len(j_grid)); NaN marks a failed cell
    column_contrast: list  # mean |contrast| per J column, NaN if undefined
    errors: dict = field(default_factory=dict)  # (i_b, i_j) -> message


def _column(args):
    params, b_grid, omega_grid = args
    values, errors = [], {}
    seed = None
    for i, b_field in enumerate(b_grid):
        cell = params.replace(B=b_field)
        try:
            state = solve_steady(cell, seed=seed)
            seed = state.N1
            values.append(fwm.peak(cell, state, omega_grid)[0])
        except PhysicsError as exc:
            values.append(math.nan)
            errors[i] = str(exc)
    return values, errors


def worker_count() -> int:
    """Worker cap from ``PTCOMS_THREADS`` (0 or unset = one per CPU)."""
    raw = os.environ.get("PTCOMS_THREADS", "0").strip() or "0"
    n = int(raw)
    if n <= 0:
        return os.cpu_count() or 1
    return n


def sweep_2d(params: SystemParams, b_grid, j_grid, omega_grid=None, workers: int = 1) -> Sweep2D:
    """Peak intensity over the (B, J) lattice; columns run in parallel."""
    b_grid = [float(b) for b in b_grid]
    j_grid = [float(j) for j in j_grid]
    if not b_grid or not j_grid:
        raise ValueError("both grids must be nonempty")
    jobs = [(params.replace(J=j), b_grid, omega_grid) for j in j_grid]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            columns = list(pool.map(_column, jobs))
    else:
        columns = [_column(job) for job in jobs]

    matrix = np.array([col for col, _ in columns], dtype=float).T
    errors = {(i, jj): msg for jj, (_, errs) in enumerate(columns) for i, msg in errs.items()}
    column_contrast = []
    for jj in range(len(j_grid)):
        col = matrix[:, jj]
        if len(col) < 2 or np.any(~np.isfinite(col)):
            column_contrast.append(math.nan)
            continue
        try:
            column_contrast.append(float(np.mean(np.abs(pairwise_contrasts(col)))))
        except UndefinedContrastError:
            column_contrast.append(math.nan)
    return Sweep2D(b_grid, j_grid, matrix, column_contrast, errors)


def sensitivity_estimate(
    params: SystemParams,
    threshold: float = DEFAULT_THRESHOLD,
    omega_grid=None,
    step_range=STEP_RANGE,
) -> float:
    """Smallest field step above zero field whose contrast reaches ``threshold``.

    The step is scanned on a log grid for the first crossing, which is then
    bisected in log space.
    """
    base = params.replace(B=0.0)
    i0 = fwm.peak(base, solve_steady(base), omega_grid)[0]

    def level(step):
        shifted = params.replace(B=step)
        i1 = fwm.peak(shifted, solve_steady(shifted), omega_grid)[0]
        return abs(contrast(i1, i0))

    lo_exp, hi_exp = (math.log10(s) for s in step_range)
    n = int(round((hi_exp - lo_exp) * _SCAN_PER_DECADE)) + 1
    exps = np.linspace(lo_exp, hi_exp, n)
    if level(10**exps[0]) >= threshold:
        raise OutOfRangeError(f"contrast already exceeds {threshold} at the smallest step {10**exps[0]:.1e} T")
    lo = exps[0]
    for e in exps[1:]:
        if level(10**e) >= threshold:
            hi = e
            break
        lo = e
    else:
        raise OutOfRangeError(f"contrast stays below {threshold} up to {10**exps[-1]:.1e} T")

    while hi - lo > _BISECT_RTOL / math.log(10):
        mid = 0.5 * (lo + hi)
        if level(10**mid) >= threshold:
            hi = mid
        else:
            lo = mid
    return float(10**hi)
