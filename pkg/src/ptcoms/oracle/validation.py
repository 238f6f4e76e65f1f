"""Analytic sideband formula against the harmonic-balance oracle."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import PhysicsError
from ..fwm import fwm_amplitude
from ..params import SystemParams
from ..steady import solve_steady
from .harmonic import DEFAULT_ORDER, DEFAULT_PROBE_RATIO, harmonic_balance

GATE = 0.01


@dataclass
class ValidationPoint:
    omega_over_omega_m: float
    analytic_abs: float
    oracle_abs: float
    rel_dev: float


@dataclass
class ValidationReport:
    points: list
    max_rel_dev: float
    gate: float
    flagged: list = field(default_factory=list)  # omega/omega_m above the gate
    errors: dict = field(default_factory=dict)  # omega/omega_m -> message

    @property
    def passed(self) -> bool:
        return not self.flagged and not self.errors

    def to_dict(self) -> dict:
        return {
            "gate": self.gate,
            "max_rel_dev": self.max_rel_dev,
            "passed": self.passed,
            "points": [vars(p) for p in self.points],
            "flagged": self.flagged,
            "errors": {repr(k): v for k, v in self.errors.items()},
        }


def cross_validate(
    params: SystemParams,
    omega_grid,
    order: int = DEFAULT_ORDER,
    probe_ratio: float = DEFAULT_PROBE_RATIO,
    gate: float = GATE,
) -> ValidationReport:
    """Max relative deviation of |A1_l| between formula and oracle on a grid."""
    omega_grid = np.asarray(omega_grid, dtype=float)
    if omega_grid.size == 0:
        raise ValueError("omega_grid must be nonempty")
    state = solve_steady(params)
    points, flagged, errors = [], [], {}
    for omega in omega_grid:
        ratio = float(omega / params.omega_m)
        try:
            analytic = abs(fwm_amplitude(params, state, omega).A1_l_over_ep)
            oracle = abs(harmonic_balance(params, state, omega, order, probe_ratio).A1_l)
        except PhysicsError as exc:
            errors[ratio] = str(exc)
            continue
        if analytic > 0.0:
            dev = abs(analytic - oracle) / analytic
        else:
            dev = 0.0 if oracle == 0.0 else float("inf")
        points.append(ValidationPoint(ratio, analytic, oracle, dev))
        if dev > gate:
            flagged.append(ratio)
    max_dev = max((p.rel_dev for p in points), default=float("nan"))
    return ValidationReport(points, max_dev, gate, flagged, errors)
