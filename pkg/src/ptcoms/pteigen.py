"""Eigenfrequencies of the linear gain-loss cavity pair and PT phase labels."""

from __future__ import annotations

import cmath
import enum
import itertools
from dataclasses import dataclass

import numpy as np

from .params import SystemParams

EP_TOLERANCE = 1e-9


class Phase(enum.Enum):
    UNBROKEN = "Unbroken"
    BROKEN = "Broken"
    EXCEPTIONAL_POINT = "ExceptionalPoint"


@dataclass(frozen=True)
class EigenPair:
    omega_plus: complex
    omega_minus: complex
    phase: Phase

    def swapped(self) -> "EigenPair":
        return EigenPair(self.omega_minus, self.omega_plus, self.phase)


def mode_matrix(params: SystemParams) -> np.ndarray:
    """Matrix M of i d/dt (a1, a2) = M (a1, a2) with drive and optomechanics off."""
    return np.array(
        [
            [-params.Delta_a - 0.5j * params.kappa_a, params.J],
            [params.J, -params.Delta_a + 0.5j * params.g_a],
        ]
    )


def exceptional_coupling(params: SystemParams) -> float:
    """Tunneling rate (kappa_a + g_a)/4 at which the two modes coalesce."""
    return 0.25 * (params.kappa_a + params.g_a)


def classify(params: SystemParams) -> Phase:
    j_ep = exceptional_coupling(params)
    if abs(params.J - j_ep) < EP_TOLERANCE * params.kappa_a:
        return Phase.EXCEPTIONAL_POINT
    return Phase.UNBROKEN if params.J > j_ep else Phase.BROKEN


def eigenfrequencies(params: SystemParams) -> EigenPair:
    centre = -params.Delta_a + 0.25j * (params.g_a - params.kappa_a)
    split = cmath.sqrt(params.J**2 - exceptional_coupling(params) ** 2)
    return EigenPair(centre + split, centre - split, classify(params))


def phase_diagram(params: SystemParams, j_grid) -> list[tuple[float, EigenPair]]:
    """Eigenfrequencies along an ascending J grid.

    The +/- labels follow continuity: at each step the assignment with the
    smaller total jump from the previous point wins.
    """
    j_grid = [float(j) for j in j_grid]
    if not j_grid:
        raise ValueError("j_grid must be nonempty")
    if any(b < a for a, b in itertools.pairwise(j_grid)):
        raise ValueError("j_grid must be ascending")

    rows = []
    previous = None
    for j in j_grid:
        pair = eigenfrequencies(params.replace(J=j))
        if previous is not None:
            keep = abs(pair.omega_plus - previous.omega_plus) + abs(
                pair.omega_minus - previous.omega_minus
            )
            swap = abs(pair.omega_minus - previous.omega_plus) + abs(
                pair.omega_plus - previous.omega_minus
            )
            if swap < keep:
                pair = pair.swapped()
        rows.append((j, pair))
        previous = pair
    return rows
