"""Analytic lower first-order sideband (four-wave mixing) of the loss cavity."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import PoleError
from .params import SystemParams
from .steady import SteadyState, solve_steady

#: Default probe-detuning window around the mechanical sideband.
GRID_SPAN = (0.90, 1.10)
GRID_POINTS = 2001
PEAK_XTOL = 1e-6  # in units of omega_m
POLE_FLOOR = 1e-30


@dataclass(frozen=True)
class SidebandSolution:
    Omega: float
    A1_l_over_ep: complex
    I_FWM: float
    D: complex
    D1: complex
    D2: complex
    D3: complex
    D4: complex
    A1_l: complex | None = None  # absolute amplitude, only when eps_p is given


@dataclass(frozen=True)
class SpectrumResult:
    points: list
    I_max: float
    Omega_at_max: float
    state: SteadyState | None = None

    @property
    def omega(self) -> np.ndarray:
        return np.array([pt.Omega for pt in self.points])

    @property
    def intensity(self) -> np.ndarray:
        return np.array([pt.I_FWM for pt in self.points])


def default_grid(params: SystemParams, points: int = GRID_POINTS) -> np.ndarray:
    return params.omega_m * np.linspace(*GRID_SPAN, points)


def denominators(params: SystemParams, state: SteadyState, omega):
    """D1..D4 and the composite D as arrays over ``omega``."""
    omega = np.asarray(omega, dtype=float)
    delta, delta_a, j2 = state.Delta, params.Delta_a, params.J**2
    shifted = 0.5j * params.g_a + omega
    half_kappa = 0.5j * params.kappa_a
    d1 = delta - delta_a * j2 / (delta_a**2 - shifted**2)
    d2 = (delta + (half_kappa - omega)) - j2 / (delta_a - shifted)
    d3 = (delta - (half_kappa - omega)) - j2 / (delta_a + shifted)
    d4 = params.omega_m**2 - omega**2 + 1j * params.gamma_m * omega
    # mechanical-optical product first; it dominates the optomechanical term
    d = params.mass * d2 * d3 * d4
    d = d + 2.0 * abs(state.a1s) ** 2 * params.G**2 * params.hbar * d1
    return d, d1, d2, d3, d4


def _pole_scale(params: SystemParams) -> float:
    return params.mass * params.kappa_a**2 * params.omega_m**2


def lower_sideband(params: SystemParams, state: SteadyState, omega):
    """Vectorised ``(A1_l / eps_p, I_FWM, D, D1, D2, D3, D4)`` over ``omega``."""
    d, d1, d2, d3, d4 = denominators(params, state, omega)
    small = np.abs(d) < POLE_FLOOR * _pole_scale(params)
    if np.any(small):
        where = np.atleast_1d(np.asarray(omega, dtype=float))[np.atleast_1d(small)][0]
        raise PoleError(f"D(Omega) vanishes at Omega = {where!r} rad/s", omega=float(where))
    numerator = 1j * state.a1s**2 * params.G**2 * params.hbar * params.input_rate
    amplitude = numerator / d
    intensity = np.abs(params.input_rate * amplitude) ** 2
    return amplitude, intensity, d, d1, d2, d3, d4


def fwm_amplitude(
    params: SystemParams,
    state: SteadyState,
    Omega: float,
    epsilon_p: float | None = None,
) -> SidebandSolution:
    """Lower-sideband solution at one probe detuning.

    Everything except the optional absolute amplitude is computed in ratio
    form and does not depend on ``epsilon_p``.
    """
    if epsilon_p is not None and not epsilon_p > 0:
        raise ValueError("epsilon_p must be positive")
    amp, inten, d, d1, d2, d3, d4 = lower_sideband(params, state, float(Omega))
    return SidebandSolution(
        Omega=float(Omega),
        A1_l_over_ep=complex(amp),
        I_FWM=float(inten),
        D=complex(d),
        D1=complex(d1),
        D2=complex(d2),
        D3=complex(d3),
        D4=complex(d4),
        A1_l=None if epsilon_p is None else complex(amp) * epsilon_p,
    )


def _refine_peak(params, state, omega, intensity):
    k = int(np.argmax(intensity))
    if k == 0 or k == len(omega) - 1:
        return float(intensity[k]), float(omega[k])

    def negative(o):
        return -float(lower_sideband(params, state, o)[1])

    res = minimize_scalar(
        negative,
        bracket=(omega[k - 1], omega[k], omega[k + 1]),
        method="golden",
        options={"xtol": PEAK_XTOL * params.omega_m / omega[k]},
    )
    if -res.fun >= intensity[k]:
        return float(-res.fun), float(res.x)
    return float(intensity[k]), float(omega[k])


def spectrum(
    params: SystemParams,
    omega_grid=None,
    state: SteadyState | None = None,
) -> SpectrumResult:
    """FWM intensity over ``omega_grid`` and its golden-section refined peak."""
    omega = default_grid(params) if omega_grid is None else np.asarray(omega_grid, dtype=float)
    if omega.size == 0:
        raise ValueError("omega_grid must be nonempty")
    if np.any(np.diff(omega) <= 0):
        raise ValueError("omega_grid must be strictly ascending")
    state = solve_steady(params) if state is None else state
    amp, inten, d, d1, d2, d3, d4 = lower_sideband(params, state, omega)
    points = [
        SidebandSolution(float(o), complex(a), float(i), complex(dd), complex(e1), complex(e2), complex(e3), complex(e4))
        for o, a, i, dd, e1, e2, e3, e4 in zip(omega, amp, inten, d, d1, d2, d3, d4)
    ]
    i_max, omega_max = _refine_peak(params, state, omega, inten)
    return SpectrumResult(points=points, I_max=i_max, Omega_at_max=omega_max, state=state)


def peak(params: SystemParams, state: SteadyState | None = None, omega_grid=None) -> tuple[float, float]:
    """``(I_max, Omega_at_max)`` without materialising per-point records."""
    omega = default_grid(params) if omega_grid is None else np.asarray(omega_grid, dtype=float)
    state = solve_steady(params) if state is None else state
    intensity = lower_sideband(params, state, omega)[1]
    return _refine_peak(params, state, omega, intensity)
