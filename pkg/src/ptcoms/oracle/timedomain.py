"""Direct integration of the full semiclassical equations with probe on.

State (scaled, real): a1 re/im, a2 re/im, x / x0, v / (x0 omega_m), with
x0 = kappa_a/|G| so that G*x is O(kappa_a). The integrator is an adaptive
Dormand-Prince 5(4) pair compiled with numba; it stops on every output
sample, so sideband projections use uniformly spaced samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from ..errors import DomainError, InstabilityError
from ..params import SystemParams
from ..pteigen import classify
from ..steady import solve_steady

DEFAULT_RTOL = 1e-9
SAMPLES_PER_PERIOD = 32
DEFAULT_HORIZON = 4000
FINAL_WINDOW = 20
SETTLE_RTOL = 1e-3
BLOWUP = 1e6

# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = np.array(
    [
        [0, 0, 0, 0, 0, 0],
        [1 / 5, 0, 0, 0, 0, 0],
        [3 / 40, 9 / 40, 0, 0, 0, 0],
        [44 / 45, -56 / 15, 32 / 9, 0, 0, 0],
        [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729, 0, 0],
        [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656, 0],
        [35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
    ]
)
_B5 = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0])
_B4 = np.array([5179 / 57600, 0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])


@dataclass
class TimeTrace:
    t_grid: np.ndarray
    a1: np.ndarray
    a2: np.ndarray
    x: np.ndarray
    settled: bool
    sideband_lower: complex  # per unit probe amplitude
    period_estimates: np.ndarray


@numba.njit(cache=True)
def _rhs(t, y, c):
    # c: delta_a, kappa, g, J, G_sign*kappa, omega_m, gamma_m, drive_d, drive_p,
    #    Omega, ramp, force_per_photon, static_force
    delta_a, kappa, g, J, gk = c[0], c[1], c[2], c[3], c[4]
    wm, gm, ed, ep, om, ramp = c[5], c[6], c[7], c[8], c[9], c[10]
    fphot, fstat = c[11], c[12]
    a1 = y[0] + 1j * y[1]
    a2 = y[2] + 1j * y[3]
    xs, vs = y[4], y[5]
    s = 1.0
    if t < ramp:
        s = math.sin(0.5 * math.pi * t / ramp) ** 2
    probe = ep * s * (math.cos(om * t) - 1j * math.sin(om * t))
    da1 = (1j * delta_a - 1j * gk * xs - 0.5 * kappa) * a1 - 1j * J * a2 + ed + probe
    da2 = (1j * delta_a + 0.5 * g) * a2 - 1j * J * a1
    n1 = a1.real * a1.real + a1.imag * a1.imag
    out = np.empty(6)
    out[0] = da1.real
    out[1] = da1.imag
    out[2] = da2.real
    out[3] = da2.imag
    out[4] = wm * vs
    out[5] = -gm * vs - wm * xs - fphot * n1 - fstat
    return out


@numba.njit(cache=True)
def _integrate(y0, t_out, c, rtol, atol, blowup, A, B5, B4, C):
    n_out = t_out.size
    out = np.empty((n_out, 6))
    y = y0.copy()
    t = 0.0
    norm0 = np.sqrt(np.sum((y0 / atol) ** 2)) * rtol
    h = (t_out[1] - t_out[0]) * 0.25
    k = np.empty((7, 6))
    status = 0
    out[0] = y
    for i in range(1, n_out):
        t_end = t_out[i]
        while t < t_end:
            if h > t_end - t:
                h_try = t_end - t
                clipped = True
            else:
                h_try = h
                clipped = False
            k[0] = _rhs(t, y, c)
            for s in range(1, 7):
                ys = y.copy()
                for j in range(s):
                    ys += h_try * A[s, j] * k[j]
                k[s] = _rhs(t + C[s] * h_try, ys, c)
            y5 = y.copy()
            y4 = y.copy()
            for s in range(7):
                y5 += h_try * B5[s] * k[s]
                y4 += h_try * B4[s] * k[s]
            scale = atol + rtol * np.maximum(np.abs(y), np.abs(y5))
            err = np.sqrt(np.mean(((y5 - y4) / scale) ** 2))
            if err <= 1.0:
                t += h_try
                y = y5
                factor = 5.0 if err == 0.0 else min(5.0, 0.9 * err ** (-0.2))
                if not clipped:
                    h = h_try * factor
            else:
                h = h_try * max(0.2, 0.9 * err ** (-0.2))
            if h < 1e-14 * t_end:
                return out[:i], 2
        out[i] = y
        if np.sqrt(np.sum((y / atol) ** 2)) * rtol > blowup * norm0:
            return out[: i + 1], 1
    return out, status


def integrate_time_domain(
    params: SystemParams,
    Omega: float,
    probe_ratio: float = 0.01,
    horizon_periods: int = DEFAULT_HORIZON,
    rtol: float = DEFAULT_RTOL,
    samples_per_period: int = SAMPLES_PER_PERIOD,
    window: int = FINAL_WINDOW,
) -> TimeTrace:
    """Integrate from the probe-free steady state with the probe switched on.

    The probe is ramped on over half a beat period. The lower-sideband
    amplitude is the projection of ``a1`` onto ``e^{+i Omega t}`` over the
    last ``window`` beat periods, divided by the probe amplitude.
    """
    if not 0 < probe_ratio <= 0.1:
        raise DomainError("probe_ratio must lie in (0, 0.1]")
    if horizon_periods < 50:
        raise DomainError("horizon_periods must be >= 50")
    if window < 2 or window > horizon_periods:
        raise DomainError("window must be in [2, horizon_periods]")

    state = solve_steady(params)
    x0 = params.kappa_a / abs(params.G) if params.G else 1e-12
    stiffness_x0 = params.mass * x0 * params.omega_m
    eps_p = probe_ratio * params.epsilon_d
    period = 2 * math.pi / Omega
    consts = np.array(
        [
            params.Delta_a,
            params.kappa_a,
            params.g_a,
            params.J,
            params.G * x0,
            params.omega_m,
            params.gamma_m,
            params.input_rate * params.epsilon_d,
            params.input_rate * eps_p,
            Omega,
            0.5 * period,
            params.hbar * params.G / stiffness_x0,
            params.B * params.zeta / stiffness_x0,
        ]
    )
    y0 = np.array(
        [state.a1s.real, state.a1s.imag, state.a2s.real, state.a2s.imag, state.x_s / x0, 0.0]
    )
    amp_scale = max(abs(state.a1s), abs(state.a2s), 1e-3)
    x_scale = max(abs(y0[4]), 1e-12)
    atol = np.array([amp_scale] * 4 + [x_scale] * 2) * rtol

    n_samples = horizon_periods * samples_per_period + 1
    t_out = np.linspace(0.0, horizon_periods * period, n_samples)
    out, status = _integrate(y0, t_out, consts, rtol, atol, BLOWUP, _A, _B5, _B4, _C)
    if status == 1:
        phase = classify(params).value
        raise InstabilityError(
            f"trajectory grew beyond {BLOWUP:.0e} x its initial norm "
            f"(PT phase: {phase}, J = {params.J / params.kappa_a:.3g} kappa_a)"
        )
    if status == 2:
        raise InstabilityError("step size underflow; the dynamics are too stiff or unstable")

    t = t_out
    a1 = out[:, 0] + 1j * out[:, 1]
    a2 = out[:, 2] + 1j * out[:, 3]
    x = out[:, 4] * x0

    projected = a1[:-1] * np.exp(-1j * Omega * t[:-1])
    per_period = projected.reshape(horizon_periods, samples_per_period).mean(axis=1) / eps_p
    last, prev = per_period[-1], per_period[-2]
    settled = bool(abs(last - prev) < SETTLE_RTOL * abs(last)) if last != 0 else bool(prev == 0)
    sideband = complex(per_period[-window:].mean())
    return TimeTrace(t, a1, a2, x, settled, sideband, per_period)
