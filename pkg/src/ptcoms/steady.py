"""Self-consistent steady state of the loss cavity, gain cavity and oscillator.

The radiation-pressure displacement shifts the loss-cavity detuning, which in
turn sets the photon number. Writing ``w = a*N1`` for the optomechanical
detuning shift (``a = hbar G^2 / (m omega_m^2)``) turns the self-consistency

    N1 * (Delta_eff(N1)**2 + kappa_eff**2 / 4) = eta_c kappa_a epsilon_d**2

into the monic cubic ``w^3 + 2 p w^2 + (p^2 + kappa_eff^2/4) w - a K = 0``
with ``Delta_eff = p + w``. Up to three admissible photon numbers exist
(optical bistability).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DivergenceError, DomainError, NoSteadyStateError, PhysicsError, annotate
from .params import SystemParams

#: Photon-number ceiling; beyond it the resonance is treated as divergent.
N1_CAP = 1e12

_CONTINUATION_STEPS = 80
_FOLD_JUMP = 0.5


@dataclass(frozen=True)
class SteadyState:
    a1s: complex
    a2s: complex
    x_s: float
    N1: float
    Delta_eff: float
    kappa_eff: float
    Delta: float
    branch_count: int
    B: float = 0.0


def _tunneling_denominator(params: SystemParams) -> float:
    den = params.Delta_a**2 + 0.25 * params.g_a**2
    if den == 0.0:
        raise DomainError("g_a = 0 with Delta_a = 0 makes the tunneling shift singular")
    return den


def effective_rates(params: SystemParams, x_s: float) -> tuple[float, float]:
    """Effective loss-cavity detuning and decay ``(Delta_eff, kappa_eff)``."""
    den = _tunneling_denominator(params)
    j2 = params.J**2
    delta_eff = params.Delta_a - (params.G * x_s + j2 * params.Delta_a / den)
    kappa_eff = params.kappa_a - j2 * params.g_a / den
    return delta_eff, kappa_eff


def displacement(params: SystemParams, n1: float) -> float:
    """Static displacement for photon number ``n1``."""
    return -(params.hbar * params.G * n1 + params.B * params.zeta) / (
        params.mass * params.omega_m**2
    )


@dataclass(frozen=True)
class _Cubic:
    a: float  # rad/s per photon
    p: float  # Delta_eff at N1 = 0
    kappa_eff: float
    K: float  # eta_c kappa_a eps_d^2

    def residual(self, u):
        return u * ((self.p + self.a * u) ** 2 + 0.25 * self.kappa_eff**2) - self.K


def _cubic(params: SystemParams, drive_scale: float = 1.0) -> _Cubic:
    den = _tunneling_denominator(params)
    stiffness = params.mass * params.omega_m**2
    d0 = params.Delta_a - params.J**2 * params.Delta_a / den
    _, kappa_eff = effective_rates(params, 0.0)
    return _Cubic(
        a=params.hbar * params.G**2 / stiffness,
        p=d0 + params.G * params.B * params.zeta / stiffness,
        kappa_eff=kappa_eff,
        K=drive_scale * params.eta_c * params.kappa_a * params.epsilon_d**2,
    )


def _monic_real_roots(b: float, c: float, d: float) -> list[float]:
    """Real roots of t^3 + b t^2 + c t + d via the depressed cubic."""
    shift = b / 3.0
    P = c - b * shift
    Q = 2.0 * shift**3 - shift * c + d
    disc = (0.5 * Q) ** 2 + (P / 3.0) ** 3
    if disc > 0:
        A = -math.copysign(np.cbrt(abs(0.5 * Q) + math.sqrt(disc)), Q)
        t = A - P / (3.0 * A) if A != 0.0 else 0.0
        roots = [t]
    elif P == 0.0:
        roots = [0.0]
    else:
        r = 2.0 * math.sqrt(-P / 3.0)
        arg = 3.0 * Q / (P * r)
        theta = math.acos(max(-1.0, min(1.0, arg))) / 3.0
        roots = [r * math.cos(theta - 2.0 * math.pi * k / 3.0) for k in range(3)]
    return [t - shift for t in roots]


def _polish(b, c, d, x):
    for _ in range(4):
        f = ((x + b) * x + c) * x + d
        df = (3.0 * x + 2.0 * b) * x + c
        if df == 0.0:
            break
        step = f / df
        x -= step
        if abs(step) <= 1e-15 * abs(x):
            break
    return x


def photon_number_roots(params: SystemParams, drive_scale: float = 1.0) -> list[float]:
    """All admissible (real, nonnegative) photon numbers, ascending."""
    cb = _cubic(params, drive_scale)
    if cb.K == 0.0:
        return [0.0]
    if cb.a == 0.0:
        denom = cb.p**2 + 0.25 * cb.kappa_eff**2
        if denom == 0.0:
            raise DivergenceError(
                "resonant divergence: Delta_eff = kappa_eff = 0 without optomechanics",
                u_at_min_detuning=math.inf,
            )
        return [cb.K / denom]

    scale = params.kappa_a
    b = 2.0 * cb.p / scale
    c = (cb.p**2 + 0.25 * cb.kappa_eff**2) / scale**2
    d = -cb.a * cb.K / scale**3
    roots = sorted(_polish(b, c, d, w) * scale / cb.a for w in _monic_real_roots(b, c, d))
    admissible = []
    for u in roots:
        if u < 0 or not math.isfinite(u):
            continue
        if admissible and abs(u - admissible[-1]) <= 1e-9 * u:
            continue
        admissible.append(u)
    return admissible


def _nearest(roots, target):
    return min(roots, key=lambda u: abs(u - target) / max(target, 1e-300))


def _jumped(u, target):
    return abs(u - target) > _FOLD_JUMP * max(target, 1e-300)


def _continued_root(params: SystemParams, roots: list[float]) -> float:
    """Follow the small-drive root at B = 0 up to full drive, then out to B."""
    zero_field = params.replace(B=0.0)
    u = photon_number_roots(zero_field, 1e-9)[0]
    for scale in np.geomspace(1e-9, 1.0, _CONTINUATION_STEPS)[1:]:
        candidates = photon_number_roots(zero_field, scale)
        nearest = _nearest(candidates, u)
        if len(candidates) > 1 and _jumped(nearest, u):
            return roots[0]
        u = nearest
    for b_field in np.linspace(0.0, params.B, _CONTINUATION_STEPS)[1:]:
        candidates = photon_number_roots(params.replace(B=float(b_field)))
        nearest = _nearest(candidates, u)
        if len(candidates) > 1 and _jumped(nearest, u):
            return roots[0]
        u = nearest
    return _nearest(roots, u)


def _check_cap(params: SystemParams, n1: float) -> None:
    if n1 > N1_CAP:
        cb = _cubic(params)
        u_min = max(-cb.p / cb.a, 0.0) if cb.a else math.inf
        raise DivergenceError(
            f"photon number {n1:.3e} exceeds cap {N1_CAP:.0e}; "
            f"|Delta_eff| is minimal at N1 = {u_min:.6e}",
            u_at_min_detuning=u_min,
        )


def state_from_photon_number(params: SystemParams, n1: float, branch_count: int = 1) -> SteadyState:
    """Assemble the full steady state from a self-consistent photon number."""
    x_s = displacement(params, n1)
    delta_eff, kappa_eff = effective_rates(params, x_s)
    a1s = -params.input_rate * params.epsilon_d / complex(-0.5 * kappa_eff, delta_eff)
    a2s = 1j * params.J * a1s / complex(0.5 * params.g_a, params.Delta_a)
    return SteadyState(
        a1s=a1s,
        a2s=a2s,
        x_s=x_s,
        N1=abs(a1s) ** 2,
        Delta_eff=delta_eff,
        kappa_eff=kappa_eff,
        Delta=params.Delta_a - params.G * x_s,
        branch_count=branch_count,
        B=params.B,
    )


def solve_steady(params: SystemParams, seed: float | None = None) -> SteadyState:
    """Steady state at ``params``.

    With several admissible roots, ``seed`` (a photon number from a nearby
    solution) picks the closest one; without a seed the root reached by
    continuation from weak drive at zero field is used, falling back to the
    smallest root across a fold.
    """
    roots = photon_number_roots(params)
    if not roots:
        raise NoSteadyStateError("self-consistency has no nonnegative real root")
    if len(roots) == 1:
        n1 = roots[0]
    elif seed is not None:
        n1 = _nearest(roots, seed)
        if _jumped(n1, seed):
            n1 = roots[0]
    else:
        n1 = _continued_root(params, roots)
    _check_cap(params, n1)
    return state_from_photon_number(params, n1, branch_count=len(roots))


def steady_vs_field(params: SystemParams, b_grid) -> list[tuple[float, SteadyState]]:
    """Steady states along a field grid, each seeded from its predecessor."""
    b_grid = [float(b) for b in b_grid]
    if not b_grid:
        raise ValueError("b_grid must be nonempty")
    rows = []
    seed = None
    for b_field in b_grid:
        try:
            state = solve_steady(params.replace(B=b_field), seed=seed)
        except PhysicsError as exc:
            raise annotate(exc, f"B = {b_field!r} T") from exc
        rows.append((b_field, state))
        seed = state.N1
    return rows


def residuals(params: SystemParams, state: SteadyState) -> dict[str, float]:
    """Relative residuals of the three steady-state equations at ``state``."""
    delta_eff, kappa_eff = effective_rates(params, state.x_s)
    drive = params.input_rate * params.epsilon_d
    r_a1 = abs(state.a1s * complex(-0.5 * kappa_eff, delta_eff) + drive) / drive if drive else 0.0
    coupling = 1j * params.J * state.a1s
    r_a2 = abs(state.a2s * complex(0.5 * params.g_a, params.Delta_a) - coupling)
    r_a2 = r_a2 / abs(coupling) if abs(coupling) else r_a2
    stiffness = params.mass * params.omega_m**2
    force = params.hbar * params.G * abs(state.a1s) ** 2 + params.B * params.zeta
    scale = abs(params.hbar * params.G * abs(state.a1s) ** 2) + abs(params.B * params.zeta)
    r_x = abs(state.x_s * stiffness + force) / scale if scale else abs(state.x_s)
    return {"a1": r_a1, "a2": r_a2, "x": r_x}
