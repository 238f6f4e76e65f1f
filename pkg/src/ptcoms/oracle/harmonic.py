"""Multi-harmonic balance of the perturbation equations about the steady state.

The fluctuations are expanded as

    da1 = sum_k c_k e^{-ik Omega t},  da2 = sum_k d_k e^{-ik Omega t},
    dx  = sum_k X_k e^{-ik Omega t},  X_{-k} = conj(X_k),

for |k| <= order, keeping the quadratic products da1*dx and |da1|^2 and
truncating their convolutions at the same order. The resulting algebraic
system is solved by Newton iteration on the real and imaginary parts.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConvergenceError, DomainError
from ..params import SystemParams
from ..steady import SteadyState

DEFAULT_ORDER = 3
DEFAULT_PROBE_RATIO = 1e-3
RESIDUAL_GATE = 1e-8
_FD_STEP = 1e-3  # central differences are exact for a quadratic residual


@dataclass(frozen=True)
class HarmonicSolution:
    """First-harmonic coefficients per unit probe amplitude."""

    A1_u: complex
    A1_l: complex
    A2_u: complex
    A2_l: complex
    X1: complex
    X1_conj_partner: complex  # coefficient of e^{+i Omega t} in dx
    order: int
    residual_norm: float
    iterations: int = 0
    harmonics: dict = field(default_factory=dict, repr=False)


class _System:
    def __init__(self, params, state, omega, order, probe_ratio, include_products):
        self.p = params
        self.order = order
        self.n = 2 * order + 1
        self.k = np.arange(-order, order + 1)
        self.omega = omega
        self.a1s = state.a1s
        self.delta = state.Delta
        self.products = include_products
        self.eps_p = probe_ratio * params.epsilon_d
        self.drive = np.zeros(self.n, complex)
        self.drive[order + 1] = params.input_rate * self.eps_p

        # unknown scales: cavity amplitudes ~ drive / kappa, displacement ~
        # static response to the corresponding radiation-pressure force
        self.sa = max(abs(self.drive[order + 1]) / params.kappa_a, 1e-300)
        force = params.hbar * abs(params.G) * max(abs(self.a1s), 1.0) * self.sa / params.mass
        self.sx = max(force / (params.gamma_m * params.omega_m), 1e-300)

    def _trunc(self, full):
        return full[self.order : self.order + self.n]

    def terms(self, c, d, x):
        """Per-equation term lists; each equation is the sum of its terms."""
        p, ko = self.p, self.k * self.omega
        coupling = -1j * p.G
        conv_cx = self._trunc(np.convolve(c, x)) if self.products else 0.0 * c
        c_star = np.conj(c[::-1])  # index k holds conj(c_{-k})
        conv_cc = self._trunc(np.convolve(c_star, c)) if self.products else 0.0 * c
        eq_c = [
            1j * ko * c,
            (1j * self.delta - 0.5 * p.kappa_a) * c,
            -1j * p.J * d,
            coupling * self.a1s * x,
            coupling * conv_cx,
            self.drive,
        ]
        eq_d = [1j * ko * d, (1j * p.Delta_a + 0.5 * p.g_a) * d, -1j * p.J * c]
        opto = p.hbar * p.G / p.mass
        eq_x = [
            (p.omega_m**2 - ko**2 - 1j * p.gamma_m * ko) * x,
            opto * (self.a1s * c_star + np.conj(self.a1s) * c),
            opto * conv_cc,
        ]
        return eq_c, eq_d, eq_x

    def split(self, z):
        n = self.n
        y = z[: 3 * n] + 1j * z[3 * n :]
        return y[:n] * self.sa, y[n : 2 * n] * self.sa, y[2 * n :] * self.sx

    def residual(self, z):
        eq_c, eq_d, eq_x = self.terms(*self.split(z))
        p = self.p
        res = np.concatenate(
            [
                sum(eq_c) / (p.kappa_a * self.sa),
                sum(eq_d) / (p.kappa_a * self.sa),
                sum(eq_x) / (p.omega_m**2 * self.sx),
            ]
        )
        return np.concatenate([res.real, res.imag])

    def relative_residual(self, z):
        worst = 0.0
        for group in self.terms(*self.split(z)):
            total = np.abs(sum(group))
            scale = sum(np.abs(t) for t in group)
            mask = scale > 0
            if np.any(mask):
                worst = max(worst, float(np.max(total[mask] / scale[mask])))
        return worst

    def jacobian(self, z):
        cols = []
        for i in range(z.size):
            e = np.zeros_like(z)
            e[i] = _FD_STEP
            cols.append((self.residual(z + e) - self.residual(z - e)) / (2 * _FD_STEP))
        return np.column_stack(cols)


def harmonic_balance(
    params: SystemParams,
    state: SteadyState,
    Omega: float,
    order: int = DEFAULT_ORDER,
    probe_ratio: float = DEFAULT_PROBE_RATIO,
    include_products: bool = True,
    max_iter: int = 100,
) -> HarmonicSolution:
    """Solve the truncated harmonic system by Newton from the linear solution.

    With ``include_products=False`` the system is linear and the first
    Newton step is exact.
    """
    if order < 1:
        raise DomainError(f"order must be >= 1, got {order}")
    if not probe_ratio > 0:
        raise DomainError("probe_ratio must be positive")
    system = _System(params, state, float(Omega), int(order), probe_ratio, include_products)
    z = np.zeros(6 * system.n)

    linear = _System(params, state, float(Omega), int(order), probe_ratio, False)
    z = z - np.linalg.solve(linear.jacobian(z), linear.residual(z))

    iterations = 0
    rel = system.relative_residual(z)
    best = (rel, z)
    while rel > 1e-13 and iterations < max_iter:
        iterations += 1
        step = np.linalg.solve(system.jacobian(z), system.residual(z))
        z = z - step
        rel = system.relative_residual(z)
        if rel < best[0]:
            best = (rel, z)
        if np.max(np.abs(step)) <= 1e-15 * max(np.max(np.abs(z)), 1.0):
            break
    rel, z = best
    if rel >= RESIDUAL_GATE:
        raise ConvergenceError(
            f"harmonic balance did not converge in {max_iter} iterations "
            f"(relative residual {rel:.3e})",
            residual=rel,
        )

    c, d, x = system.split(z)
    o, eps = system.order, system.eps_p
    harmonics = {
        int(k): (c[i] / eps, d[i] / eps, x[i] / eps) for i, k in enumerate(system.k)
    }
    return HarmonicSolution(
        A1_u=complex(c[o + 1] / eps),
        A1_l=complex(c[o - 1] / eps),
        A2_u=complex(d[o + 1] / eps),
        A2_l=complex(d[o - 1] / eps),
        X1=complex(x[o + 1] / eps),
        X1_conj_partner=complex(x[o - 1] / eps),
        order=system.order,
        residual_norm=rel,
        iterations=iterations,
        harmonics=harmonics,
    )
