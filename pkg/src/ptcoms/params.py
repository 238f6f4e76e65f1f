"""Physical parameter set of the gain-loss cavity optomechanical magnetometer.

SI units are used throughout, with every frequency stored as an angular
frequency in rad/s. Values given as ``2*pi x f`` are multiplied out
when the parameter set is built.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from pathlib import Path

from scipy import constants

from .errors import ConfigError, DomainError

TWO_PI = 2.0 * math.pi

#: Electromagnetic coupling per unit surface current, anchored at 1 mA.
ZETA_PER_MILLIAMP = 2e-5

#: Fields stored in rad/s (G in rad/(s m)); the config file takes them as
#: either ``<name>_hz`` or ``<name>_rad_s``.
ANGULAR_FIELDS = ("omega_m", "gamma_m", "kappa_a", "g_a", "J", "Delta_a")
COUPLING_FIELD = "G"
PLAIN_FIELDS = ("mass", "eta_c", "P_d", "lambda_d", "zeta", "B", "hbar", "c")


@dataclass(frozen=True)
class SystemParams:
    """Device and drive parameters, immutable once built.

    Use :func:`dataclasses.replace` (or :meth:`replace`) to derive variants.
    """

    omega_m: float
    mass: float
    G: float
    gamma_m: float
    kappa_a: float
    g_a: float
    J: float = 0.0
    Delta_a: float = 0.0
    eta_c: float = 0.5
    P_d: float = 1e-12
    lambda_d: float = 532e-9
    zeta: float = ZETA_PER_MILLIAMP
    B: float = 0.0
    hbar: float = constants.hbar
    c: float = constants.c

    @property
    def omega_d(self) -> float:
        """Drive angular frequency 2 pi c / lambda_d."""
        return TWO_PI * self.c / self.lambda_d

    @property
    def epsilon_d(self) -> float:
        """Drive amplitude sqrt(P_d / (hbar omega_d)) in s^-1/2."""
        return math.sqrt(self.P_d / (self.hbar * self.omega_d))

    @property
    def input_rate(self) -> float:
        """Input coupling sqrt(eta_c kappa_a)."""
        return math.sqrt(self.eta_c * self.kappa_a)

    def replace(self, **changes) -> "SystemParams":
        return dataclasses.replace(self, **changes)


def paper_defaults() -> SystemParams:
    """Reference device: 0.1 MHz, 100 pg oscillator, 532 nm drive at 1 pW."""
    omega_m = TWO_PI * 0.1e6
    kappa_a = 0.1 * omega_m
    return SystemParams(
        omega_m=omega_m,
        mass=100e-15,
        G=-TWO_PI * 11e6 / 1e-9,
        gamma_m=TWO_PI * 0.1e3,
        kappa_a=kappa_a,
        g_a=kappa_a,
        J=0.0,
        Delta_a=0.0,
        eta_c=0.5,
        P_d=1e-12,
        lambda_d=532e-9,
        zeta=ZETA_PER_MILLIAMP,
        B=0.0,
    )


def scale_zeta(params: SystemParams, current: float) -> SystemParams:
    """Return ``params`` with zeta set for a surface current in amperes."""
    if not current > 0:
        raise DomainError(f"current must be positive, got {current!r} A")
    return params.replace(zeta=ZETA_PER_MILLIAMP * (current / 1e-3))


def validate(params: SystemParams) -> list[str]:
    """List every violated invariant as ``"<field>: <rule>"``; empty if valid."""
    problems = []
    for name in ANGULAR_FIELDS + (COUPLING_FIELD,) + PLAIN_FIELDS:
        value = getattr(params, name)
        if not isinstance(value, (int, float)) or not math.isfinite(value):
            problems.append(f"{name}: must be a finite number")
    if problems:
        return problems

    for name in ("omega_m", "gamma_m", "kappa_a", "g_a"):
        if getattr(params, name) <= 0:
            problems.append(f"{name}: rate must be strictly positive")
    if params.J < 0:
        problems.append("J: tunneling coupling must be >= 0")
    if params.mass <= 0:
        problems.append("mass: must be strictly positive")
    if not 0 < params.eta_c <= 1:
        problems.append("eta_c: must lie in (0, 1]")
    if params.P_d < 0:
        problems.append("P_d: drive power must be >= 0")
    if params.lambda_d <= 0:
        problems.append("lambda_d: wavelength must be strictly positive")
    if params.hbar <= 0:
        problems.append("hbar: must be strictly positive")
    if params.c <= 0:
        problems.append("c: must be strictly positive")
    if not problems and not math.isfinite(params.epsilon_d):
        problems.append("P_d: derived drive amplitude is not finite")
    return problems


def _frequency_keys(name: str) -> tuple[str, str]:
    if name == COUPLING_FIELD:
        return "G_hz_per_m", "G_rad_s_per_m"
    return f"{name}_hz", f"{name}_rad_s"


def parse_config(text: str, base: SystemParams | None = None) -> SystemParams:
    """Parse ``key = value`` lines over ``base`` (reference defaults if omitted).

    Frequency-like fields must be given in exactly one of their two forms;
    ``_hz`` values are multiplied by 2 pi.
    """
    base = paper_defaults() if base is None else base
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value

    def number(key):
        try:
            return float(raw.pop(key))
        except ValueError as exc:
            raise ConfigError(f"{key}: not a number") from exc

    changes = {}
    for name in ANGULAR_FIELDS + (COUPLING_FIELD,):
        hz_key, rad_key = _frequency_keys(name)
        if hz_key in raw and rad_key in raw:
            raise ConfigError(f"{name}: give either {hz_key} or {rad_key}, not both")
        if hz_key in raw:
            changes[name] = TWO_PI * number(hz_key)
        elif rad_key in raw:
            changes[name] = number(rad_key)
    for name in PLAIN_FIELDS:
        if name in raw:
            changes[name] = number(name)
    if raw:
        raise ConfigError(f"unknown key(s): {', '.join(sorted(raw))}")

    params = base.replace(**changes)
    problems = validate(params)
    if problems:
        raise ConfigError("invalid parameters: " + "; ".join(problems))
    return params


def load_config(path, base: SystemParams | None = None) -> SystemParams:
    return parse_config(Path(path).read_text(), base)


def dump_config(params: SystemParams) -> str:
    """Serialise to the config format; floats use shortest round-trip repr."""
    lines = ["# ptcoms parameter file (SI units, angular frequencies in rad/s)"]
    for name in ANGULAR_FIELDS + (COUPLING_FIELD,):
        lines.append(f"{_frequency_keys(name)[1]} = {float(getattr(params, name))!r}")
    for name in PLAIN_FIELDS:
        lines.append(f"{name} = {float(getattr(params, name))!r}")
    return "\n".join(lines) + "\n"
