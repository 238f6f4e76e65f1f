import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ptcoms.errors import ConfigError, DomainError
from ptcoms.params import dump_config, load_config, paper_defaults, parse_config, scale_zeta, validate


def test_defaults_in_angular_units(defaults):
    assert defaults.omega_m == pytest.approx(6.2832e5, rel=1e-4)
    assert defaults.kappa_a == pytest.approx(6.2832e4, rel=1e-4)
    assert defaults.G == pytest.approx(-6.9115e16, rel=1e-4)
    assert defaults.gamma_m == pytest.approx(2 * math.pi * 100)
    assert defaults.g_a == defaults.kappa_a
    assert defaults.J == 0 and defaults.Delta_a == 0 and defaults.B == 0
    assert defaults.eta_c == 0.5


def test_drive_amplitude_by_hand():
    # exact SI h and c folded by hand
    hbar = 6.62607015e-34 / (2 * math.pi)
    omega_d = 2 * math.pi * 299792458.0 / 532e-9
    expected = math.sqrt(1e-12 / (hbar * omega_d))
    assert expected == pytest.approx(1636.505427, rel=1e-9)
    assert paper_defaults().epsilon_d == pytest.approx(expected, rel=1e-12)
    assert paper_defaults().epsilon_d == pytest.approx(1.637e3, rel=1e-3)


def test_drive_power_identity(defaults):
    p = defaults
    assert p.epsilon_d**2 * p.hbar * p.omega_d == pytest.approx(p.P_d, rel=1e-12)


@pytest.mark.parametrize("current, zeta", [(1e-3, 2e-5), (3e-3, 6e-5)])
def test_scale_zeta(defaults, current, zeta):
    assert scale_zeta(defaults, current).zeta == pytest.approx(zeta, rel=1e-15)
    assert defaults.zeta == 2e-5


@pytest.mark.parametrize("current", [0.0, -1e-3])
def test_scale_zeta_rejects_nonpositive(defaults, current):
    with pytest.raises(DomainError):
        scale_zeta(defaults, current)


@given(st.floats(min_value=1e-9, max_value=1.0))
def test_scale_zeta_linear(current):
    p = paper_defaults()
    assert scale_zeta(p, 2 * current).zeta == 2 * scale_zeta(p, current).zeta


def test_validate(defaults):
    assert validate(defaults) == []
    assert [v.split(":")[0] for v in validate(defaults.replace(mass=0.0))] == ["mass"]
    assert [v.split(":")[0] for v in validate(defaults.replace(eta_c=1.5))] == ["eta_c"]
    assert validate(defaults.replace(J=-1.0))[0].startswith("J:")
    assert validate(defaults.replace(kappa_a=float("nan")))[0].startswith("kappa_a:")


def test_config_roundtrip_bit_exact(defaults, tmp_path):
    path = tmp_path / "defaults.cfg"
    path.write_text(dump_config(defaults))
    assert load_config(path) == defaults
    odd = defaults.replace(J=0.1234567890123 * defaults.kappa_a, B=3.3e-11, P_d=0.1e-12)
    assert parse_config(dump_config(odd)) == odd


def test_config_hz_and_comments(defaults):
    text = """
    # drive and tunneling
    J_hz = 5000.0   # 0.5 kappa_a / 2pi
    P_d = 1e-13
    """
    p = parse_config(text)
    assert p.J == pytest.approx(0.5 * defaults.kappa_a)
    assert p.P_d == 1e-13
    assert p.omega_m == defaults.omega_m


@pytest.mark.parametrize(
    "text",
    [
        "J_hz = 1\nJ_rad_s = 1",
        "omega_m = 1",
        "mass = heavy",
        "mass = 0",
        "no equals sign",
        "P_d = 1\nP_d = 2",
    ],
)
def test_config_errors(text):
    with pytest.raises(ConfigError):
        parse_config(text)
