import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ptcoms import fwm, sensing
from ptcoms.errors import OutOfRangeError, UndefinedContrastError
from ptcoms.params import scale_zeta
from ptcoms.steady import steady_vs_field


def test_contrast_examples():
    assert sensing.contrast(2.0, 2.0) == 0.0
    assert sensing.contrast(3.0, 1.0) == 0.5
    assert sensing.contrast(1.0, 3.0) == -0.5
    with pytest.raises(UndefinedContrastError):
        sensing.contrast(0.0, 0.0)


positive = st.floats(min_value=1e-30, max_value=1e30, allow_nan=False, allow_infinity=False)


@given(positive, positive)
def test_contrast_antisymmetric_and_bounded(a, b):
    assert sensing.contrast(a, b) == -sensing.contrast(b, a)
    assert -1.0 <= sensing.contrast(a, b) <= 1.0


@given(positive, positive)
def test_contrast_scale_free(a, b):
    assert sensing.contrast(7.3 * a, 7.3 * b) == pytest.approx(sensing.contrast(a, b), abs=1e-12)


def test_pairwise_contrasts_vector():
    etas = sensing.pairwise_contrasts([1.0, 3.0, 3.0, 1.0])
    assert etas.tolist() == [0.5, 0.0, -0.5]
    with pytest.raises(UndefinedContrastError):
        sensing.pairwise_contrasts([1.0, 0.0, 0.0])


def test_default_grid():
    grid = sensing.default_b_grid()
    assert grid.tolist() == pytest.approx([0, 1e-11, 2e-11, 3e-11, 4e-11, 5e-11], abs=1e-25)


def test_report_contents(pt):
    report = sensing.contrast_report(pt)
    assert len(report.i_max_values) == 6 and len(report.pairwise_contrasts) == 5
    assert report.average_contrast == pytest.approx(np.mean(np.abs(report.pairwise_contrasts)))
    assert report.resolvable_step == pytest.approx(1e-11)
    assert report.i_max_values[0] == pytest.approx(fwm.peak(pt)[0], rel=1e-12)


def test_report_unresolvable_step(defaults):
    report = sensing.contrast_report(defaults, [0.0, 1e-13], threshold=0.5)
    assert report.resolvable_step is None
    with pytest.raises(ValueError):
        sensing.contrast_report(defaults, [0.0])


def test_imax_increases_with_field_at_exceptional_point(pt):
    rows = sensing.imax_vs_field(pt, np.linspace(1e-11, 1e-10, 10))
    assert np.all(np.diff([i for _, i in rows]) > 0)


def test_imax_falls_before_sideband_resonance(defaults):
    fields = np.linspace(1e-9, 5e-8, 20)[:6]
    values = [i for _, i in sensing.imax_vs_field(defaults, fields)]
    assert np.all(np.diff(values) < 0)


def test_imax_bump_sits_at_red_sideband(defaults):
    # the decay of I_max with field pauses where Delta_eff sweeps through -omega_m
    fields = np.linspace(1e-9, 5e-8, 20)
    values = np.array([i for _, i in sensing.imax_vs_field(defaults, fields)])
    rises = np.flatnonzero(np.diff(values) > 0)
    assert rises.size > 0
    delta = np.array([s.Delta_eff for _, s in steady_vs_field(defaults, fields)])
    for k in rises:
        lo, hi = sorted((delta[k], delta[k + 1]))
        assert lo - 0.2 * defaults.omega_m < -defaults.omega_m < hi + 0.2 * defaults.omega_m


def test_sensitivity_reference_values(defaults, pt):
    assert sensing.sensitivity_estimate(pt) == pytest.approx(4.276e-12, rel=1e-3)
    assert sensing.sensitivity_estimate(defaults) == pytest.approx(1.1595e-10, rel=1e-3)


def test_sensitivity_crossing_is_threshold(pt):
    step = sensing.sensitivity_estimate(pt)
    i0 = fwm.peak(pt)[0]
    level = abs(sensing.contrast(fwm.peak(pt.replace(B=step))[0], i0))
    assert level == pytest.approx(sensing.DEFAULT_THRESHOLD, rel=1e-4)
    below = abs(sensing.contrast(fwm.peak(pt.replace(B=0.99 * step))[0], i0))
    assert below < sensing.DEFAULT_THRESHOLD


def test_sensitivity_monotone_in_threshold(defaults):
    steps = [sensing.sensitivity_estimate(defaults, threshold=t) for t in (0.005, 0.01, 0.02, 0.05)]
    assert np.all(np.diff(steps) > 0)


def test_exceptional_point_improves_sensitivity(defaults, pt):
    assert sensing.sensitivity_estimate(defaults) >= 10 * sensing.sensitivity_estimate(pt)


def test_stronger_transduction_smaller_step(defaults, pt):
    for p in (defaults, pt):
        base = sensing.sensitivity_estimate(p)
        doubled = sensing.sensitivity_estimate(p.replace(zeta=2 * p.zeta))
        assert doubled < base
        assert doubled == pytest.approx(base / 2, rel=1e-4)


def test_sensitivity_out_of_range(pt):
    with pytest.raises(OutOfRangeError):
        sensing.sensitivity_estimate(pt, threshold=2.0)
    with pytest.raises(OutOfRangeError):
        sensing.sensitivity_estimate(pt, threshold=1e-6, step_range=(1e-9, 1e-8))


def test_sweep_matches_single_runs(defaults):
    k = defaults.kappa_a
    b_grid = [0.0, 1e-11, 2e-11]
    sweep = sensing.sweep_2d(defaults, b_grid, [0.0, 0.5 * k])
    assert sweep.i_max.shape == (3, 2) and not sweep.errors
    column = [i for _, i in sensing.imax_vs_field(defaults, b_grid)]
    assert sweep.i_max[:, 0].tolist() == column
    single = sensing.sweep_2d(defaults, [1e-11], [0.5 * k])
    assert single.i_max[0, 0] == fwm.spectrum(defaults.replace(B=1e-11, J=0.5 * k)).I_max
    assert np.isnan(single.column_contrast[0])


def test_sweep_contrast_peaks_at_exceptional_point(defaults):
    k = defaults.kappa_a
    j_grid = np.linspace(0, 1, 21) * k
    p = scale_zeta(defaults.replace(P_d=1e-13), 3e-3)
    sweep = sensing.sweep_2d(p, sensing.default_b_grid(), j_grid)
    best = int(np.nanargmax(sweep.column_contrast))
    assert j_grid[best] == pytest.approx(0.5 * k)
    assert sweep.column_contrast[best] == pytest.approx(0.1224, abs=5e-4)


def test_sweep_parallel_identical(defaults):
    p = defaults
    j_grid = [0.0, 0.25 * p.kappa_a, 0.5 * p.kappa_a]
    serial = sensing.sweep_2d(p, [0.0, 1e-11], j_grid)
    parallel = sensing.sweep_2d(p, [0.0, 1e-11], j_grid, workers=2)
    assert np.array_equal(serial.i_max, parallel.i_max)


def test_worker_count(monkeypatch):
    monkeypatch.setenv("PTCOMS_THREADS", "3")
    assert sensing.worker_count() == 3
    monkeypatch.setenv("PTCOMS_THREADS", "0")
    assert sensing.worker_count() >= 1
