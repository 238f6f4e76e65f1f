"""Command-line front end.

Every command resolves parameters as flags > config file > reference defaults,
writes CSV/JSON into ``--out`` and a ``<stem>.manifest.json`` beside them.
Exit status: 0 ok, 1 physics or validation failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import re
import sys
from pathlib import Path

import numpy as np

from . import fwm, pteigen, sensing, steady
from .errors import ConfigError, PhysicsError
from .oracle import cross_validate, integrate_time_domain
from .params import SystemParams, load_config, paper_defaults, scale_zeta, validate
from .report import RunManifest, config_hash, write_csv, write_json

_PREFIXES = {"f": 1e-15, "p": 1e-12, "n": 1e-9, "u": 1e-6, "µ": 1e-6, "m": 1e-3, "": 1.0, "k": 1e3, "M": 1e6}
_QUANTITY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([fpnuµmkM]?)([A-Za-z]*)\s*$")


def parse_quantity(text: str, unit: str) -> float:
    """Parse ``'0.1pW'``, ``'3 mA'`` or a bare SI number for ``unit``."""
    match = _QUANTITY.match(text)
    if not match:
        raise argparse.ArgumentTypeError(f"cannot parse {text!r} as a quantity in {unit}")
    number, prefix, suffix = match.groups()
    if not suffix and prefix:
        # a lone prefix letter with no unit, e.g. '3m', is ambiguous
        raise argparse.ArgumentTypeError(f"{text!r}: missing unit {unit}")
    if suffix and suffix != unit:
        raise argparse.ArgumentTypeError(f"{text!r}: expected unit {unit}")
    return float(number) * _PREFIXES[prefix]


def _quantity(unit):
    return lambda text: parse_quantity(text, unit)


def parse_grid(text: str) -> np.ndarray:
    """``start:stop:count`` (inclusive linspace) or a comma separated list."""
    try:
        if ":" in text:
            start, stop, count = text.split(":")
            return np.linspace(float(start), float(stop), int(count))
        return np.array([float(v) for v in text.split(",")])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}: {exc}") from exc


# --------------------------------------------------------------------------
# parameter resolution


def resolve_params(args) -> SystemParams:
    params = paper_defaults()
    if getattr(args, "config", None):
        params = load_config(args.config, params)
    if args.current is not None:
        params = scale_zeta(params, args.current)
    changes = {}
    if args.pd is not None:
        changes["P_d"] = args.pd
    if args.field is not None:
        changes["B"] = args.field
    if args.j_over_kappa is not None:
        changes["J"] = args.j_over_kappa * params.kappa_a
    if args.delta_over_omega_m is not None:
        changes["Delta_a"] = args.delta_over_omega_m * params.omega_m
    params = params.replace(**changes)
    problems = validate(params)
    if problems:
        raise ConfigError("invalid parameters: " + "; ".join(problems))
    return params


def _omega_grid(args, params):
    if args.omega_grid is None:
        return fwm.default_grid(params)
    return args.omega_grid * params.omega_m


# --------------------------------------------------------------------------
# row builders shared by commands and figure reproduction

EIGEN_COLUMNS = [
    ("J_over_kappa", "1"),
    ("re_plus", "kappa_a"),
    ("im_plus", "kappa_a"),
    ("re_minus", "kappa_a"),
    ("im_minus", "kappa_a"),
    ("phase", "label"),
]
STEADY_COLUMNS = [
    ("B_tesla", "T"),
    ("N1", "1"),
    ("x_s_m", "m"),
    ("delta_eff", "rad/s"),
    ("kappa_eff", "rad/s"),
    ("branch_count", "1"),
]
SPECTRUM_COLUMNS = [("omega_over_omega_m", "1"), ("i_fwm", "1"), ("re_d", "kg/s^4"), ("im_d", "kg/s^4")]
IMAX_COLUMNS = [("b_tesla", "T"), ("i_max", "1"), ("contrast_to_prev", "1")]
SWEEP_COLUMNS = [("b_tesla", "T"), ("j_over_kappa", "1"), ("i_max", "1")]


def eigen_rows(params, j_over_kappa):
    rows = []
    k = params.kappa_a
    for j, pair in pteigen.phase_diagram(params, np.asarray(j_over_kappa) * k):
        rows.append(
            (
                j / k,
                pair.omega_plus.real / k,
                pair.omega_plus.imag / k,
                pair.omega_minus.real / k,
                pair.omega_minus.imag / k,
                pair.phase.value,
            )
        )
    return rows


def steady_rows(params, b_grid):
    return [
        (b, s.N1, s.x_s, s.Delta_eff, s.kappa_eff, s.branch_count)
        for b, s in steady.steady_vs_field(params, b_grid)
    ]


def spectrum_rows(params, omega_grid):
    result = fwm.spectrum(params, omega_grid)
    rows = [(p.Omega / params.omega_m, p.I_FWM, p.D.real, p.D.imag) for p in result.points]
    summary = {"i_max": result.I_max, "omega_at_max_over_omega_m": result.Omega_at_max / params.omega_m}
    return rows, summary


def imax_rows(params, b_grid, omega_grid):
    curve = sensing.imax_vs_field(params, b_grid, omega_grid)
    rows = []
    for n, (b, value) in enumerate(curve):
        eta = sensing.contrast(value, curve[n - 1][1]) if n else float("nan")
        rows.append((b, value, eta))
    return rows


# --------------------------------------------------------------------------
# commands


class _Run:
    def __init__(self, args, params, stem):
        self.out = Path(args.out)
        self.params = params
        self.digest = config_hash(params)
        self.command = stem
        self.manifest = RunManifest(command=" ".join(args.argv), config_hash=self.digest)
        self.stem = stem

    def csv(self, name, columns, rows):
        self.manifest.add(write_csv(self.out / f"{name}.csv", self.command, self.digest, columns, rows))

    def json(self, name, payload):
        self.manifest.add(write_json(self.out / f"{name}.json", payload))

    def finish(self):
        self.manifest.write(self.out, self.stem)


def cmd_eigen(args, params):
    run = _Run(args, params, "eigen")
    grid = args.j_grid if args.j_grid is not None else np.linspace(0.0, 1.0, 201)
    run.csv("eigen", EIGEN_COLUMNS, eigen_rows(params, grid))
    run.finish()
    return 0


def cmd_steady(args, params):
    run = _Run(args, params, "steady")
    grid = args.b_grid if args.b_grid is not None else np.linspace(0.0, 5e-8, 101)
    run.csv("steady", STEADY_COLUMNS, steady_rows(params, grid))
    run.finish()
    return 0


def cmd_spectrum(args, params):
    run = _Run(args, params, "spectrum")
    rows, summary = spectrum_rows(params, _omega_grid(args, params))
    run.csv("spectrum", SPECTRUM_COLUMNS, rows)
    run.json("spectrum", summary)
    run.finish()
    return 0


def cmd_imax(args, params):
    run = _Run(args, params, "imax")
    grid = args.b_grid if args.b_grid is not None else sensing.default_b_grid()
    run.csv("imax", IMAX_COLUMNS, imax_rows(params, grid, _omega_grid(args, params)))
    run.finish()
    return 0


def _contrast_payload(report):
    return {
        "average_contrast": report.average_contrast,
        "resolvable_step_tesla": report.resolvable_step,
        "threshold": report.threshold,
        "pairwise_contrasts": report.pairwise_contrasts,
    }


def cmd_contrast(args, params):
    run = _Run(args, params, "contrast")
    grid = args.b_grid if args.b_grid is not None else sensing.default_b_grid(args.b_step, args.b_steps)
    report = sensing.contrast_report(params, grid, args.threshold, _omega_grid(args, params))
    rows = [(b, v, e) for b, v, e in zip(report.b_grid, report.i_max_values, [float("nan")] + report.pairwise_contrasts)]
    run.csv("contrast", IMAX_COLUMNS, rows)
    run.json("contrast", _contrast_payload(report))
    run.finish()
    return 0


def _write_sweep(run, name, result):
    k = run.params.kappa_a
    rows = [
        (b, j / k, result.i_max[ib, ij])
        for ij, j in enumerate(result.j_grid)
        for ib, b in enumerate(result.b_grid)
    ]
    run.csv(name, SWEEP_COLUMNS, rows)
    run.csv(
        f"{name}_contrast",
        [("j_over_kappa", "1"), ("average_contrast", "1")],
        [(j / k, c) for j, c in zip(result.j_grid, result.column_contrast)],
    )
    if result.errors:
        run.json(f"{name}_errors", {f"{ib},{ij}": msg for (ib, ij), msg in sorted(result.errors.items())})


def cmd_sweep2d(args, params):
    run = _Run(args, params, "sweep2d")
    b_grid = args.b_grid if args.b_grid is not None else sensing.default_b_grid()
    j_grid = (args.j_grid if args.j_grid is not None else np.linspace(0.0, 1.0, 21)) * params.kappa_a
    result = sensing.sweep_2d(params, b_grid, j_grid, _omega_grid(args, params), sensing.worker_count())
    _write_sweep(run, "sweep2d", result)
    run.finish()
    return 0


def cmd_sensitivity(args, params):
    run = _Run(args, params, "sensitivity")
    step = sensing.sensitivity_estimate(params, args.threshold, _omega_grid(args, params))
    run.json("sensitivity", {"resolvable_step_tesla": step, "threshold": args.threshold})
    run.finish()
    return 0


def cmd_validate(args, params):
    run = _Run(args, params, "validate")
    grid = (args.omega_grid if args.omega_grid is not None else np.linspace(0.95, 1.05, 21)) * params.omega_m
    report = cross_validate(params, grid, order=args.order, gate=args.gate)
    payload = report.to_dict()
    status = 0 if report.passed else 1
    if args.time_domain:
        trace = integrate_time_domain(params, params.omega_m, horizon_periods=args.horizon)
        analytic = fwm.fwm_amplitude(params, steady.solve_steady(params), params.omega_m).A1_l_over_ep
        dev = abs(abs(trace.sideband_lower) - abs(analytic)) / abs(analytic)
        payload["time_domain"] = {
            "omega_over_omega_m": 1.0,
            "analytic_abs": abs(analytic),
            "oracle_abs": abs(trace.sideband_lower),
            "rel_dev": dev,
            "settled": trace.settled,
            "gate": 0.02,
        }
        if trace.settled and dev > 0.02:
            status = 1
    run.json("validate", payload)
    run.finish()
    for point in report.points:
        print(f"{point.omega_over_omega_m:.4f}  rel_dev={point.rel_dev:.3e}")
    print(f"max_rel_dev={report.max_rel_dev:.3e} gate={report.gate} {'PASS' if status == 0 else 'FAIL'}")
    return status


# --------------------------------------------------------------------------
# figure reproduction


def _fig1(run, params):
    balanced = params.replace(g_a=params.kappa_a, Delta_a=0.0)
    run.csv("fig1", EIGEN_COLUMNS, eigen_rows(balanced, np.linspace(0.0, 1.0, 201)))


def _spectrum_curves(run, name, curves, omega_grid):
    rows = []
    summary = {}
    for label, p in curves:
        result = fwm.spectrum(p, omega_grid)
        rows.extend((label, pt.Omega / p.omega_m, pt.I_FWM) for pt in result.points)
        summary[label] = {"i_max": result.I_max, "omega_at_max_over_omega_m": result.Omega_at_max / p.omega_m}
    run.csv(name, [("curve", "label"), ("omega_over_omega_m", "1"), ("i_fwm", "1")], rows)
    run.json(name, summary)


def _fig2(run, params):
    wm, k = params.omega_m, params.kappa_a
    grid = fwm.default_grid(params)
    _spectrum_curves(
        run,
        "fig2a",
        [
            ("blue_J0", params.replace(Delta_a=wm, J=0.0)),
            ("red_J0", params.replace(Delta_a=-wm, J=0.0)),
            ("resonant_J0", params.replace(Delta_a=0.0, J=0.0)),
            ("resonant_J0.5", params.replace(Delta_a=0.0, J=0.5 * k)),
        ],
        grid,
    )
    base = params.replace(Delta_a=0.0, J=0.0)
    _spectrum_curves(
        run, "fig2b", [(f"B={b!r}", base.replace(B=b)) for b in 1e-9 * np.arange(6)], grid
    )
    run.csv("fig2c", IMAX_COLUMNS, imax_rows(base, np.linspace(0.0, 5e-9, 51), grid))


def _fig3(run, params):
    base = params.replace(Delta_a=0.0, J=0.0)
    run.csv("fig3", STEADY_COLUMNS, steady_rows(base, np.linspace(0.0, 5e-8, 201)))


def _fig4(run, params):
    base = params.replace(Delta_a=0.0, J=0.5 * params.kappa_a)
    grid = fwm.default_grid(params)
    _spectrum_curves(run, "fig4a", [(f"B={b!r}", base.replace(B=b)) for b in 2e-11 * np.arange(6)], grid)
    b_grid = np.linspace(0.0, 1e-10, 21)
    run.csv("fig4b", IMAX_COLUMNS, imax_rows(base, b_grid, grid))
    run.csv("fig4c", STEADY_COLUMNS, steady_rows(base, b_grid))


def _fig5(run, params):
    base = params.replace(Delta_a=0.0, J=0.5 * params.kappa_a)
    grid = fwm.default_grid(params)
    b_grid = sensing.default_b_grid()
    rows = []
    for current in (1e-3, 2e-3, 3e-3):
        p = scale_zeta(base, current).replace(P_d=1e-12)
        rows.extend((f"I={current!r}",) + r for r in imax_rows(p, b_grid, grid))
    run.csv("fig5a", [("curve", "label")] + IMAX_COLUMNS, rows)

    rows, summary = [], {}
    for power in (1e-12, 0.5e-12, 0.1e-12):
        p = scale_zeta(base, 3e-3).replace(P_d=power)
        report = sensing.contrast_report(p, b_grid, omega_grid=grid)
        etas = [float("nan")] + report.pairwise_contrasts
        rows.extend((f"P_d={power!r}", b, v, e) for b, v, e in zip(report.b_grid, report.i_max_values, etas))
        summary[f"P_d={power!r}"] = _contrast_payload(report)
    run.csv("fig5b", [("curve", "label")] + IMAX_COLUMNS, rows)
    run.json("fig5b", summary)

    p = scale_zeta(base, 3e-3).replace(P_d=0.1e-12)
    j_grid = np.linspace(0.0, 1.0, 21) * p.kappa_a
    _write_sweep(run, "fig5c", sensing.sweep_2d(p, b_grid, j_grid, grid, sensing.worker_count()))


FIGURES = {"fig1": _fig1, "fig2": _fig2, "fig3": _fig3, "fig4": _fig4, "fig5": _fig5}


def cmd_reproduce(args, params):
    run = _Run(args, params, args.figure)
    FIGURES[args.figure](run, params)
    run.finish()
    return 0


COMMANDS = {
    "eigen": cmd_eigen,
    "steady": cmd_steady,
    "spectrum": cmd_spectrum,
    "imax": cmd_imax,
    "contrast": cmd_contrast,
    "sweep2d": cmd_sweep2d,
    "sensitivity": cmd_sensitivity,
    "validate": cmd_validate,
    "reproduce": cmd_reproduce,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value parameter file")
    common.add_argument("--out", default=".", help="output directory (default: .)")
    common.add_argument("--pd", type=_quantity("W"), help="drive power, e.g. 0.1pW")
    common.add_argument("--current", type=_quantity("A"), help="surface current, e.g. 3mA")
    common.add_argument("--field", type=_quantity("T"), help="magnetic field B, e.g. 1e-11 or 10pT")
    common.add_argument("--j-over-kappa", type=float, help="tunneling J in units of kappa_a")
    common.add_argument("--delta-over-omega-m", type=float, help="drive detuning in units of omega_m")
    common.add_argument("--omega-grid", type=parse_grid, help="probe detuning grid in units of omega_m")

    parser = argparse.ArgumentParser(prog="ptcoms", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eigen", parents=[common], help="eigenfrequencies over J")
    p.add_argument("--j-grid", type=parse_grid, help="J grid in units of kappa_a")
    p = sub.add_parser("steady", parents=[common], help="steady state over B")
    p.add_argument("--b-grid", type=parse_grid, help="field grid in T")
    sub.add_parser("spectrum", parents=[common], help="FWM spectrum over Omega")
    p = sub.add_parser("imax", parents=[common], help="peak FWM intensity over B")
    p.add_argument("--b-grid", type=parse_grid)
    p = sub.add_parser("contrast", parents=[common], help="contrast report")
    p.add_argument("--b-grid", type=parse_grid)
    p.add_argument("--b-step", type=_quantity("T"), default=sensing.DEFAULT_B_STEP)
    p.add_argument("--b-steps", type=int, default=sensing.DEFAULT_B_STEPS)
    p.add_argument("--threshold", type=float, default=sensing.DEFAULT_THRESHOLD)
    p = sub.add_parser("sweep2d", parents=[common], help="peak intensity over the B x J lattice")
    p.add_argument("--b-grid", type=parse_grid)
    p.add_argument("--j-grid", type=parse_grid, help="J grid in units of kappa_a")
    p = sub.add_parser("sensitivity", parents=[common], help="resolvable field step")
    p.add_argument("--threshold", type=float, default=sensing.DEFAULT_THRESHOLD)
    p = sub.add_parser("validate", parents=[common], help="analytic formula vs harmonic-balance oracle")
    p.add_argument("--order", type=int, default=3)
    p.add_argument("--gate", type=float, default=0.01)
    p.add_argument("--time-domain", action="store_true", help="also integrate the full equations at Omega = omega_m")
    p.add_argument("--horizon", type=int, default=4000, help="time-domain horizon in beat periods")
    p = sub.add_parser("reproduce", parents=[common], help="emit a canned set of curves (fig1..fig5)")
    p.add_argument("figure", choices=sorted(FIGURES))
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args.argv = ["ptcoms"] + argv
    try:
        params = resolve_params(args)
    except (ConfigError, OSError, PhysicsError) as exc:
        print(f"ptcoms: error: {exc}", file=sys.stderr)
        return 2
    try:
        return COMMANDS[args.command](args, params)
    except PhysicsError as exc:
        print(f"ptcoms: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
