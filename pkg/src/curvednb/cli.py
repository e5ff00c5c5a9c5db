"""Command-line front end: config ingestion, simulation runs,
relative-equilibrium solving and verification, parabolic certificates,
invariant reports, and trajectory export for offline plotting.

Run configs are TOML.  A minimal simulation config::

    mode = "simulate"
    chart = "disk"
    R = 1.7
    t_end = 5.0

    [integrator]
    tol = 1e-10
    max_step = 0.1
    samples = 100          # evenly spaced output times (0 = accepted steps only)

    [[bodies]]
    mass = 1.0
    position = { re = 0.3, im = 0.1 }
    velocity = { re = 0.0, im = 0.2 }

Hyperboloid-chart bodies use { x = ..., y = ..., z = ... } triples for
position and velocity.  Other modes replace the body list with their own
table: solve-re reads [solve] (family = "elliptic2" | "euler3" |
"lagrange3" | "hyperbolic2" | "hyperbolic3" plus that family's scalars),
verify-re reads [verify] (class = "elliptic" | "hyperbolic" | "parabolic")
next to a body list, and certify-parabolic reads [certify] (n, samples,
seed; n may be a list, fanned out over --jobs worker threads).

Output directory precedence: --out flag, then the CURVEDNB_OUT environment
variable, then [output].dir, then the current directory.  Exit codes:
0 success, 2 unreadable/invalid config, 3 singular or escaping run
(partial trajectory retained), 4 infeasible solve or failed certificate.
With --deterministic, reports skip the timestamp line so identical configs
produce byte-identical artifacts.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import csv
import datetime
import math
import os
import sys
from dataclasses import dataclass, field

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

import numpy as np

from . import relequil
from .dynamics import Body, Configuration, transport_configuration
from .errors import (
    ChartDomainError,
    InfeasibleError,
    SingularityError,
)
from .geometry import (
    Chart,
    CurvatureContext,
    DiskPoint,
    HalfPlanePoint,
    HyperboloidPoint,
    disk_from_hyperboloid,
    disk_velocity_from_hyperboloid,
)
from .integrator import TERM_COMPLETED, IntegratorSettings, integrate
from .invariants import drift_report, first_integrals

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SINGULAR = 3
EXIT_INFEASIBLE = 4

MODES = ("simulate", "solve-re", "verify-re", "certify-parabolic", "report")

CSV_FIELDS = ("t", "body", "chart", "pos_re", "pos_im", "vel_re", "vel_im",
              "h", "c1", "c2", "c3")
CSV_FIELDS_HYPERBOLOID = CSV_FIELDS + ("pos_x", "pos_y", "pos_z")

OUT_ENV_VAR = "CURVEDNB_OUT"


class ConfigError(ValueError):
    """A run config that cannot be parsed or fails validation."""


def _fmt(x: float) -> str:
    # 17 significant digits round-trip any float64 exactly.
    return f"{float(x):.17g}"


@dataclass
class RunConfig:
    """Parsed and validated run description."""

    mode: str
    R: float
    chart: Chart | None = None
    configuration: Configuration | None = None
    settings: IntegratorSettings = field(default_factory=IntegratorSettings)
    t_end: float = 5.0
    samples: int = 100
    out_dir: str = "."
    trajectory_name: str = "trajectory.csv"
    report_name: str = "report.txt"
    solve: dict = field(default_factory=dict)
    verify_class: str | None = None
    certify: dict = field(default_factory=dict)
    deterministic: bool = False
    jobs: int = 1


# ---------------------------------------------------------------------------
# config parsing
# ---------------------------------------------------------------------------

def _need(table: dict, key: str, where: str):
    if key not in table:
        raise ConfigError(f"missing key {key!r} in {where}")
    return table[key]


def _float(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{where} must be a number, got {value!r}")
    return float(value)


def _parse_point(chart: Chart, table, where: str):
    if not isinstance(table, dict):
        raise ConfigError(f"{where} must be a table of coordinates")
    if chart == Chart.HYPERBOLOID:
        triple = [_float(_need(table, k, where), f"{where}.{k}") for k in ("x", "y", "z")]
        return HyperboloidPoint(*triple)
    re = _float(_need(table, "re", where), f"{where}.re")
    im = _float(_need(table, "im", where), f"{where}.im")
    value = complex(re, im)
    return DiskPoint(value) if chart == Chart.DISK else HalfPlanePoint(value)


def _parse_velocity(chart: Chart, table, where: str):
    if not isinstance(table, dict):
        raise ConfigError(f"{where} must be a table of coordinates")
    if chart == Chart.HYPERBOLOID:
        return np.array([_float(_need(table, k, where), f"{where}.{k}")
                         for k in ("x", "y", "z")])
    re = _float(_need(table, "re", where), f"{where}.re")
    im = _float(_need(table, "im", where), f"{where}.im")
    return complex(re, im)


def _parse_bodies(chart: Chart, ctx: CurvatureContext, tables) -> Configuration:
    if not tables:
        raise ConfigError("config declares no [[bodies]]")
    bodies = []
    for i, t in enumerate(tables):
        where = f"bodies[{i}]"
        mass = _float(_need(t, "mass", where), f"{where}.mass")
        position = _parse_point(chart, _need(t, "position", where), f"{where}.position")
        velocity = _parse_velocity(chart, _need(t, "velocity", where), f"{where}.velocity")
        restricted = bool(t.get("restricted", False))
        try:
            bodies.append(Body(mass, position, velocity, restricted=restricted))
        except (ValueError, ChartDomainError) as exc:
            raise ConfigError(f"{where}: {exc}") from exc
    try:
        cfg = Configuration(ctx, chart, bodies)
        cfg.validate()  # chart membership and collision rejection at parse time
    except (ValueError, ChartDomainError, SingularityError) as exc:
        raise ConfigError(str(exc)) from exc
    return cfg


def load_run_config(path: str, *, mode: str | None = None, out: str | None = None,
                    tol: float | None = None, jobs: int = 1,
                    deterministic: bool = False) -> RunConfig:
    """Parse a TOML run config, applying command-line overrides."""
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config {path!r} is not valid TOML: {exc}") from exc

    run_mode = mode or raw.get("mode", "simulate")
    if run_mode not in MODES:
        raise ConfigError(f"unknown mode {run_mode!r}; expected one of {MODES}")

    R = _float(_need(raw, "R", "config"), "R")
    if not (R > 0 and math.isfinite(R)):
        raise ConfigError(f"R must be positive and finite, got {R}")
    ctx = CurvatureContext(R)

    integ = raw.get("integrator", {})
    rel_tol = _float(integ.get("tol", 1e-10), "integrator.tol")
    if tol is not None:
        rel_tol = tol
    try:
        settings = IntegratorSettings(
            rel_tol=rel_tol,
            abs_tol=rel_tol * 1e-2,
            max_step=_float(integ.get("max_step", 0.1), "integrator.max_step"),
        )
    except ValueError as exc:
        raise ConfigError(f"integrator settings: {exc}") from exc
    samples = int(integ.get("samples", 100))
    if samples < 0:
        raise ConfigError("integrator.samples must be >= 0")

    output = raw.get("output", {})
    out_dir = output.get("dir", ".")
    if os.environ.get(OUT_ENV_VAR):
        out_dir = os.environ[OUT_ENV_VAR]
    if out is not None:
        out_dir = out

    chart = None
    configuration = None
    if run_mode in ("simulate", "verify-re", "report"):
        chart_tag = _need(raw, "chart", "config")
        try:
            chart = Chart(chart_tag)
        except ValueError as exc:
            raise ConfigError(f"unknown chart {chart_tag!r}") from exc
        configuration = _parse_bodies(chart, ctx, raw.get("bodies", []))

    verify_class = None
    if run_mode == "verify-re":
        verify_class = _need(raw.get("verify", {}), "class", "[verify]")
        if verify_class not in ("elliptic", "hyperbolic", "parabolic"):
            raise ConfigError(f"unknown residual class {verify_class!r}")

    solve = dict(raw.get("solve", {}))
    if run_mode == "solve-re" and "family" not in solve:
        raise ConfigError("solve-re needs [solve] with a family tag")

    certify = dict(raw.get("certify", {}))

    t_end = _float(raw.get("t_end", 5.0), "t_end")
    if run_mode == "simulate" and t_end == 0:
        raise ConfigError("t_end must be nonzero")

    return RunConfig(
        mode=run_mode, R=R, chart=chart, configuration=configuration,
        settings=settings, t_end=t_end, samples=samples, out_dir=out_dir,
        trajectory_name=output.get("trajectory", "trajectory.csv"),
        report_name=output.get("report", "report.txt"),
        solve=solve, verify_class=verify_class, certify=certify,
        deterministic=deterministic, jobs=max(1, jobs),
    )


# ---------------------------------------------------------------------------
# artifacts
# ---------------------------------------------------------------------------

def _report_header(rc: RunConfig, lines: list) -> None:
    lines.append(f"mode = {rc.mode}")
    if not rc.deterministic:
        lines.append(f"generated = {datetime.datetime.now().isoformat()}")


def _write_report(rc: RunConfig, lines) -> str:
    os.makedirs(rc.out_dir, exist_ok=True)
    path = os.path.join(rc.out_dir, rc.report_name)
    text = "\n".join(lines) + "\n"
    with open(path, "w") as fh:
        fh.write(text)
    sys.stdout.write(text)
    return path


def write_trajectory_csv(rc: RunConfig, traj) -> str:
    """Dump a trajectory as CSV, one row per (time, body).

    Hyperboloid rows keep the rectangular schema by carrying the
    stereographic disk image in pos/vel_re/im and appending the raw
    x, y, z columns."""
    os.makedirs(rc.out_dir, exist_ok=True)
    path = os.path.join(rc.out_dir, rc.trajectory_name)
    hyper = traj.chart == Chart.HYPERBOLOID
    fields = CSV_FIELDS_HYPERBOLOID if hyper else CSV_FIELDS
    ctx = traj.states[0].ctx
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(fields)
        for i, t in enumerate(traj.times):
            state = traj.states[i]
            h, c1, c2, c3 = traj.integrals[i]
            for k, body in enumerate(state.bodies):
                if hyper:
                    z = disk_from_hyperboloid(ctx, body.position).z
                    v = disk_velocity_from_hyperboloid(ctx, body.position, body.velocity)
                    extra = [_fmt(c) for c in body.position.triple()]
                else:
                    z = body.position.z if traj.chart == Chart.DISK else body.position.w
                    v = body.velocity
                    extra = []
                writer.writerow(
                    [_fmt(t), k, traj.chart.value,
                     _fmt(z.real), _fmt(z.imag), _fmt(v.real), _fmt(v.imag),
                     _fmt(h), _fmt(c1), _fmt(c2), _fmt(c3)] + extra)
    return path


# ---------------------------------------------------------------------------
# mode runners
# ---------------------------------------------------------------------------

def run_simulate(rc: RunConfig) -> int:
    t_eval = None
    if rc.samples > 0:
        t_eval = np.linspace(0.0, rc.t_end, rc.samples + 1)
    traj = integrate(rc.configuration, rc.settings, rc.t_end, t_eval=t_eval)
    csv_path = write_trajectory_csv(rc, traj)

    drift = drift_report(traj)
    lines = []
    _report_header(rc, lines)
    lines.append(f"chart = {traj.chart.value}")
    lines.append(f"termination = {traj.termination}")
    lines.append(f"samples = {traj.n_samples}")
    lines.append(f"t_final = {_fmt(traj.times[-1])}")
    for name, value in zip(("h", "c1", "c2", "c3"), traj.integrals[0]):
        lines.append(f"{name}_initial = {_fmt(value)}")
    for name in ("h", "c1", "c2", "c3"):
        lines.append(f"{name}_drift = {_fmt(drift[name])}")
    lines.append(f"max_drift = {_fmt(max(drift.values()))}")
    lines.append(f"trajectory = {os.path.basename(csv_path)}")
    _write_report(rc, lines)
    if traj.termination != TERM_COMPLETED:
        sys.stderr.write(f"run terminated early: {traj.termination}\n")
        return EXIT_SINGULAR
    return EXIT_OK


def _family_lines(family: relequil.REFamily, lines: list) -> None:
    lines.append(f"family = {family.tag.value}")
    lines.append(f"R = {_fmt(family.R)}")
    for key in sorted(family.params):
        lines.append(f"{key} = {_fmt(family.params[key])}")
    for k, (m, z) in enumerate(zip(family.masses, family.positions), start=1):
        lines.append(f"mass_{k} = {_fmt(m)}")
        lines.append(f"position_{k} = {_fmt(z.real)} {_fmt(z.imag)}")
    lines.append(f"residual_norm = {_fmt(family.residual_norm)}")
    lines.append(f"verified = {str(family.verified).lower()}")


def run_solve_re(rc: RunConfig) -> int:
    solve = dict(rc.solve)
    tag = solve.pop("family")
    R = rc.R

    def arg(name: str) -> float:
        return _float(_need(solve, name, "[solve]"), f"solve.{name}")

    lines = []
    _report_header(rc, lines)
    if tag == "elliptic2":
        family = relequil.elliptic_pair_family(arg("m1"), arg("m2"), arg("alpha"), R)
        _family_lines(family, lines)
    elif tag == "euler3":
        result = relequil.euler_elliptic_three(arg("m2"), arg("m3"),
                                               arg("alpha"), arg("r"), R)
        lines.append(f"feasible = {str(result.feasible).lower()}")
        if result.determinant is not None:
            lines.append(f"determinant = {_fmt(result.determinant)}")
        if not result.feasible:
            lines.append(f"reason = {result.reason}")
            _write_report(rc, lines)
            sys.stderr.write(f"infeasible: {result.reason}\n")
            return EXIT_INFEASIBLE
        _family_lines(result.family, lines)
    elif tag == "lagrange3":
        solution = relequil.lagrange_elliptic_three(arg("r"), R)
        _family_lines(solution.family, lines)
    elif tag == "hyperbolic2":
        solution = relequil.solve_two_body_hyperbolic(arg("m1"), arg("m2"),
                                                      arg("theta1"), R)
        _family_lines(solution.family, lines)
    elif tag == "hyperbolic3":
        family = relequil.three_body_hyperbolic_family(arg("theta1"), R)
        _family_lines(family, lines)
    else:
        raise ConfigError(f"unknown family tag {tag!r}")
    _write_report(rc, lines)
    return EXIT_OK


def run_verify_re(rc: RunConfig) -> int:
    op = {"elliptic": relequil.elliptic_residual,
          "hyperbolic": relequil.hyperbolic_residual,
          "parabolic": relequil.parabolic_residual}[rc.verify_class]
    report = op(rc.configuration)
    lines = []
    _report_header(rc, lines)
    lines.append(f"class = {report.kind.value}")
    for k, res in enumerate(report.residuals, start=1):
        lines.append(f"residual_{k} = {_fmt(res.real)} {_fmt(res.imag)} "
                     f"(abs {_fmt(abs(res))})")
    lines.append(f"norm = {_fmt(report.norm)}")
    lines.append(f"scale = {_fmt(report.scale)}")
    lines.append(f"scaled_norm = {_fmt(report.scaled_norm)}")
    verified = report.norm <= relequil.RE_VERIFY_TOL
    lines.append(f"verified = {str(verified).lower()}")
    _write_report(rc, lines)
    return EXIT_OK


def run_certify_parabolic(rc: RunConfig) -> int:
    spec = rc.certify
    ns = spec.get("n", [2, 3])
    if isinstance(ns, int):
        ns = [ns]
    samples = int(spec.get("samples", 10_000))
    seed = int(spec.get("seed", 0))

    def one(n: int):
        return relequil.parabolic_nonexistence_certificate(
            int(n), rc.R, samples=samples, seed=seed)

    if rc.jobs > 1 and len(ns) > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=rc.jobs) as pool:
            certs = list(pool.map(one, ns))
    else:
        certs = [one(n) for n in ns]

    lines = []
    _report_header(rc, lines)
    lines.append(f"samples = {samples}")
    lines.append(f"seed = {seed}")
    all_hold = True
    for cert in certs:
        all_hold &= cert.holds
        lines.append(f"n = {cert.n}: holds = {str(cert.holds).lower()}, "
                     f"min_noncollinear_imag = {_fmt(cert.min_noncollinear_imag)}, "
                     f"min_stack_residual = {_fmt(cert.min_stack_residual)}")
    lines.append("conclusion = no solution found" if all_hold
                 else "conclusion = CERTIFICATE FAILED")
    _write_report(rc, lines)
    if not all_hold:
        sys.stderr.write("certificate failed: a sampled configuration came "
                         "close to solving the parabolic system\n")
        return EXIT_INFEASIBLE
    return EXIT_OK


def run_report(rc: RunConfig) -> int:
    lines = []
    _report_header(rc, lines)
    lines.append(f"source_chart = {rc.chart.value}")
    rows = {}
    for chart in (Chart.DISK, Chart.HALFPLANE, Chart.HYPERBOLOID):
        transported = transport_configuration(rc.configuration, chart)
        rows[chart.value] = first_integrals(transported).as_array()
        h, c1, c2, c3 = rows[chart.value]
        lines.append(f"{chart.value}: h = {_fmt(h)}, c1 = {_fmt(c1)}, "
                     f"c2 = {_fmt(c2)}, c3 = {_fmt(c3)}")
    stack = np.array(list(rows.values()))
    spread = np.max(stack, axis=0) - np.min(stack, axis=0)
    lines.append(f"max_cross_chart_deviation = {_fmt(float(np.max(spread)))}")
    _write_report(rc, lines)
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="curvednb",
        description="n-body dynamics on surfaces of constant negative curvature",
    )
    parser.add_argument("--config", required=True, help="TOML run config path")
    parser.add_argument("--mode", choices=MODES,
                        help="override the mode declared in the config")
    parser.add_argument("--out", help="output directory (overrides config and "
                        f"the {OUT_ENV_VAR} environment variable)")
    parser.add_argument("--jobs", type=int, default=1,
                        help="worker-thread bound for sweep modes")
    parser.add_argument("--deterministic", action="store_true",
                        help="byte-identical artifacts for identical configs")
    parser.add_argument("--tol", type=float,
                        help="override the integrator relative tolerance")
    return parser


def run(rc: RunConfig) -> int:
    handlers = {
        "simulate": run_simulate,
        "solve-re": run_solve_re,
        "verify-re": run_verify_re,
        "certify-parabolic": run_certify_parabolic,
        "report": run_report,
    }
    return handlers[rc.mode](rc)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        rc = load_run_config(args.config, mode=args.mode, out=args.out,
                             tol=args.tol, jobs=args.jobs,
                             deterministic=args.deterministic)
    except ConfigError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return EXIT_CONFIG
    try:
        return run(rc)
    except ConfigError as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return EXIT_CONFIG
    except (ChartDomainError, ValueError) as exc:
        sys.stderr.write(f"config error: {exc}\n")
        return EXIT_CONFIG
    except SingularityError as exc:
        sys.stderr.write(f"singularity: {exc}\n")
        return EXIT_SINGULAR
    except InfeasibleError as exc:
        sys.stderr.write(f"infeasible: {exc}\n")
        return EXIT_INFEASIBLE


if __name__ == "__main__":
    sys.exit(main())
