"""End-to-end tests of the command-line front end: TOML config parsing,
artifact layout, report line formats, exit codes, output-directory routing,
determinism, and the installed console script."""

from __future__ import annotations

import csv
import math
import os
import shutil
import subprocess

import numpy as np
import pytest

from curvednb import relequil
from curvednb.cli import (
    CSV_FIELDS,
    CSV_FIELDS_HYPERBOLOID,
    EXIT_CONFIG,
    EXIT_INFEASIBLE,
    EXIT_OK,
    EXIT_SINGULAR,
    OUT_ENV_VAR,
    ConfigError,
    _fmt,
    load_run_config,
    main,
)

R = 1.7
ALPHA = 0.52 * R


@pytest.fixture(autouse=True)
def _clean_out_env(monkeypatch):
    """Keep ambient CURVEDNB_OUT from leaking into output-dir resolution."""
    monkeypatch.delenv(OUT_ENV_VAR, raising=False)


def write_config(tmp_path, text, name="run.toml") -> str:
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def read_report(out_dir, name="report.txt") -> str:
    with open(os.path.join(str(out_dir), name)) as fh:
        return fh.read()


def report_value(text: str, key: str) -> str:
    """The right-hand side of the unique `key = value` report line."""
    hits = [line[len(key) + 3:] for line in text.splitlines()
            if line.startswith(f"{key} = ")]
    assert len(hits) == 1, f"expected one {key!r} line, got {len(hits)}:\n{text}"
    return hits[0]


def read_csv_rows(out_dir, name="trajectory.csv"):
    with open(os.path.join(str(out_dir), name), newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


SINGLE_BODY = """
R = 1.7
chart = "disk"
t_end = 2.0

[integrator]
samples = 10

[[bodies]]
mass = 1.0
position = { re = 0.2, im = 0.1 }
velocity = { re = 0.0, im = 0.0 }
"""

PAIR = """
R = 1.7
chart = "disk"
t_end = 2.0

[integrator]
samples = 20

[[bodies]]
mass = 1.0
position = { re = 0.765, im = 0.0 }
velocity = { re = 0.0, im = 0.25 }

[[bodies]]
mass = 1.0
position = { re = -0.765, im = 0.0 }
velocity = { re = 0.0, im = -0.25 }
"""

COLLIDE = """
R = 1.0
chart = "disk"
t_end = 5.0

[[bodies]]
mass = 1.0
position = { re = 0.3, im = 0.0 }
velocity = { re = -0.4, im = 0.0 }

[[bodies]]
mass = 1.0
position = { re = -0.3, im = 0.0 }
velocity = { re = 0.4, im = 0.0 }
"""

ESCAPE = """
R = 1.0
chart = "disk"
t_end = 10.0

[[bodies]]
mass = 0.01
position = { re = 0.88, im = 0.0 }
velocity = { re = 0.9, im = 0.0 }

[[bodies]]
mass = 0.01
position = { re = -0.2, im = 0.0 }
velocity = { re = 0.0, im = 0.0 }
"""


def hyperboloid_pair_toml() -> str:
    z = math.sqrt(1.0 + 0.3 ** 2)
    return f"""
R = 1.0
chart = "hyperboloid"
t_end = 1.0

[integrator]
samples = 5

[[bodies]]
mass = 1.0
position = {{ x = 0.3, y = 0.0, z = {z!r} }}
velocity = {{ x = 0.0, y = 0.2, z = 0.0 }}

[[bodies]]
mass = 1.0
position = {{ x = -0.3, y = 0.0, z = {z!r} }}
velocity = {{ x = 0.0, y = -0.2, z = 0.0 }}
"""


def antipodal_pair_toml(mass_factor: float = 1.0) -> str:
    """Rotating antipodal pair whose closed-form mass balances exactly."""
    m = mass_factor * 8 * R ** 6 * ALPHA ** 3 * (R ** 2 + ALPHA ** 2) ** 3 \
        / (R ** 2 - ALPHA ** 2) ** 6
    v = 0.5 * ALPHA
    return f"""
R = {R!r}
chart = "disk"

[verify]
class = "elliptic"

[[bodies]]
mass = {m!r}
position = {{ re = {ALPHA!r}, im = 0.0 }}
velocity = {{ re = 0.0, im = {-v!r} }}

[[bodies]]
mass = {m!r}
position = {{ re = {-ALPHA!r}, im = 0.0 }}
velocity = {{ re = 0.0, im = {v!r} }}
"""


# ---------------------------------------------------------------------------
# simulate mode
# ---------------------------------------------------------------------------

class TestSimulate:
    def test_stationary_body_completes_with_zero_drift(self, tmp_path, capsys):
        cfg = write_config(tmp_path, SINGLE_BODY)
        out = tmp_path / "out"
        code = main(["--config", cfg, "--out", str(out), "--deterministic"])
        assert code == EXIT_OK
        report = read_report(out)
        assert report_value(report, "mode") == "simulate"
        assert report_value(report, "chart") == "disk"
        assert report_value(report, "termination") == "completed"
        # a lone body at rest has every integral identically zero
        assert report_value(report, "max_drift") == "0"
        for name in ("h", "c1", "c2", "c3"):
            assert report_value(report, f"{name}_drift") == "0"
            assert report_value(report, f"{name}_initial") == "0"
        assert report_value(report, "t_final") == "2"
        assert report_value(report, "trajectory") == "trajectory.csv"
        # the report is echoed to stdout as well as written to disk
        assert capsys.readouterr().out == report

    def test_trajectory_schema_and_float_roundtrip(self, tmp_path):
        cfg = write_config(tmp_path, PAIR)
        out = tmp_path / "out"
        assert main(["--config", cfg, "--out", str(out)]) == EXIT_OK
        header, rows = read_csv_rows(out)
        assert tuple(header) == CSV_FIELDS
        assert rows, "trajectory is empty"
        float_cols = [i for i, name in enumerate(header)
                      if name not in ("body", "chart")]
        for row in rows:
            assert row[header.index("chart")] == "disk"
            assert row[header.index("body")] in ("0", "1")
            for i in float_cols:
                # 17-significant-digit cells restore the exact float64
                assert _fmt(float(row[i])) == row[i]
        # every requested sample time appears in the time column
        ts = {float(row[0]) for row in rows}
        for t in np.linspace(0.0, 2.0, 21):
            assert float(t) in ts
        # both bodies are recorded at each time
        t0 = rows[0][0]
        assert [r[1] for r in rows if r[0] == t0] == ["0", "1"]

    def test_report_matches_trajectory_integrals(self, tmp_path):
        cfg = write_config(tmp_path, PAIR)
        out = tmp_path / "out"
        assert main(["--config", cfg, "--out", str(out)]) == EXIT_OK
        report = read_report(out)
        header, rows = read_csv_rows(out)
        h0 = float(report_value(report, "h_initial"))
        assert float(rows[0][header.index("h")]) == h0
        assert float(report_value(report, "max_drift")) < 1e-8
        assert int(report_value(report, "samples")) == len(
            {row[0] for row in rows})

    def test_hyperboloid_csv_carries_embedding_columns(self, tmp_path):
        cfg = write_config(tmp_path, hyperboloid_pair_toml())
        out = tmp_path / "out"
        assert main(["--config", cfg, "--out", str(out)]) == EXIT_OK
        header, rows = read_csv_rows(out)
        assert tuple(header) == CSV_FIELDS_HYPERBOLOID
        ix = {name: header.index(name) for name in header}
        for row in rows:
            assert row[ix["chart"]] == "hyperboloid"
            x, y, z = (float(row[ix[c]]) for c in ("pos_x", "pos_y", "pos_z"))
            assert z > 0
            # the embedding columns satisfy the sheet equation
            assert x * x + y * y + 1.0 == pytest.approx(z * z, rel=1e-12)
            # and the re/im columns hold the stereographic disk image
            w = complex(float(row[ix["pos_re"]]), float(row[ix["pos_im"]]))
            assert abs(w) < 1.0

    def test_collision_terminates_with_singular_exit(self, tmp_path, capsys):
        cfg = write_config(tmp_path, COLLIDE)
        out = tmp_path / "out"
        code = main(["--config", cfg, "--out", str(out)])
        assert code == EXIT_SINGULAR
        assert "terminated early" in capsys.readouterr().err
        report = read_report(out)
        assert report_value(report, "termination") == "collision approach"
        assert float(report_value(report, "t_final")) < 5.0
        # the partial trajectory is still written
        _, rows = read_csv_rows(out)
        assert len(rows) >= 4

    def test_escape_terminates_with_singular_exit(self, tmp_path):
        cfg = write_config(tmp_path, ESCAPE)
        out = tmp_path / "out"
        assert main(["--config", cfg, "--out", str(out)]) == EXIT_SINGULAR
        report = read_report(out)
        assert report_value(report, "termination") == "boundary escape"
        assert float(report_value(report, "t_final")) < 10.0

    def test_deterministic_runs_are_byte_identical(self, tmp_path):
        cfg = write_config(tmp_path, PAIR)
        outs = []
        for sub in ("a", "b"):
            out = tmp_path / sub
            assert main(["--config", cfg, "--out", str(out),
                         "--deterministic"]) == EXIT_OK
            outs.append(out)
        for name in ("report.txt", "trajectory.csv"):
            a = (outs[0] / name).read_bytes()
            b = (outs[1] / name).read_bytes()
            assert a == b, f"{name} differs between identical runs"
        assert "generated = " not in read_report(outs[0])

    def test_default_report_carries_timestamp(self, tmp_path):
        cfg = write_config(tmp_path, SINGLE_BODY)
        out = tmp_path / "out"
        assert main(["--config", cfg, "--out", str(out)]) == EXIT_OK
        assert "generated = " in read_report(out)

    def test_tol_flag_loosens_the_run(self, tmp_path):
        cfg = write_config(tmp_path, PAIR)
        out = tmp_path / "out"
        code = main(["--config", cfg, "--out", str(out), "--tol", "1e-5"])
        assert code == EXIT_OK
        assert float(report_value(read_report(out), "max_drift")) < 1e-3


# ---------------------------------------------------------------------------
# config loading and output routing
# ---------------------------------------------------------------------------

class TestConfigLoading:
    def test_tol_override_scales_abs_tol(self, tmp_path):
        cfg = write_config(tmp_path, SINGLE_BODY + "\n[x]\n")
        rc = load_run_config(cfg)
        assert rc.settings.rel_tol == 1e-10
        assert rc.settings.abs_tol == 1e-12
        rc = load_run_config(cfg, tol=1e-6)
        assert rc.settings.rel_tol == 1e-6
        assert rc.settings.abs_tol == pytest.approx(1e-8)

    def test_mode_flag_overrides_config(self, tmp_path):
        cfg = write_config(tmp_path, 'mode = "simulate"\n' + PAIR)
        assert load_run_config(cfg).mode == "simulate"
        assert load_run_config(cfg, mode="report").mode == "report"

    def test_out_dir_precedence(self, tmp_path, monkeypatch):
        cfg = write_config(tmp_path, SINGLE_BODY + f"""
[output]
dir = "{(tmp_path / 'from_config').as_posix()}"
""")
        assert load_run_config(cfg).out_dir == str(
            (tmp_path / "from_config").as_posix())
        monkeypatch.setenv(OUT_ENV_VAR, str(tmp_path / "from_env"))
        assert load_run_config(cfg).out_dir == str(tmp_path / "from_env")
        assert load_run_config(cfg, out=str(tmp_path / "from_flag")) \
            == load_run_config(cfg, out=str(tmp_path / "from_flag"))
        assert load_run_config(cfg, out="explicit").out_dir == "explicit"

    def test_env_var_routes_artifacts(self, tmp_path, monkeypatch):
        cfg = write_config(tmp_path, SINGLE_BODY)
        env_dir = tmp_path / "routed"
        monkeypatch.setenv(OUT_ENV_VAR, str(env_dir))
        assert main(["--config", cfg]) == EXIT_OK
        assert (env_dir / "report.txt").exists()
        assert (env_dir / "trajectory.csv").exists()
        # the --out flag still wins over the environment
        flag_dir = tmp_path / "flagged"
        assert main(["--config", cfg, "--out", str(flag_dir)]) == EXIT_OK
        assert (flag_dir / "report.txt").exists()

    def test_custom_artifact_names(self, tmp_path):
        cfg = write_config(tmp_path, SINGLE_BODY + """
[output]
trajectory = "orbit.csv"
report = "summary.txt"
""")
        out = tmp_path / "out"
        assert main(["--config", cfg, "--out", str(out)]) == EXIT_OK
        assert (out / "orbit.csv").exists()
        assert (out / "summary.txt").exists()
        assert report_value(read_report(out, "summary.txt"),
                            "trajectory") == "orbit.csv"


BAD_CONFIGS = {
    "invalid-toml": "R = ",
    "missing-R": SINGLE_BODY.replace("R = 1.7", "x = 1"),
    "negative-R": SINGLE_BODY.replace("R = 1.7", "R = -1.0"),
    "string-R": SINGLE_BODY.replace("R = 1.7", 'R = "big"'),
    "unknown-chart": SINGLE_BODY.replace('"disk"', '"sphere"'),
    "unknown-mode": 'mode = "dance"\n' + SINGLE_BODY,
    "no-bodies": "\n".join(SINGLE_BODY.splitlines()[:8]),
    "missing-velocity": SINGLE_BODY.replace(
        "velocity = { re = 0.0, im = 0.0 }", ""),
    "missing-coordinate": SINGLE_BODY.replace(
        "position = { re = 0.2, im = 0.1 }", "position = { re = 0.2 }"),
    "point-outside-chart": SINGLE_BODY.replace("re = 0.2", "re = 2.0", 1),
    "nonpositive-mass": SINGLE_BODY.replace("mass = 1.0", "mass = 0.0"),
    "zero-t-end": SINGLE_BODY.replace("t_end = 2.0", "t_end = 0.0"),
    "negative-samples": SINGLE_BODY.replace("samples = 10", "samples = -1"),
    "bad-tolerance": SINGLE_BODY.replace("[integrator]\n",
                                         "[integrator]\ntol = 0.0\n"),
    "coincident-bodies": PAIR.replace("re = -0.765", "re = 0.765"),
    "verify-missing-class": PAIR + '\nmode = "verify-re"\n',
    "verify-unknown-class": PAIR + '\nmode = "verify-re"\n'
                                   '[verify]\nclass = "circular"\n',
    "solve-missing-family": 'mode = "solve-re"\nR = 1.7\n',
    "solve-unknown-family": 'mode = "solve-re"\nR = 1.7\n'
                            '[solve]\nfamily = "square4"\n',
    "solve-missing-argument": 'mode = "solve-re"\nR = 1.7\n'
                              '[solve]\nfamily = "elliptic2"\nm1 = 1.0\n',
}


class TestConfigErrors:
    @pytest.mark.parametrize("label", sorted(BAD_CONFIGS))
    def test_bad_config_exits_2(self, label, tmp_path, capsys):
        cfg = write_config(tmp_path, BAD_CONFIGS[label])
        code = main(["--config", cfg, "--out", str(tmp_path / "out")])
        assert code == EXIT_CONFIG
        assert "config error:" in capsys.readouterr().err

    def test_unreadable_config_path_exits_2(self, tmp_path, capsys):
        code = main(["--config", str(tmp_path / "absent.toml")])
        assert code == EXIT_CONFIG
        assert "config error:" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# solve-re mode
# ---------------------------------------------------------------------------

def solve_toml(family: str, **params: float) -> str:
    lines = [f"R = {R!r}", 'mode = "solve-re"', "", "[solve]",
             f'family = "{family}"']
    lines += [f"{k} = {float(v)!r}" for k, v in params.items()]
    return "\n".join(lines) + "\n"


class TestSolveRE:
    def test_equal_masses_place_partner_antipodally(self, tmp_path):
        cfg = write_config(tmp_path, solve_toml(
            "elliptic2", m1=1.4, m2=1.4, alpha=ALPHA))
        out = tmp_path / "out"
        assert main(["--config", cfg, "--out", str(out)]) == EXIT_OK
        report = read_report(out)
        assert report_value(report, "family") == "elliptic2"
        assert float(report_value(report, "r")) == pytest.approx(
            ALPHA, abs=1e-10)
        assert report_value(report, "mass_1") == report_value(report, "mass_2")
        assert report_value(report, "verified") == "true"

    def test_unequal_masses_preserve_ratio(self, tmp_path):
        cfg = write_config(tmp_path, solve_toml(
            "elliptic2", m1=2.3, m2=1.1, alpha=ALPHA))
        out = tmp_path / "out"
        assert main(["--config", cfg, "--out", str(out)]) == EXIT_OK
        report = read_report(out)
        m1 = float(report_value(report, "mass_1"))
        m2 = float(report_value(report, "mass_2"))
        assert m1 / m2 == pytest.approx(2.3 / 1.1, rel=1e-12)
        assert float(report_value(report, "residual_norm")) \
            <= relequil.RE_VERIFY_TOL

    def test_euler_feasible_central_mass(self, tmp_path):
        cfg = write_config(tmp_path, solve_toml(
            "euler3", m2=0.8, m3=0.8, alpha=0.4 * R, r=0.4 * R))
        out = tmp_path / "out"
        assert main(["--config", cfg, "--out", str(out)]) == EXIT_OK
        report = read_report(out)
        assert report_value(report, "feasible") == "true"
        assert float(report_value(report, "central_mass")) == pytest.approx(
            1.3603271076289574, abs=1e-10)
        assert report_value(report, "verified") == "true"

    def test_euler_unequal_radii_exits_infeasible(self, tmp_path, capsys):
        cfg = write_config(tmp_path, solve_toml(
            "euler3", m2=0.8, m3=0.8, alpha=0.4 * R, r=0.5 * R))
        out = tmp_path / "out"
        code = main(["--config", cfg, "--out", str(out)])
        assert code == EXIT_INFEASIBLE
        assert "infeasible" in capsys.readouterr().err
        report = read_report(out)
        assert report_value(report, "feasible") == "false"
        assert float(report_value(report, "determinant")) != 0.0
        assert "determinant" in report_value(report, "reason")

    def test_hyperbolic_pair_partner_angle(self, tmp_path):
        cfg = write_config(tmp_path, solve_toml(
            "hyperbolic2", m1=2.0, m2=1.0, theta1=0.7))
        out = tmp_path / "out"
        assert main(["--config", cfg, "--out", str(out)]) == EXIT_OK
        report = read_report(out)
        assert report_value(report, "family") == "hyperbolic2"
        assert float(report_value(report, "theta2")) == pytest.approx(
            2.6331522955740265, abs=1e-9)
        assert report_value(report, "verified") == "true"

    def test_hyperbolic_pair_on_common_perpendicular_infeasible(
            self, tmp_path, capsys):
        cfg = write_config(tmp_path, solve_toml(
            "hyperbolic2", m1=2.0, m2=1.0, theta1=math.pi / 2))
        code = main(["--config", cfg, "--out", str(tmp_path / "out")])
        assert code == EXIT_INFEASIBLE
        assert "infeasible" in capsys.readouterr().err

    def test_hyperbolic_pair_degenerate_angle_is_config_error(
            self, tmp_path, capsys):
        cfg = write_config(tmp_path, solve_toml(
            "hyperbolic2", m1=2.0, m2=1.0, theta1=0.0))
        code = main(["--config", cfg, "--out", str(tmp_path / "out")])
        assert code == EXIT_CONFIG
        assert "config error:" in capsys.readouterr().err

    def test_lagrange_triangle_masses_equal(self, tmp_path):
        cfg = write_config(tmp_path, solve_toml("lagrange3", r=0.45 * R))
        out = tmp_path / "out"
        assert main(["--config", cfg, "--out", str(out)]) == EXIT_OK
        report = read_report(out)
        assert report_value(report, "family") == "lagrange3"
        masses = [report_value(report, f"mass_{k}") for k in (1, 2, 3)]
        assert masses[0] == masses[1] == masses[2]
        assert float(masses[0]) == pytest.approx(8.359161900568145, rel=1e-10)
        assert report_value(report, "verified") == "true"

    def test_three_body_hyperbolic_outer_masses_match(self, tmp_path):
        cfg = write_config(tmp_path, solve_toml("hyperbolic3", theta1=0.9))
        out = tmp_path / "out"
        assert main(["--config", cfg, "--out", str(out)]) == EXIT_OK
        report = read_report(out)
        assert report_value(report, "family") == "hyperbolic3"
        assert report_value(report, "mass_1") == report_value(report, "mass_3")
        assert report_value(report, "verified") == "true"


# ---------------------------------------------------------------------------
# verify-re mode
# ---------------------------------------------------------------------------

class TestVerifyRE:
    def test_balanced_pair_verifies(self, tmp_path):
        cfg = write_config(tmp_path, 'mode = "verify-re"\n'
                           + antipodal_pair_toml())
        out = tmp_path / "out"
        assert main(["--config", cfg, "--out", str(out)]) == EXIT_OK
        report = read_report(out)
        assert report_value(report, "class") == "elliptic"
        assert report_value(report, "verified") == "true"
        assert float(report_value(report, "norm")) <= relequil.RE_VERIFY_TOL
        assert "residual_1 = " in report and "residual_2 = " in report

    def test_unbalanced_pair_reports_false_without_failing(self, tmp_path):
        cfg = write_config(tmp_path, 'mode = "verify-re"\n'
                           + antipodal_pair_toml(mass_factor=2.0))
        out = tmp_path / "out"
        # an unbalanced state is a negative verification, not a tool error
        assert main(["--config", cfg, "--out", str(out)]) == EXIT_OK
        report = read_report(out)
        assert report_value(report, "verified") == "false"
        assert float(report_value(report, "norm")) > 1e-3

    def test_parabolic_class_on_halfplane(self, tmp_path):
        cfg = write_config(tmp_path, """
mode = "verify-re"
R = 1.7
chart = "halfplane"

[verify]
class = "parabolic"

[[bodies]]
mass = 1.0
position = { re = 0.3, im = 1.0 }
velocity = { re = -0.5, im = 0.0 }

[[bodies]]
mass = 1.0
position = { re = -0.5, im = 2.0 }
velocity = { re = -0.5, im = 0.0 }
""")
        out = tmp_path / "out"
        assert main(["--config", cfg, "--out", str(out)]) == EXIT_OK
        report = read_report(out)
        assert report_value(report, "class") == "parabolic"
        assert report_value(report, "verified") == "false"
        assert float(report_value(report, "scaled_norm")) > 0

    def test_chart_mismatch_is_config_error(self, tmp_path, capsys):
        text = antipodal_pair_toml().replace('class = "elliptic"',
                                             'class = "hyperbolic"')
        cfg = write_config(tmp_path, 'mode = "verify-re"\n' + text)
        code = main(["--config", cfg, "--out", str(tmp_path / "out")])
        assert code == EXIT_CONFIG
        assert "config error:" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# certify-parabolic mode
# ---------------------------------------------------------------------------

CERTIFY = """
mode = "certify-parabolic"
R = 1.7

[certify]
n = 3
samples = 400
seed = 0
"""

CERTIFY_MULTI = """
mode = "certify-parabolic"
R = 1.7

[certify]
n = [2, 3, 4]
samples = 300
seed = 7
"""


class TestCertifyParabolic:
    def test_single_n_finds_no_solution(self, tmp_path):
        cfg = write_config(tmp_path, CERTIFY)
        out = tmp_path / "out"
        assert main(["--config", cfg, "--out", str(out)]) == EXIT_OK
        report = read_report(out)
        assert report_value(report, "conclusion") == "no solution found"
        assert report_value(report, "samples") == "400"
        assert report_value(report, "seed") == "0"
        assert "n = 3: holds = true" in report

    def test_parallel_jobs_match_serial_bytes(self, tmp_path):
        cfg = write_config(tmp_path, CERTIFY_MULTI)
        reports = []
        for jobs, sub in (("1", "serial"), ("3", "parallel")):
            out = tmp_path / sub
            assert main(["--config", cfg, "--out", str(out),
                         "--jobs", jobs, "--deterministic"]) == EXIT_OK
            reports.append((out / "report.txt").read_bytes())
        assert reports[0] == reports[1]
        text = reports[0].decode()
        for n in (2, 3, 4):
            assert f"n = {n}: holds = true" in text
        assert "conclusion = no solution found" in text


# ---------------------------------------------------------------------------
# report mode
# ---------------------------------------------------------------------------

class TestReportMode:
    def test_first_integrals_agree_across_charts(self, tmp_path):
        cfg = write_config(tmp_path, PAIR)
        out = tmp_path / "out"
        assert main(["--config", cfg, "--mode", "report",
                     "--out", str(out)]) == EXIT_OK
        report = read_report(out)
        assert report_value(report, "mode") == "report"
        assert report_value(report, "source_chart") == "disk"
        for chart in ("disk", "halfplane", "hyperboloid"):
            assert f"{chart}: h = " in report
        deviation = float(report_value(report, "max_cross_chart_deviation"))
        assert deviation < 1e-9


# ---------------------------------------------------------------------------
# installed console script
# ---------------------------------------------------------------------------

class TestConsoleScript:
    def test_entry_point_simulates(self, tmp_path):
        exe = shutil.which("curvednb")
        assert exe, "console script 'curvednb' is not on PATH"
        cfg = write_config(tmp_path, SINGLE_BODY)
        out = tmp_path / "out"
        proc = subprocess.run(
            [exe, "--config", cfg, "--out", str(out), "--deterministic"],
            capture_output=True, text=True, timeout=120)
        assert proc.returncode == EXIT_OK, proc.stderr
        assert "max_drift = 0" in proc.stdout
        assert (out / "trajectory.csv").exists()

    def test_missing_config_flag_is_usage_error(self):
        exe = shutil.which("curvednb")
        assert exe, "console script 'curvednb' is not on PATH"
        proc = subprocess.run([exe], capture_output=True, text=True,
                              timeout=60)
        assert proc.returncode == 2
        assert "usage:" in proc.stderr
