import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qheat.dissipation import Branch
from qheat.harness import cli
from qheat.harness.config import (
    PRESETS,
    ParseError,
    ValidationError,
    load_config,
    parse_config,
    preset_text,
)
from qheat.harness.csvio import HEADER, format_csv, read_csv, to_row, write_csv
from qheat.harness.sweep import config_hash, run_sweep, sweep_grid
from qheat.observables import PowerSpectrumPoint, spectrum_point

SMALL = """
[qubit]
omega0_GHz = 6.0
g_GHz = 1.0

[drive]
kind = tanh_cosine
a = 8

[sweep]
variable = f_L
start = 1.9
stop = 2.2
points = 7
refine = false

[bath.1]
kappa = 0.01
T_mK = 70
dephasing = false
"""


class TestConfig:
    def test_fig1c_preset(self):
        cfg = load_config("fig1c")
        assert (cfg.omega0_GHz, cfg.g_GHz, cfg.a) == (6.0, 1.0, 8.0)
        (bath,) = cfg.bath_couplings()
        assert bath.kappa == 0.01 and bath.T_mK == 70.0
        assert (cfg.sweep.start, cfg.sweep.stop, cfg.sweep.points) == (0.8, 6.6, 400)

    def test_fig3_preset(self):
        cfg = load_config("fig3")
        b1, b2 = cfg.bath_couplings()
        assert b1.T_mK == b2.T_mK == 210.0
        assert b1.active_branch is Branch.HIGH_GAP and b2.active_branch is Branch.LOW_GAP
        m = cfg.base_model()
        assert cfg.dt2_ns() == pytest.approx(math.pi / m.omega2, rel=1e-15)
        assert b1.filter.omega_r == pytest.approx(m.omega1)
        assert b2.filter.omega_r == pytest.approx(m.omega2)
        assert cfg.sweep.variable == "dt1"

    def test_all_presets_parse(self):
        for name in PRESETS:
            assert parse_config(preset_text(name)).baths
        assert load_config("fig1d").study.variable == "omega_ratio"
        assert load_config("fig1e").study.variable == "a"

    def test_load_from_path(self, tmp_path):
        p = tmp_path / "c.ini"
        p.write_text(SMALL)
        assert load_config(p).sweep.points == 7

    def test_negative_kappa(self):
        with pytest.raises(ValidationError) as err:
            parse_config(SMALL.replace("kappa = 0.01", "kappa = -0.01"))
        assert any("kappa" in v for v in err.value.violations)

    def test_all_violations_reported(self):
        bad = SMALL.replace("kappa = 0.01", "kappa = -1").replace("stop = 2.2", "stop = 1.0")
        bad = bad.replace("T_mK = 70", "T_mK = 0").replace("points = 7", "points = x")
        with pytest.raises(ValidationError) as err:
            parse_config(bad)
        text = "\n".join(err.value.violations)
        for key in ("kappa", "T_mK", "stop", "points"):
            assert key in text

    def test_unknown_key_and_section(self):
        with pytest.raises(ValidationError) as err:
            parse_config(SMALL + "\n[extra]\nfoo = 1\n[qubit.x]\n")
        assert len(err.value.violations) >= 2
        with pytest.raises(ValidationError):
            parse_config(SMALL.replace("g_GHz", "gee"))

    def test_parse_errors_carry_location(self):
        with pytest.raises(ParseError) as err:
            parse_config("kappa = 1\n" + SMALL)
        assert err.value.line == 1
        with pytest.raises(ParseError) as err:
            parse_config(SMALL.replace("a = 8", "a = 8\na = 9"))
        assert err.value.key == "a" and err.value.line is not None

    def test_missing_bath(self):
        with pytest.raises(ValidationError):
            parse_config(SMALL.split("[bath.1]")[0])

    def test_dt1_sweep_needs_square_wave(self):
        with pytest.raises(ValidationError):
            parse_config(SMALL.replace("variable = f_L", "variable = dt1"))


class TestSweep:
    def test_grid_refines_around_predictions(self):
        cfg = load_config("fig1c")
        grid = sweep_grid(cfg)
        assert np.all(np.diff(grid) > 0)
        assert grid[0] == pytest.approx(0.8) and grid[-1] == pytest.approx(6.6)
        step = (6.6 - 0.8) / 399
        near = np.abs(grid - 6.1622776601683795 / 3) < 0.02
        assert np.min(np.diff(grid[near])) < step / 4

    def test_one_point_equals_library_call(self):
        cfg = parse_config(SMALL.replace("points = 7", "points = 1"))
        rs = run_sweep(cfg)
        (pt,) = rs.points
        direct = spectrum_point(cfg.model_at(f_L=1.9), cfg.bath_couplings(), cfg.integrator())
        assert pt == direct
        assert rs.config_hash == config_hash(cfg) and rs.code_version

    def test_order_and_determinism_across_workers(self, tmp_path):
        cfg = parse_config(SMALL)
        one = run_sweep(cfg, workers=1)
        many = run_sweep(cfg, workers=3)
        assert [p.f_L for p in one.points] == pytest.approx(list(np.linspace(1.9, 2.2, 7)))
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        write_csv(one, a)
        write_csv(many, b)
        assert a.read_bytes() == b.read_bytes()

    def test_unconverged_points_do_not_abort(self):
        cfg = parse_config(SMALL + "\n[integrator]\nmax_cycles = 2\n")
        rs = run_sweep(cfg)
        assert len(rs.points) == 7 and not any(p.converged for p in rs.points)

    def test_dt1_sweep(self):
        text = preset_text("fig3").replace("points = 200", "points = 3").replace(
            "refine = true", "refine = false")
        rs = run_sweep(parse_config(text))
        assert [p.dt1 for p in rs.points] == pytest.approx([0.05, 0.25, 0.45])
        assert all(p.P2 is not None for p in rs.points)


finite = st.floats(allow_nan=False, allow_infinity=False, width=64, min_value=-1e-9, max_value=1e-9)
positive = st.floats(min_value=1e-6, max_value=1e3, allow_nan=False)


@st.composite
def spectrum_points(draw):
    converged = draw(st.booleans())
    f = draw(positive)
    dt1 = draw(positive)
    if not converged:
        return PowerSpectrumPoint(f, dt1, None, None, None, None, None, None, None, False,
                                  draw(st.integers(1, 20000)))
    return PowerSpectrumPoint(
        f, dt1, draw(finite), draw(finite), draw(st.one_of(st.none(), finite)),
        draw(st.floats(-10, 10)), draw(st.floats(0, 1)),
        draw(st.one_of(st.none(), st.integers(-10, 10))), draw(st.floats(0.5, 1)),
        True, draw(st.integers(1, 20000)),
    )


class TestCsv:
    def test_header_and_layout(self, tmp_path):
        pts = [
            PowerSpectrumPoint(1.5, 1 / 3, 2e-16, 2e-16, None, 0.1, 0.2, 1, 0.9, True, 12),
            PowerSpectrumPoint(1.6, 0.3125, None, None, None, None, None, None, None, False, 20000),
        ]
        path = write_csv(pts, tmp_path / "out.csv")
        raw = path.read_bytes().decode()
        lines = raw.split("\n")
        assert lines[0] == ",".join(HEADER)
        assert lines[0] == ("f_L_GHz,dt1_ns,P_total_fW,P1_fW,P2_fW,P_dimensionless,rho_ee_p,"
                            "winding,purity_min,converged,cycles")
        assert "\r" not in raw and raw.endswith("\n")
        assert "nan" not in raw.lower()
        assert lines[2] == "1.6,0.3125,,,,,,,,false,20000"
        assert lines[1].split(",")[2] == repr(2e-16 * 1e15)

    @settings(max_examples=200, deadline=None)
    @given(st.lists(spectrum_points(), min_size=1, max_size=5))
    def test_round_trip(self, tmp_path_factory, pts):
        path = tmp_path_factory.mktemp("rt") / "x.csv"
        write_csv(pts, path)
        rows = read_csv(path)
        assert rows == [to_row(p) for p in pts]

    def test_empty_results_rejected(self, tmp_path):
        with pytest.raises(ValueError):
            write_csv([], tmp_path / "x.csv")

    def test_io_error_names_path(self, tmp_path):
        pts = [PowerSpectrumPoint(1.0, 0.5, None, None, None, None, None, None, None, False, 1)]
        target = tmp_path / "missing" / "x.csv"
        with pytest.raises(OSError, match="missing"):
            write_csv(pts, target)

    def test_format_is_shortest_repr(self):
        pt = PowerSpectrumPoint(0.1, 0.2, 3e-16, 3e-16, None, 0.3, 0.4, 2, 0.7, True, 5)
        body = format_csv([pt]).split("\n")[1]
        assert body.startswith("0.1,0.2," + repr(3e-16 * 1e15) + ",")
        assert float(body.split(",")[2]) == 3e-16 * 1e15


class TestCli:
    def run(self, capsys, *argv):
        code = cli.main(list(argv))
        out, err = capsys.readouterr()
        return code, out, err

    def test_predict(self, capsys):
        code, out, _ = self.run(capsys, "predict", "fig1c")
        assert code == 0
        for value in ("6.162", "3.081", "2.054"):
            assert value in out
        assert "6.158004" in out  # first asymmetric resonance

    def test_unknown_flag(self, capsys):
        code, _, err = self.run(capsys, "predict", "fig1c", "--bogus")
        assert code == 1 and "usage" in err

    def test_no_command(self, capsys):
        assert self.run(capsys)[0] == 1

    def test_invalid_config(self, capsys, tmp_path):
        p = tmp_path / "bad.ini"
        p.write_text(SMALL.replace("kappa = 0.01", "kappa = -1"))
        code, _, err = self.run(capsys, "predict", str(p))
        assert code == 1 and "kappa" in err

    def test_missing_config(self, capsys, tmp_path):
        assert self.run(capsys, "predict", str(tmp_path / "none.ini"))[0] == 1

    def test_trajectory_winding(self, capsys, tmp_path):
        out = tmp_path / "traj.csv"
        f3 = (math.sqrt(40) + 6) / 6
        code, _, _ = self.run(capsys, "trajectory", "fig1c", "--f-ghz", repr(f3), "--out", str(out))
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "t_ns,omega_drive,sx,sy,sz,2R,2I,2D,purity,winding"
        assert {line.split(",")[-1] for line in lines[1:]} == {"3"}

    def test_trajectory_needs_frequency(self, capsys):
        assert self.run(capsys, "trajectory", "fig1c")[0] == 1

    def test_sweep_and_peaks(self, capsys, tmp_path):
        p = tmp_path / "s.ini"
        p.write_text(SMALL.replace("points = 7", "points = 31"))
        out = tmp_path / "s.csv"
        code, _, _ = self.run(capsys, "sweep", str(p), "--out", str(out))
        assert code == 0 and len(read_csv(out)) == 31
        code, table, _ = self.run(capsys, "peaks", str(p))
        assert code == 0
        row3 = [line for line in table.splitlines() if line.split()[0] == "3"][0]
        assert "2.054" in row3 and "-" not in row3.split()[2]

    def test_analytic_compare_exit_codes(self, capsys, tmp_path):
        square = tmp_path / "a30.ini"
        square.write_text(preset_text("fig1c").replace("a = 8", "a = 30"))
        code, out, _ = self.run(capsys, "analytic-compare", str(square))
        assert code == 0 and out.count("[ok]") == 3
        # n = 3 at a = 8 is just outside 5 %
        code, out, _ = self.run(capsys, "analytic-compare", "fig1c")
        assert code == 3 and "OUT OF TOLERANCE" in out

    def test_study_requires_section(self, capsys):
        assert self.run(capsys, "study", "fig1c")[0] == 1

    def test_study(self, capsys, tmp_path):
        p = tmp_path / "st.ini"
        p.write_text(SMALL + "\n[study]\nvariable = a\nvalues = 8\norders = 1\npoints = 9\n")
        code, out, _ = self.run(capsys, "study", str(p))
        assert code == 0 and "yes" in out
