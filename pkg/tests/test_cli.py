import json

import numpy as np
import pytest

from procdamp import io as pio
from procdamp.cli import main

CFG = """\
tool.rake_angle_deg = 10
tool.relief_angle_deg = {gamma}
tool.relief_length = 100
kinematics.speed_sfm = 2680
kinematics.wavelength = 80
kinematics.amplitude = {amp}
kinematics.amplitude_convention = half
kinematics.feed = {feed}
grid.points_per_wavelength = 400
"""


@pytest.fixture
def config(tmp_path):
    def make(gamma=6, amp=3, feed=1, extra=""):
        path = tmp_path / f"run_{gamma}_{amp}_{feed}.cfg"
        path.write_text(CFG.format(gamma=gamma, amp=amp, feed=feed) + extra)
        return str(path)
    return make


def test_simulate_writes_surface_and_tip_path(config, tmp_path):
    out = tmp_path / "sim"
    assert main(["simulate", "--config", config(), "--out-dir", str(out)]) == 0
    surf = pio.read_surface_csv(out / "surface.csv")
    tip = pio.read_csv(out / "tip_path.csv", ("x", "y"))
    assert surf.heights.min() < tip["y"].min() + 1e-9
    assert np.any(surf.heights < np.minimum(0, tip["y"]) - 0.5)  # flattened troughs


def test_simulate_steep_relief_keeps_sinusoid(config, tmp_path):
    out = tmp_path / "sim25"
    assert main(["simulate", "--config", config(gamma=25), "--out-dir", str(out)]) == 0
    surf = pio.read_surface_csv(out / "surface.csv")
    tip = pio.read_csv(out / "tip_path.csv", ("x", "y"))
    np.testing.assert_allclose(surf.heights, np.minimum(0, tip["y"]), atol=1e-9)


def test_simulate_no_vibration(config, tmp_path):
    out = tmp_path / "flat"
    assert main(["simulate", "--config", config(amp=0), "--out-dir", str(out)]) == 0
    np.testing.assert_array_equal(pio.read_surface_csv(out / "surface.csv").heights, -1.0)


def test_simulate_bad_config_exit_2(config, tmp_path, capsys):
    code = main(["simulate", "--config", config(extra="grid.dx = 5\n"), "--out-dir", str(tmp_path)])
    assert code == 2
    assert "too coarse" in capsys.readouterr().err


def test_contact_loop(config, tmp_path, capsys):
    out = tmp_path / "loop"
    assert main(["contact-loop", "--config", config(feed=6), "--out-dir", str(out)]) == 0
    cols = pio.read_loop_csv(out / "loop.csv")
    assert cols["contact"].max() > 40
    assert "loop area" in capsys.readouterr().out


def test_sweep_matrix(config, tmp_path):
    out = tmp_path / "sweep"
    code = main(["sweep", "--config", config(feed=6), "--out-dir", str(out), "--workers", "2",
                 "--wavelengths", "40", "60", "80", "100", "--relief-lengths", "10", "30", "100"])
    assert code == 0
    assert len(list(out.glob("loop_L*_wl*.csv"))) == 12
    summary = pio.read_csv(out / "summary.csv", ("wavelength", "relief_length", "max_contact"))
    assert summary["max_contact"].size == 12
    rows = (out / "classification.csv").read_text().splitlines()
    labels = dict(r.split(",")[:2] for r in rows[1:])
    assert labels["10"] == "flat-max" and labels["100"] == "increasing"


def test_sweep_single_cell(config, tmp_path):
    out = tmp_path / "one"
    assert main(["sweep", "--config", config(feed=6), "--out-dir", str(out),
                 "--wavelengths", "40", "--relief-lengths", "10"]) == 0
    assert [p.name for p in out.glob("loop_*.csv")] == ["loop_L10_wl40.csv"]


def test_sweep_empty_list_is_usage_error(config, tmp_path):
    cfg = config(extra="sweep.wavelengths =\nsweep.relief_lengths = 10\n")
    assert main(["sweep", "--config", cfg, "--out-dir", str(tmp_path)]) == 2


def test_sweep_continues_past_failed_cell(config, tmp_path, capsys):
    out = tmp_path / "partial"
    code = main(["sweep", "--config", config(feed=6, extra="grid.dx = 0.25\n"), "--out-dir", str(out),
                 "--wavelengths", "40", "60", "--relief-lengths", "10"])
    assert code == 4
    assert "wavelength=40 failed" in capsys.readouterr().err
    assert [p.name for p in out.glob("loop_*.csv")] == ["loop_L10_wl60.csv"]


def test_sweep_json_summary(config, tmp_path):
    out = tmp_path / "js"
    assert main(["sweep", "--config", config(feed=6), "--out-dir", str(out), "--format", "json",
                 "--wavelengths", "40", "60", "--relief-lengths", "10"]) == 0
    recs = json.loads((out / "summary.json").read_text())
    assert [r["wavelength"] for r in recs] == [40, 60]


def _series(path, x, y, header="x,y"):
    path.write_text(header + "\n" + "".join(f"{float(a)!r},{float(b)!r}\n" for a, b in zip(x, y)))
    return str(path)


def test_fit_linear_prints_table_row(tmp_path, capsys):
    x = np.arange(10.0)
    series = _series(tmp_path / "line.csv", x, 2 * x + 1)
    assert main(["fit", series, "--mode", "linear", "--out-dir", str(tmp_path)]) == 0
    assert capsys.readouterr().out.strip() == "Y = 2.000 * X + 1.000, error 0.00"
    fit = pio.read_fit_json(tmp_path / "fit.json")
    assert fit.slope == pytest.approx(2) and fit.intercept == pytest.approx(1)


def test_fit_sinusoid_recovers_coefficients(tmp_path):
    x = np.linspace(0, 80, 81)
    series = _series(tmp_path / "s.csv", x, 4.6 + 0.166 * np.cos(np.pi * x / 20) + 0.712 * np.sin(np.pi * x / 20))
    assert main(["fit", series, "--mode", "sinusoid", "--wavelength", "40", "--out-dir", str(tmp_path)]) == 0
    fit = pio.read_fit_json(tmp_path / "fit.json")
    assert (fit.a0, fit.a1, fit.a2) == pytest.approx((4.6, 0.166, 0.712), abs=1e-9)


def test_fit_columns_and_bootstrap(tmp_path):
    x = np.arange(20.0)
    rng = np.random.default_rng(0)
    path = tmp_path / "t.csv"
    path.write_text("contact,force,junk\n" + "".join(f"{a},{2 * a + rng.normal()},0\n" for a in x))
    args = ["fit", str(path), "--mode", "linear", "--columns", "contact,force", "--bootstrap", "30",
            "--seed", "5", "--out-dir", str(tmp_path)]
    assert main(args) == 0
    first = (tmp_path / "fit.json").read_text()
    assert main(args) == 0
    assert (tmp_path / "fit.json").read_text() == first
    assert json.loads(first)["bootstrap"]["resamples"] == 30


def test_fit_errors(tmp_path):
    flat = _series(tmp_path / "d.csv", [1.0, 1.0, 1.0], [1.0, 2.0, 3.0])
    assert main(["fit", flat, "--mode", "linear", "--out-dir", str(tmp_path)]) == 4
    ok = _series(tmp_path / "ok.csv", [1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
    assert main(["fit", ok, "--mode", "sinusoid", "--out-dir", str(tmp_path)]) == 2
    assert main(["fit", ok, "--mode", "linear", "--columns", "a,b", "--out-dir", str(tmp_path)]) == 3
    assert main(["fit", str(tmp_path / "nope.csv"), "--mode", "linear"]) == 3


def _forces(path, x, fx, fy):
    path.write_text("x,fx,fy\n" + "".join(f"{float(a)!r},{float(b)!r},{float(c)!r}\n" for a, b, c in zip(x, fx, fy)))
    return str(path)


def test_crush_extract_recovers_pulse(config, tmp_path):
    x = np.linspace(0, 160, 321)
    base = 30 + 4 * np.sin(2 * np.pi * x / 80)
    pulse = np.where((x > 50) & (x < 70), 9.0, 0.0)
    crush = _forces(tmp_path / "c.csv", x, base, base + pulse)
    nocrush = _forces(tmp_path / "n.csv", x, base, base)
    out = tmp_path / "cf"
    assert main(["crush-extract", crush, nocrush, "--config", config(), "--out-dir", str(out)]) == 0
    cf = pio.read_csv(out / "crushing_force.csv", ("x", "crushing_force"))
    np.testing.assert_allclose(cf["crushing_force"], pulse, atol=1e-9)
    loop = pio.read_csv(out / "crush_loop.csv", ("x", "tool_y", "crushing_force"))
    assert loop["tool_y"].size == x.size


def test_crush_extract_identical_is_zero(tmp_path):
    x = np.linspace(0, 10, 11)
    f = _forces(tmp_path / "a.csv", x, x, x ** 2)
    assert main(["crush-extract", f, f, "--out-dir", str(tmp_path / "z")]) == 0
    assert np.all(pio.read_csv(tmp_path / "z" / "crushing_force.csv")["crushing_force"] == 0)
    assert not (tmp_path / "z" / "crush_loop.csv").exists()


def test_crush_extract_errors(tmp_path, capsys):
    good = _forces(tmp_path / "g.csv", [0.0, 1.0, 2.0], [1.0, 1.0, 1.0], [2.0, 2.0, 2.0])
    bad = tmp_path / "b.csv"
    bad.write_text("0,1,2\n1,1,2\n")
    assert main(["crush-extract", str(bad), good, "--out-dir", str(tmp_path)]) == 3
    assert "line 1" in capsys.readouterr().err
    far = _forces(tmp_path / "f.csv", [10.0, 11.0], [1.0, 1.0], [2.0, 2.0])
    assert main(["crush-extract", good, far, "--out-dir", str(tmp_path)]) == 4


def test_shearplane_command(tmp_path):
    cfg = tmp_path / "sp.cfg"
    cfg.write_text("shearplane.mean_depth = 6\nshearplane.amplitude = 1.5\nshearplane.wavelength = 40\n"
                   "shearplane.phi = 0.2, 0.5\nshearplane.samples = 64\n")
    out = tmp_path / "sp"
    assert main(["shearplane", "--config", str(cfg), "--out-dir", str(out)]) == 0
    summary = pio.read_csv(out / "shearplane_summary.csv")
    assert list(summary["jumps"]) == [1, 0]
    assert np.all(summary["phase_lead"] > 0)
    series = pio.read_csv(out / "shear_phi0p5.csv", ("tip_x", "length", "chip_thickness"))
    assert series["length"].size == 64


def test_missing_subcommand_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2
