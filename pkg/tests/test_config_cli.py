import json
import subprocess
import sys

import numpy as np
import pytest

from cavitycool import cli, config, svg

SMALL_SPECTRUM = """\
trial.trials_per_sign = 40
trial.atoms_per_point = 4
spectrum.detunings_khz = 0:300:50, 500:560:10
"""


def run(tmp_path, *args):
    return cli.main([*map(str, args)])


def test_float_list_ranges():
    assert config._float_list("0:300:20") == [20.0 * i for i in range(16)]
    assert config._float_list("1, 2 ,3:4:0.5") == [1.0, 2.0, 3.0, 3.5, 4.0]
    with pytest.raises(ValueError):
        config._float_list("0:1:0")


def test_presets_load_with_quoted_settings():
    a, b = config.load_preset("fig3a"), config.load_preset("fig3b")
    assert a.trial.cool_duration == pytest.approx(250e-6) and a.cooling.repump_intensity == 5
    assert b.trial.cool_duration == pytest.approx(5e-3) and b.cooling.repump_intensity == 0.5
    assert b.trial.trials_per_sign == 299 and b.trial.atoms_per_point == 33
    assert b.trial.residual_field == pytest.approx(40e-7)
    assert config.load_preset("fig2").detection.expected_counts == 30
    with pytest.raises(config.ConfigError):
        config.load_preset("fig9")


def test_unknown_key_names_line(tmp_path, capsys):
    path = tmp_path / "bad.cfg"
    path.write_text("trap.axial_frequency_hz = 5e5\ntrap.bogus = 1\n")
    assert run(tmp_path, "detect-histogram", "--config", path, "--out", tmp_path / "o") == 2
    err = capsys.readouterr().err
    assert "trap.bogus" in err and ":2:" in err


def test_bad_value_and_validation_errors(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("detection.expected_counts = lots\n")
    assert run(tmp_path, "detect-histogram", "--config", path) == 2
    path.write_text("detection.lower_threshold = 0.9\n")
    assert run(tmp_path, "detect-histogram", "--config", path) == 2
    assert run(tmp_path, "detect-histogram", "--seed", -1) == 2
    assert run(tmp_path, "detect-histogram", "--config", tmp_path / "missing.cfg") == 2


def test_histogram_deterministic_and_rerenderable(tmp_path):
    outs = []
    for k in range(2):
        out = tmp_path / f"h{k}"
        assert run(tmp_path, "detect-histogram", "--preset", "fig2", "--seed", 3, "--out", out) == 0
        outs.append(out)
    csv_bytes = [(o / "histogram.csv").read_bytes() for o in outs]
    assert csv_bytes[0] == csv_bytes[1]
    text = csv_bytes[0].decode()
    assert text.startswith("# manifest=manifest.json lower=7.5 upper=22.5\n")
    rendered = (outs[0] / "histogram.svg").read_text()
    assert rendered.count("stroke-dasharray") == 2
    assert svg.histogram_svg(outs[0] / "histogram.csv") == rendered
    manifest = json.loads((outs[0] / "manifest.json").read_text())
    assert manifest["subcommand"] == "detect-histogram" and manifest["seed"] == 3
    assert manifest["outputs"] == ["histogram.csv", "histogram.svg"]
    assert manifest["config"]["detection"]["expected_counts"] == 30


def test_monte_carlo_histogram_depends_on_seed(tmp_path):
    path = tmp_path / "mc.cfg"
    path.write_text("histogram.method = monte_carlo\nhistogram.trials = 2000\n")
    a, b, c = (tmp_path / n for n in "abc")
    for out, seed in ((a, 1), (b, 1), (c, 2)):
        assert run(tmp_path, "detect-histogram", "--config", path, "--seed", seed, "--out", out) == 0
    assert (a / "histogram.csv").read_bytes() == (b / "histogram.csv").read_bytes()
    assert (a / "histogram.csv").read_bytes() != (c / "histogram.csv").read_bytes()


def test_spectrum_and_analyze(tmp_path):
    path = tmp_path / "s.cfg"
    path.write_text(SMALL_SPECTRUM)
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert run(tmp_path, "spectrum", "--preset", "fig3a", "--config", path,
                   "--seed", 9, "--out", out) == 0
    for name in ("spectrum.csv", "spectrum.svg", "analysis.json", "fit_residuals.csv"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    assert svg.spectrum_svg(a / "spectrum.csv") == (a / "spectrum.svg").read_text()
    res = json.loads((a / "analysis.json").read_text())
    assert res["raw"]["provenance"]["input"] == "spectrum.csv"
    assert res["lorentzian_subtracted"]["r0"] <= res["raw"]["r0"]

    c = tmp_path / "c"
    assert run(tmp_path, "analyze", a / "spectrum.csv", "--preset", "fig3a", "--out", c) == 0
    again = json.loads((c / "analysis.json").read_text())
    assert again["raw"]["r0"] == res["raw"]["r0"]


def test_empty_grid_is_config_error(tmp_path):
    path = tmp_path / "e.cfg"
    path.write_text("spectrum.detunings_khz =\n")
    assert run(tmp_path, "spectrum", "--config", path, "--out", tmp_path / "o") == 2


def test_analyze_missing_input(tmp_path):
    assert run(tmp_path, "analyze", tmp_path / "nope.csv", "--out", tmp_path / "o") == 2


def test_cooling_scan_single_point_and_bad_axis(tmp_path):
    path = tmp_path / "c.cfg"
    path.write_text("scan.axis = delta_r\nscan.values = -525\n")
    out = tmp_path / "o"
    assert run(tmp_path, "cooling-scan", "--config", path, "--out", out) == 0
    lines = (out / "cooling_scan.csv").read_text().splitlines()
    assert lines[0].startswith("#") and len(lines) == 3
    assert svg.scan_svg(out / "cooling_scan.csv") == (out / "cooling_scan.svg").read_text()
    path.write_text("scan.axis = temperature\nscan.values = 1\n")
    assert run(tmp_path, "cooling-scan", "--config", path, "--out", out) == 2


def test_scan_grid():
    s = config.ScanSettings(axis="i4", start=0.1, stop=10, num=9, spacing="log")
    np.testing.assert_allclose(s.grid()[[0, 4, 8]], [0.1, 1.0, 10.0])
    s = config.ScanSettings(axis="delta_r", start=-600, stop=-400, num=11)
    assert s.physical()[0] == pytest.approx(-2 * np.pi * 600e3)
    with pytest.raises(config.ConfigError):
        config.ScanSettings().grid()


def test_console_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "cavitycool.cli", "cooling-scan", "--preset", "fig4b",
                           "--out", str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    rows = (tmp_path / "cooling_scan.csv").read_text().splitlines()
    assert len(rows) == 2 + 9
