"""Command-line batch driver.

    cavitycool detect-histogram --preset fig2 --out out/fig2
    cavitycool spectrum --preset fig3b --seed 7 --out out/fig3b
    cavitycool cooling-scan --preset fig4a --out out/fig4a
    cavitycool analyze out/fig3b/spectrum.csv --out out/fig3b-analysis

Exit codes: 0 success, 2 configuration error, 3 runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from . import analysis, config, cooling, detection, spectroscopy, svg
from .physics import thermal_distribution

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 2, 3
MANIFEST = "manifest.json"


def _write(path: Path, text: str) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(text)


def _manifest(out: Path, cmd: str, cfg, seed, outputs, started: float, extra=None) -> None:
    payload = {
        "subcommand": cmd,
        "seed": seed,
        "version": __version__,
        "config": config.snapshot(cfg),
        "outputs": sorted(outputs),
        "wall_time_s": round(time.perf_counter() - started, 6),
    }
    if extra:
        payload.update(extra)
    _write(out / MANIFEST, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def cmd_detect_histogram(cfg: config.RunConfig, seed: int, out: Path) -> list[str]:
    det = cfg.detection
    h = cfg.histogram
    rng = np.random.default_rng(seed)
    counts, p3, p4 = detection.count_histogram(det, h.max_count, h.method, h.trials, rng)
    csv_path = out / "histogram.csv"
    detection.write_histogram_csv(counts, p3, p4, csv_path)
    meta = f"manifest={MANIFEST} lower={det.lower_count:.10g} upper={det.upper_count:.10g}"
    text = csv_path.read_text()
    _write(csv_path, f"# {meta}\n{text}")
    _write(out / "histogram.svg", svg.histogram_svg(csv_path))
    return ["histogram.csv", "histogram.svg"]


def cmd_spectrum(cfg: config.RunConfig, seed: int, out: Path) -> list[str]:
    mags = cfg.spectrum.detunings
    if not mags:
        raise config.ConfigError("detuning grid is empty", key="spectrum.detunings_khz")
    motional = None
    if cfg.spectrum.inject_nbar is not None:
        motional = thermal_distribution(cfg.spectrum.inject_nbar, cfg.cooling.n_max)
    points = spectroscopy.acquire_spectrum(mags, cfg.trap, cfg.cooling, cfg.trial, cfg.detection,
                                           seed, motional=motional)
    csv_path = out / "spectrum.csv"
    spectroscopy.write_spectrum_csv(points, csv_path, comment=f"manifest={MANIFEST}")
    _write(out / "spectrum.svg", svg.spectrum_svg(csv_path))
    outputs = ["spectrum.csv", "spectrum.svg"]
    if cfg.spectrum.analyze:
        outputs += _analyze_points(points, cfg, csv_path, out)
    return outputs


def _analyze_points(points, cfg: config.RunConfig, source: Path, out: Path) -> list[str]:
    a = cfg.analysis
    results = analysis.analyze_all(points, cfg.trap.axial_frequency, window_halfwidth=a.window,
                                   background=a.background, carrier_halfwidth=a.carrier_halfwidth)
    provenance = {"input": source.name, "input_sha256": analysis.file_sha256(source),
                  "manifest": MANIFEST}
    analysis.write_results_json(results, out / "analysis.json", provenance)
    fit = results[analysis.LORENTZIAN].fit
    analysis.write_residuals_csv(points, fit, out / "fit_residuals.csv")
    return ["analysis.json", "fit_residuals.csv"]


def cmd_cooling_scan(cfg: config.RunConfig, seed, out: Path) -> list[str]:
    s = cfg.scan
    if s.axis not in cooling.SCAN_AXES:
        raise config.ConfigError(f"unknown scan axis {s.axis!r}; expected delta_r or i4", key="scan.axis")
    rows = cooling.parameter_scan(cfg.trap, cfg.cooling, s.axis, s.physical())
    csv_path = out / "cooling_scan.csv"
    cooling.write_scan_csv(rows, csv_path, comment=f"manifest={MANIFEST}")
    _write(out / "cooling_scan.svg", svg.scan_svg(csv_path))
    return ["cooling_scan.csv", "cooling_scan.svg"]


def cmd_analyze(cfg: config.RunConfig, seed, out: Path, source: Path) -> list[str]:
    try:
        points = spectroscopy.read_spectrum_csv(source)
    except (OSError, KeyError) as exc:
        raise config.ConfigError(f"cannot read spectrum: {exc}", key="input") from None
    return _analyze_points(points, cfg, source, out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cavitycool", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("detect-histogram", "spectrum", "cooling-scan", "analyze"):
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, help="key-value config file")
        p.add_argument("--preset", choices=config.PRESETS, help="built-in settings")
        p.add_argument("--seed", type=int, default=0, help="unsigned 64-bit seed")
        p.add_argument("--out", type=Path, default=Path("."), help="output directory")
        if name == "analyze":
            p.add_argument("input", type=Path, help="spectrum CSV")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    started = time.perf_counter()
    if not 0 <= args.seed < 2**64:
        print("error: --seed must be an unsigned 64-bit integer", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = config.load(args.config, args.preset)
    except config.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        args.out.mkdir(parents=True, exist_ok=True)
        handlers = {
            "detect-histogram": cmd_detect_histogram,
            "spectrum": cmd_spectrum,
            "cooling-scan": cmd_cooling_scan,
        }
        if args.command == "analyze":
            outputs = cmd_analyze(cfg, args.seed, args.out, args.input)
        else:
            outputs = handlers[args.command](cfg, args.seed, args.out)
        extra = {"preset": args.preset, "config_path": str(args.config) if args.config else None}
        _manifest(args.out, args.command, cfg, args.seed, outputs, started, extra)
    except config.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, RuntimeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    for name in outputs:
        print(args.out / name)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
