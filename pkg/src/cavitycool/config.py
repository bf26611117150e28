"""Flat ``section.key = value`` run configuration.

Frequencies are written in Hz (or kHz where the key says so) and converted
to rad/s once, here. Unknown keys are rejected with the offending line.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
from importlib import resources
from pathlib import Path

import numpy as np

from . import constants as C
from .cooling import CoolingConfig
from .detection import DetectionConfig
from .physics import TrapConfig
from .spectroscopy import TrialConfig

PRESETS = ("fig2", "fig3a", "fig3b", "fig4a", "fig4b")


class ConfigError(ValueError):
    def __init__(self, message: str, key: str | None = None, line: int | None = None,
                 source: str | None = None):
        where = ""
        if source:
            where += f"{source}:"
        if line is not None:
            where += f"{line}:"
        if key:
            where += f" {key}:"
        super().__init__(f"{where} {message}".strip())
        self.key = key
        self.line = line


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _float_list(text: str) -> list[float]:
    """Comma-separated numbers; ``a:b:step`` expands to an inclusive arithmetic range."""
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        if ":" in tok:
            a, b, step = (float(v) for v in tok.split(":"))
            if step <= 0:
                raise ValueError("range step must be positive")
            k = int(np.floor((b - a) / step + 1e-9))
            out.extend(a + step * i for i in range(k + 1))
        else:
            out.append(float(tok))
    return out


def _phase(text: str):
    return None if text.strip().lower() == "random" else float(text)


HZ = C.TWO_PI
KHZ = C.TWO_PI * 1e3

# key -> (target section, dataclass field, parser, scale applied after parsing)
SCHEMA = {
    "trap.axial_frequency_hz": ("trap", "axial_frequency", float, HZ),
    "trap.radial_frequency_hz": ("trap", "radial_frequency", float, HZ),
    "trap.fort_wavelength_m": ("trap", "fort_wavelength", float, 1.0),
    "trap.raman_wavelength_m": ("trap", "raman_wavelength", float, 1.0),
    "trap.fort_depth_hz": ("trap", "fort_depth", float, 1.0),
    "trap.raman_stark_shift_hz": ("trap", "raman_stark_shift", float, 1.0),
    "trap.base_rabi_hz": ("trap", "base_rabi", float, HZ),
    "trap.spatial_phase": ("trap", "spatial_phase", float, 1.0),
    "trap.atom_mass_kg": ("trap", "atom_mass", float, 1.0),

    "cooling.raman_detuning_hz": ("cooling", "raman_detuning", float, HZ),
    "cooling.repump_intensity": ("cooling", "repump_intensity", float, 1.0),
    "cooling.repump_detuning_hz": ("cooling", "repump_detuning", float, HZ),
    "cooling.pump_linewidth_hz": ("cooling", "pump_linewidth", float, HZ),
    "cooling.recoil_lamb_dicke": ("cooling", "recoil_lamb_dicke", float, 1.0),
    "cooling.emission_geometry_factor": ("cooling", "emission_geometry_factor", float, 1.0),
    "cooling.n_max": ("cooling", "n_max", int, None),
    "cooling.duration_s": ("cooling", "duration", float, 1.0),
    "cooling.initial_nbar": ("cooling", "initial_nbar", float, 1.0),
    "cooling.include_raise": ("cooling", "include_raise", _bool, None),
    "cooling.saturate_channels": ("cooling", "saturate_channels", _bool, None),

    "detection.window_s": ("detection", "window", float, 1.0),
    "detection.expected_counts": ("detection", "expected_counts", float, 1.0),
    "detection.blocked_mean": ("detection", "blocked_mean", float, 1.0),
    "detection.flip_rate_4to3": ("detection", "flip_rate_4to3", float, 1.0),
    "detection.flip_rate_3to4": ("detection", "flip_rate_3to4", float, 1.0),
    "detection.lower_threshold": ("detection", "lower_threshold", float, 1.0),
    "detection.upper_threshold": ("detection", "upper_threshold", float, 1.0),

    "trial.cool_duration_s": ("trial", "cool_duration", float, 1.0),
    "trial.pump_pulse_pairs": ("trial", "pump_pulse_pairs", int, None),
    "trial.pump_success_per_pair": ("trial", "pump_success_per_pair", float, 1.0),
    "trial.raman_duration_s": ("trial", "raman_duration", float, 1.0),
    "trial.trials_per_sign": ("trial", "trials_per_sign", int, None),
    "trial.atoms_per_point": ("trial", "atoms_per_point", int, None),
    "trial.residual_field_mg": ("trial", "residual_field", float, 1e-3 * C.GAUSS),
    "trial.survival_lifetime_s": ("trial", "survival_lifetime", float, 1.0),
    "trial.transfer_model": ("trial", "transfer_model", str, None),
    "trial.background": ("trial", "background", float, 1.0),
    "trial.spatial_phase": ("trial", "spatial_phase", _phase, None),
    "trial.delta_m2_lines": ("trial", "delta_m2_lines", _bool, None),

    "spectrum.detunings_khz": ("spectrum", "detunings", _float_list, KHZ),
    "spectrum.analyze": ("spectrum", "analyze", _bool, None),
    "spectrum.inject_nbar": ("spectrum", "inject_nbar", float, 1.0),

    "analysis.window_khz": ("analysis", "window", float, KHZ),
    "analysis.carrier_halfwidth_khz": ("analysis", "carrier_halfwidth", float, KHZ),
    "analysis.background": ("analysis", "background", float, 1.0),

    "histogram.method": ("histogram", "method", str, None),
    "histogram.trials": ("histogram", "trials", int, None),
    "histogram.max_count": ("histogram", "max_count", int, None),

    "scan.axis": ("scan", "axis", str, None),
    "scan.values": ("scan", "values", _float_list, None),
    "scan.start": ("scan", "start", float, None),
    "scan.stop": ("scan", "stop", float, None),
    "scan.num": ("scan", "num", int, None),
    "scan.spacing": ("scan", "spacing", str, None),
}


@dataclass(frozen=True)
class SpectrumSettings:
    detunings: tuple = ()  # |delta_r| in rad/s
    analyze: bool = True
    inject_nbar: float | None = None


@dataclass(frozen=True)
class AnalysisSettings:
    window: float = C.TWO_PI * 30e3
    carrier_halfwidth: float = C.TWO_PI * 400e3
    background: float = 0.024


@dataclass(frozen=True)
class HistogramSettings:
    method: str = "exact"
    trials: int = 100_000
    max_count: int | None = None


@dataclass(frozen=True)
class ScanSettings:
    axis: str = "delta_r"
    values: tuple = ()
    start: float | None = None
    stop: float | None = None
    num: int = 11
    spacing: str = "linear"

    def grid(self) -> np.ndarray:
        """Scan points in natural units: kHz for ``delta_r``, I_sat for ``i4``."""
        if self.values:
            return np.asarray(self.values, dtype=float)
        if self.start is None or self.stop is None:
            raise ConfigError("scan needs either scan.values or scan.start/scan.stop", "scan")
        if self.spacing == "log":
            return np.geomspace(self.start, self.stop, self.num)
        if self.spacing != "linear":
            raise ConfigError(f"unknown spacing {self.spacing!r}", "scan.spacing")
        return np.linspace(self.start, self.stop, self.num)

    def physical(self) -> np.ndarray:
        g = self.grid()
        return g * KHZ if self.axis == "delta_r" else g


@dataclass(frozen=True)
class RunConfig:
    trap: TrapConfig = field(default_factory=TrapConfig)
    cooling: CoolingConfig = field(default_factory=CoolingConfig)
    detection: DetectionConfig = field(default_factory=DetectionConfig)
    trial: TrialConfig = field(default_factory=TrialConfig)
    spectrum: SpectrumSettings = field(default_factory=SpectrumSettings)
    analysis: AnalysisSettings = field(default_factory=AnalysisSettings)
    histogram: HistogramSettings = field(default_factory=HistogramSettings)
    scan: ScanSettings = field(default_factory=ScanSettings)
    entries: tuple = ()  # (key, raw value) pairs in the order applied


def parse_text(text: str, source: str = "<config>") -> list[tuple[int, str, str]]:
    entries = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("expected 'section.key = value'", line=lineno, source=source)
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in SCHEMA:
            raise ConfigError("unknown key", key=key, line=lineno, source=source)
        entries.append((lineno, key, value))
    return entries


def apply(cfg: RunConfig, entries, source: str = "<config>") -> RunConfig:
    updates: dict[str, dict] = {}
    log = list(cfg.entries)
    for lineno, key, value in entries:
        section, name, parse, scale = SCHEMA[key]
        try:
            v = parse(value)
        except ValueError as exc:
            raise ConfigError(f"bad value {value!r} ({exc})", key=key, line=lineno, source=source) from None
        if scale is not None and v is not None:
            v = tuple(x * scale for x in v) if isinstance(v, list) else v * scale
        elif isinstance(v, list):
            v = tuple(v)
        updates.setdefault(section, {})[name] = v
        log.append((key, value))
    out = cfg
    for section, kw in updates.items():
        try:
            out = replace(out, **{section: replace(getattr(out, section), **kw)})
        except (ValueError, TypeError) as exc:
            raise ConfigError(str(exc), key=section, source=source) from None
    return replace(out, entries=tuple(log))


def load_preset(name: str) -> RunConfig:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}", key="preset")
    text = resources.files("cavitycool.presets").joinpath(f"{name}.cfg").read_text()
    return apply(RunConfig(), parse_text(text, f"preset:{name}"), f"preset:{name}")


def load(path=None, preset: str | None = None) -> RunConfig:
    """Preset (if any) first, then the file's keys on top."""
    cfg = load_preset(preset) if preset else RunConfig()
    if path is not None:
        p = Path(path)
        try:
            text = p.read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}", source=str(p)) from None
        cfg = apply(cfg, parse_text(text, str(p)), str(p))
    return cfg


def snapshot(cfg: RunConfig) -> dict:
    """Resolved dataclass fields, JSON-friendly, for run manifests."""
    out = {}
    for section in ("trap", "cooling", "detection", "trial", "spectrum", "analysis", "histogram", "scan"):
        obj = getattr(cfg, section)
        d = {}
        for f in fields(obj):
            v = getattr(obj, f.name)
            if isinstance(v, float) and not np.isfinite(v):
                v = str(v)
            elif isinstance(v, tuple):
                v = list(v)
            d[f.name] = v
        out[section] = d
    out["entries"] = [list(e) for e in cfg.entries]
    return out
