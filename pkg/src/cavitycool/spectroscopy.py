"""Synthetic Raman spectra from the trial protocol.

One trial is: sideband cool for ``cool_duration`` -> optically pump to F=3
(Zeeman sublevel randomised) -> Raman pulse of length ``raman_duration`` at
detuning ``delta_r`` -> two-window state/presence detection. A spectrum point
pools ``trials_per_sign`` trials at each sign of ``|delta_r|`` from
``atoms_per_point`` independently drawn atoms.

Randomness: every (point, atom) pair owns a ``SeedSequence`` child keyed by
its indices, so results do not depend on evaluation order.
"""

from __future__ import annotations

import csv
import functools
from dataclasses import dataclass, replace

import numpy as np

from . import constants as C
from .cooling import CoolingConfig, cooled_distribution
from .detection import (COLUMNS, Classification, DetectionConfig, TrueState,
                        classify_codes, presence_check, simulate_probe_windows)
from .physics import (LOWER, RAISE, AtomState, MotionalDistribution, TrapConfig,
                      carrier_rabi, sideband_rabi, zeeman_shift)

AVERAGED = "averaged"
COHERENT = "coherent"

PUMP_PULSE = 1e-6  # s, each of the Omega_4 / Omega_4' pulses


@dataclass(frozen=True)
class TrialConfig:
    cool_duration: float = 5e-3
    pump_pulse_pairs: int = 10
    pump_success_per_pair: float = 0.9
    raman_duration: float = 500e-6
    trials_per_sign: int = 299
    atoms_per_point: int = 33
    residual_field: float = 40e-3 * C.GAUSS  # T
    survival_lifetime: float = np.inf
    transfer_model: str = AVERAGED
    background: float = 0.024
    spatial_phase: float | None = None  # None: draw per atom, uniform on [0, pi/2]
    delta_m2_lines: bool = False

    def __post_init__(self):
        for name in ("pump_success_per_pair", "background"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must be a probability")
        for name in ("cool_duration", "raman_duration", "residual_field"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.trials_per_sign < 1 or self.atoms_per_point < 1 or self.pump_pulse_pairs < 0:
            raise ValueError("trial counts must be positive")
        if self.survival_lifetime <= 0:
            raise ValueError("survival_lifetime must be positive")
        if self.transfer_model not in (AVERAGED, COHERENT):
            raise ValueError(f"transfer_model must be {AVERAGED!r} or {COHERENT!r}")
        if self.spatial_phase is not None and not 0 <= self.spatial_phase <= np.pi / 2 + 1e-12:
            raise ValueError("spatial_phase must lie in [0, pi/2]")

    @property
    def pump_failure(self) -> float:
        return (1.0 - self.pump_success_per_pair) ** self.pump_pulse_pairs

    def trial_time(self, detection: DetectionConfig) -> float:
        return (self.cool_duration + 2 * self.pump_pulse_pairs * PUMP_PULSE
                + self.raman_duration + 2 * detection.window)


@dataclass(frozen=True)
class SpectrumPoint:
    detuning: float  # rad/s
    transfers: int
    valid_trials: int
    inconclusive: int = 0
    lost: int = 0

    def __post_init__(self):
        if not 0 <= self.transfers <= self.valid_trials:
            raise ValueError("need 0 <= transfers <= valid_trials")

    @property
    def total_trials(self) -> int:
        return self.valid_trials + self.inconclusive + self.lost

    @property
    def p4(self) -> float:
        return self.transfers / self.valid_trials if self.valid_trials else float("nan")

    @property
    def p4_error(self) -> float:
        if not self.valid_trials:
            return float("nan")
        p = self.p4
        return float(np.sqrt(p * (1.0 - p) / self.valid_trials))


@dataclass(frozen=True)
class TrialRecord:
    detuning: float
    zeeman: int
    vib: int
    post_manifold: int
    classification: Classification
    present: bool
    atom_survived: bool


def prepare_f3(state: AtomState, cfg: TrialConfig, rng: np.random.Generator) -> AtomState:
    """Optical pumping into F=3 with a random Zeeman sublevel; ``n`` is untouched."""
    if rng.random() < 1.0 - cfg.pump_failure:
        return AtomState(3, int(rng.integers(-3, 4)), state.vib)
    return AtomState(4, int(rng.integers(-4, 5)), state.vib)


def transfer_probabilities(zeeman, vib, delta_r: float, trap: TrapConfig,
                           cfg: TrialConfig) -> np.ndarray:
    """Raman-pulse transfer probability for F=3 atoms with sublevels ``zeeman`` and Fock numbers ``vib``.

    Each of the carrier, lower and raise lines contributes
    ``Omega^2 / (Omega^2 + Delta^2)`` times 1/2 (averaged) or the Rabi
    ``sin^2`` (coherent); lines sit at ``delta_Z(m) + {0, -w_a, +w_a}``. The
    sum is clamped to [0, 1] and the background folded in as
    ``p + p_bg (1 - p)``.
    """
    m = np.atleast_1d(np.asarray(zeeman, dtype=int))
    n = np.atleast_1d(np.asarray(vib, dtype=int))
    m, n = np.broadcast_arrays(m, n)
    alpha, eta, w = trap.spatial_phase, trap.lamb_dicke, trap.axial_frequency
    base = trap.base_rabi
    sin2a = abs(np.sin(2.0 * alpha))
    rabis = (
        (np.full(n.shape, carrier_rabi(base, alpha)), 0.0),
        (eta * np.sqrt(n) * sin2a * base, -w),
        (eta * np.sqrt(n + 1.0) * sin2a * base, +w),
    )
    m4_shifts = [0] + ([-2, 2] if cfg.delta_m2_lines else [])
    signal = np.zeros(n.shape)
    for dm in m4_shifts:
        m4 = m + dm
        ok = np.abs(m4) <= 4
        z = C.TWO_PI * np.array([zeeman_shift(a, b, cfg.residual_field) if v else 0.0
                                 for a, b, v in zip(m.ravel(), m4.ravel(), ok.ravel())]).reshape(m.shape)
        for rabi, offset in rabis:
            delta = delta_r - z - offset
            signal += np.where(ok, _line(rabi, delta, cfg), 0.0)
    signal = np.clip(signal, 0.0, 1.0)
    return signal + cfg.background * (1.0 - signal)


def _line(rabi, delta, cfg: TrialConfig):
    r2 = np.square(rabi)
    gen2 = r2 + np.square(delta)
    with np.errstate(invalid="ignore", divide="ignore"):
        amp = np.where(gen2 > 0, r2 / gen2, 0.0)
    if cfg.transfer_model == AVERAGED:
        return 0.5 * amp
    return amp * np.sin(0.5 * np.sqrt(gen2) * cfg.raman_duration) ** 2


def raman_transfer_probability(state: AtomState, delta_r: float, trap: TrapConfig,
                               cfg: TrialConfig) -> float:
    if state.manifold != 3:
        raise ValueError("Raman transfer starts from F=3")
    return float(transfer_probabilities(state.zeeman, state.vib, delta_r, trap, cfg)[0])


@functools.lru_cache(maxsize=64)
def _cooled(trap: TrapConfig, cooling: CoolingConfig) -> MotionalDistribution:
    return cooled_distribution(trap, cooling)


def motional_after_cooling(trap: TrapConfig, cooling: CoolingConfig,
                           trial: TrialConfig) -> MotionalDistribution:
    return _cooled(trap, replace(cooling, duration=trial.cool_duration))


def _trap_for(trap: TrapConfig, trial: TrialConfig, rng: np.random.Generator) -> TrapConfig:
    alpha = trial.spatial_phase if trial.spatial_phase is not None else rng.uniform(0.0, np.pi / 2)
    return replace(trap, spatial_phase=float(alpha))


def run_trial(delta_r: float, trap: TrapConfig, cooling: CoolingConfig, trial: TrialConfig,
              detection: DetectionConfig, rng: np.random.Generator,
              motional: MotionalDistribution | None = None) -> TrialRecord:
    """One measurement cycle for an atom sitting in a well described by ``trap``.

    ``motional`` overrides the post-cooling distribution (used to inject a
    known thermal state).
    """
    if motional is None:
        motional = motional_after_cooling(trap, cooling, trial)
    marginal = motional.vib_marginal
    n = int(rng.choice(marginal.size, p=marginal / marginal.sum()))
    state = prepare_f3(AtomState(3, 0, n), trial, rng)
    post = state.manifold
    if post == 3:
        p = raman_transfer_probability(state, delta_r, trap, trial)
        if rng.random() < p:
            post = 4
    survived = bool(rng.random() < np.exp(-trial.trial_time(detection) / trial.survival_lifetime))
    truth = (TrueState.F4 if post == 4 else TrueState.F3) if survived else TrueState.EMPTY
    result = presence_check(truth, detection, rng)
    return TrialRecord(delta_r, state.zeeman, n, post, result.hyperfine, result.present, survived)


def _atom_block(magnitude: float, trap: TrapConfig, motional: MotionalDistribution,
                trial: TrialConfig, detection: DetectionConfig,
                rng: np.random.Generator) -> np.ndarray:
    """Vectorised trials for one atom; returns counts[sign, (transfers, valid, inconclusive, lost)].

    Trials alternate +|delta|, -|delta|; once the atom is lost every later
    trial finds an empty cavity.
    """
    atom_trap = _trap_for(trap, trial, rng)
    k = 2 * trial.trials_per_sign
    signs = np.where(np.arange(k) % 2 == 0, 1.0, -1.0)

    marginal = motional.vib_marginal
    n = rng.choice(marginal.size, size=k, p=marginal / marginal.sum())
    pumped = rng.random(k) < 1.0 - trial.pump_failure
    m = np.where(pumped, rng.integers(-3, 4, k), 0)

    p = np.zeros(k)
    for s in (1.0, -1.0):
        sel = pumped & (signs == s)
        if sel.any():
            p[sel] = transfer_probabilities(m[sel], n[sel], s * magnitude, atom_trap, trial)
    transferred = rng.random(k) < p
    in_f4 = ~pumped | transferred

    per_trial = np.exp(-trial.trial_time(detection) / trial.survival_lifetime)
    if per_trial >= 1.0:
        lost_at = k
    else:
        lost_at = int(rng.geometric(1.0 - per_trial)) - 1
    alive = np.arange(k) < lost_at

    truth = np.where(~alive, 2, np.where(in_f4, 1, 0))  # 0: F3, 1: F4, 2: empty
    first = np.empty(k, dtype=np.int64)
    second = np.empty(k, dtype=np.int64)
    for code, state in enumerate((TrueState.F3, TrueState.F4, TrueState.EMPTY)):
        sel = truth == code
        if sel.any():
            first[sel] = simulate_probe_windows(state, detection, rng, int(sel.sum()))
            mean = detection.expected_counts if state is TrueState.EMPTY else detection.blocked_mean
            second[sel] = rng.poisson(mean, int(sel.sum()))
    c1 = classify_codes(first, detection)
    present = classify_codes(second, detection) == 0

    out = np.zeros((2, 4), dtype=np.int64)
    for row, s in enumerate((1.0, -1.0)):
        sel = signs == s
        ok = sel & present
        out[row] = [np.sum(ok & (c1 == 0)), np.sum(ok & (c1 != 2)),
                    np.sum(ok & (c1 == 2)), np.sum(sel & ~present)]
    return out


def acquire_spectrum(magnitudes, trap: TrapConfig, cooling: CoolingConfig, trial: TrialConfig,
                     detection: DetectionConfig, seed: int,
                     motional: MotionalDistribution | None = None) -> list[SpectrumPoint]:
    """Spectrum at ``+/-|delta_r|`` for every magnitude (rad/s), sorted by detuning.

    A zero magnitude yields a single point holding both halves of its trials.
    """
    mags = np.abs(np.asarray(list(magnitudes), dtype=float))
    if mags.size == 0:
        raise ValueError("detuning list is empty")
    if motional is None:
        motional = motional_after_cooling(trap, cooling, trial)
    root = np.random.SeedSequence(seed)
    points = []
    for i, mag in enumerate(mags):
        totals = np.zeros((2, 4), dtype=np.int64)
        for a in range(trial.atoms_per_point):
            ss = np.random.SeedSequence(root.entropy, spawn_key=(i, a))
            totals += _atom_block(mag, trap, motional, trial, detection, np.random.default_rng(ss))
        if mag == 0:
            points.append(SpectrumPoint(0.0, *totals.sum(axis=0).tolist()))
        else:
            points.append(SpectrumPoint(float(mag), *totals[0].tolist()))
            points.append(SpectrumPoint(float(-mag), *totals[1].tolist()))
    points.sort(key=lambda pt: pt.detuning)
    return points


SPECTRUM_COLUMNS = ["delta_r_hz", "p4", "p4_err", "transfers", "valid_trials", "inconclusive", "lost"]


def write_spectrum_csv(points, path, comment: str | None = None) -> None:
    with open(path, "w", newline="") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SPECTRUM_COLUMNS)
        for pt in points:
            w.writerow([f"{pt.detuning / C.TWO_PI:.10g}", f"{pt.p4:.10g}", f"{pt.p4_error:.10g}",
                        pt.transfers, pt.valid_trials, pt.inconclusive, pt.lost])


def read_spectrum_csv(path) -> list[SpectrumPoint]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(line for line in fh if not line.startswith("#")))
    missing = {"delta_r_hz", "transfers", "valid_trials"} - set(rows[0] if rows else {})
    if missing:
        raise ValueError(f"spectrum CSV lacks columns {sorted(missing)}")
    return [SpectrumPoint(C.TWO_PI * float(r["delta_r_hz"]), int(r["transfers"]),
                          int(r["valid_trials"]), int(r.get("inconclusive") or 0),
                          int(r.get("lost") or 0)) for r in rows]
