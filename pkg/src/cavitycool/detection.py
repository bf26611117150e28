"""Photon-counting hyperfine-state detection through the cavity.

A resonant probe is transmitted when the atom is in F=3 (or the cavity is
empty) and blocked when it is in F=4. Counts in a window are Poisson with mean
``expected_counts`` while transmitting and ``blocked_mean`` while blocked; a
single optical-pumping flip may switch the rate partway through the window.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import stats


class Classification(enum.Enum):
    F4_PRESENT = "F4_PRESENT"
    F4_ABSENT = "F4_ABSENT"
    INCONCLUSIVE = "INCONCLUSIVE"


class TrueState(enum.Enum):
    F3 = "F3"
    F4 = "F4"
    EMPTY = "EMPTY"


ROWS = (Classification.F4_PRESENT, Classification.F4_ABSENT, Classification.INCONCLUSIVE)
COLUMNS = (TrueState.F3, TrueState.F4)


@dataclass(frozen=True)
class DetectionConfig:
    window: float = 100e-6
    expected_counts: float = 30.0
    blocked_mean: float = 0.5
    flip_rate_4to3: float = 0.0
    flip_rate_3to4: float = 0.0
    lower_threshold: float = 0.25
    upper_threshold: float = 0.75

    def __post_init__(self):
        if not 0 < self.lower_threshold < self.upper_threshold < 1:
            raise ValueError("thresholds must satisfy 0 < lower < upper < 1")
        if not self.expected_counts > self.blocked_mean >= 0:
            raise ValueError("need expected_counts > blocked_mean >= 0")
        if self.window <= 0:
            raise ValueError("window must be positive")
        if self.flip_rate_4to3 < 0 or self.flip_rate_3to4 < 0:
            raise ValueError("flip rates must be non-negative")

    @property
    def lower_count(self) -> float:
        return self.lower_threshold * self.expected_counts

    @property
    def upper_count(self) -> float:
        return self.upper_threshold * self.expected_counts

    @property
    def has_flips(self) -> bool:
        return self.flip_rate_4to3 > 0 or self.flip_rate_3to4 > 0


def _as_state(state) -> TrueState:
    return state if isinstance(state, TrueState) else TrueState(str(state).upper())


def simulate_probe_window(true_state, cfg: DetectionConfig, rng: np.random.Generator) -> int:
    """Sample the photon count of one probe window."""
    return int(simulate_probe_windows(true_state, cfg, rng, 1)[0])


def simulate_probe_windows(true_state, cfg: DetectionConfig, rng: np.random.Generator,
                           size: int) -> np.ndarray:
    """Vectorised :func:`simulate_probe_window` for ``size`` independent windows.

    Draw order is fixed (flip times, then counts before the flip, then counts
    after) so a seed reproduces the sequence exactly.
    """
    state = _as_state(true_state)
    if state is TrueState.EMPTY:
        return rng.poisson(cfg.expected_counts, size)
    if state is TrueState.F4:
        first, second, flip_rate = cfg.blocked_mean, cfg.expected_counts, cfg.flip_rate_4to3
    else:
        first, second, flip_rate = cfg.expected_counts, cfg.blocked_mean, cfg.flip_rate_3to4
    if flip_rate == 0:
        return rng.poisson(first, size)
    t_flip = rng.exponential(1.0 / flip_rate, size)
    frac = np.clip(t_flip / cfg.window, 0.0, 1.0)
    return rng.poisson(first * frac, size) + rng.poisson(second * (1.0 - frac), size)


def classify(count, cfg: DetectionConfig) -> Classification:
    if count < 0:
        raise ValueError("count must be non-negative")
    if count < cfg.lower_count:
        return Classification.F4_PRESENT
    if count > cfg.upper_count:
        return Classification.F4_ABSENT
    return Classification.INCONCLUSIVE


def classify_codes(counts, cfg: DetectionConfig) -> np.ndarray:
    """Integer codes (index into ``ROWS``) for an array of counts."""
    counts = np.asarray(counts)
    codes = np.full(counts.shape, 2, dtype=np.int8)
    codes[counts < cfg.lower_count] = 0
    codes[counts > cfg.upper_count] = 1
    return codes


@dataclass(frozen=True)
class ConfusionMatrix:
    """``matrix[i, j] = P(ROWS[i] | COLUMNS[j])``; ``stderr`` is zero for exact results."""

    matrix: np.ndarray
    stderr: np.ndarray
    method: str
    trials: int = 0

    def prob(self, outcome: Classification, state) -> float:
        return float(self.matrix[ROWS.index(outcome), COLUMNS.index(_as_state(state))])

    def correct(self, state) -> float:
        s = _as_state(state)
        right = Classification.F4_PRESENT if s is TrueState.F4 else Classification.F4_ABSENT
        return self.prob(right, s)

    def inconclusive(self, state) -> float:
        return self.prob(Classification.INCONCLUSIVE, state)

    def confidence(self, state) -> float:
        """Probability a conclusive result is correct."""
        return self.correct(state) / (1.0 - self.inconclusive(state))


def _exact_column(mean: float, cfg: DetectionConfig) -> np.ndarray:
    # N < x  <=>  N <= ceil(x) - 1 ;  N > y  <=>  N >= floor(y) + 1
    below = stats.poisson.cdf(np.ceil(cfg.lower_count) - 1, mean)
    above = stats.poisson.sf(np.floor(cfg.upper_count), mean)
    return np.array([below, above, 1.0 - below - above])


def confusion_matrix(cfg: DetectionConfig, method: str = "exact", trials: int = 100_000,
                     rng: np.random.Generator | None = None) -> ConfusionMatrix:
    """Classification probabilities given the true hyperfine state.

    ``method="exact"`` sums Poisson masses over the threshold regions and is
    only valid without flips; ``"monte_carlo"`` simulates ``trials`` windows
    per column and reports binomial standard errors.
    """
    if method == "exact":
        if cfg.has_flips:
            raise ValueError("exact confusion matrix requires zero flip rates; use method='monte_carlo'")
        m = np.column_stack([_exact_column(cfg.expected_counts, cfg),
                             _exact_column(cfg.blocked_mean, cfg)])
        return ConfusionMatrix(m, np.zeros_like(m), "exact")
    if method != "monte_carlo":
        raise ValueError(f"unknown method {method!r}")
    if rng is None:
        raise ValueError("monte_carlo method needs an rng")
    m = np.empty((3, 2))
    for j, state in enumerate(COLUMNS):
        codes = classify_codes(simulate_probe_windows(state, cfg, rng, trials), cfg)
        m[:, j] = np.bincount(codes, minlength=3) / trials
    err = np.sqrt(m * (1.0 - m) / trials)
    return ConfusionMatrix(m, err, "monte_carlo", trials)


class PresenceResult(NamedTuple):
    hyperfine: Classification
    present: bool


def presence_check(true_atom, cfg: DetectionConfig, rng: np.random.Generator) -> PresenceResult:
    """Two-window detection: probe alone, then probe with the F=3 repumper.

    In the second window any atom is pumped into F=4 and blocks the probe, so
    the atom counts as present when that window classifies as F4_PRESENT.
    """
    state = _as_state(true_atom)
    first = classify(simulate_probe_window(state, cfg, rng), cfg)
    blocked = TrueState.EMPTY if state is TrueState.EMPTY else TrueState.F4
    second = classify(int(rng.poisson(cfg.blocked_mean if blocked is TrueState.F4
                                      else cfg.expected_counts)), cfg)
    return PresenceResult(first, second is Classification.F4_PRESENT)


def count_histogram(cfg: DetectionConfig, max_count: int | None = None, method: str = "exact",
                    trials: int = 100_000, rng: np.random.Generator | None = None):
    """Count distributions ``P(N | F3)`` and ``P(N | F4)`` for ``N = 0..max_count``."""
    if max_count is None:
        max_count = int(np.ceil(cfg.expected_counts + 6 * np.sqrt(cfg.expected_counts))) + 1
    counts = np.arange(max_count + 1)
    if method == "exact":
        if cfg.has_flips:
            raise ValueError("exact histogram requires zero flip rates; use method='monte_carlo'")
        return counts, stats.poisson.pmf(counts, cfg.expected_counts), stats.poisson.pmf(counts, cfg.blocked_mean)
    if rng is None:
        raise ValueError("monte_carlo histogram needs an rng")
    cols = []
    for state in COLUMNS:
        n = simulate_probe_windows(state, cfg, rng, trials)
        cols.append(np.bincount(np.minimum(n, max_count), minlength=max_count + 1) / trials)
    return counts, cols[0], cols[1]


def write_histogram_csv(counts, p3, p4, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["count", "p_given_f3", "p_given_f4"])
        for n, a, b in zip(counts, p3, p4):
            w.writerow([int(n), f"{a:.10g}", f"{b:.10g}"])
