"""Photon-count state detection: histograms, thresholds and the confusion matrix."""
import numpy as np

from cavitycool import DetectionConfig, confusion_matrix, presence_check
from cavitycool.detection import Classification, count_histogram

cfg = DetectionConfig(expected_counts=30.0, blocked_mean=0.5)
print(f"thresholds: F4 if N < {cfg.lower_count}, F3/empty if N > {cfg.upper_count}")

# %% the two count distributions
counts, p3, p4 = count_histogram(cfg, 45)
for n in range(0, 46, 5):
    print(f"N = {n:2d}   P(N|F3) = {p3[n]:.4f}   P(N|F4) = {p4[n]:.4f}")

# %% exact classification probabilities without optical-pumping flips
cm = confusion_matrix(cfg)
for state in ("F3", "F4"):
    print(f"{state}: correct {cm.correct(state):.4f}, inconclusive {cm.inconclusive(state):.4f}, "
          f"confidence {cm.confidence(state):.6f}")

# %% an F4 atom that may be pumped to F3 during the window
rng = np.random.default_rng(7)
for rate in (0.0, 250.0, 1000.0):
    mc = confusion_matrix(DetectionConfig(flip_rate_4to3=rate), "monte_carlo", 50_000, rng)
    print(f"flip rate {rate:6.0f}/s: F4 confidence {mc.confidence('F4'):.4f}, "
          f"inconclusive {mc.inconclusive('F4'):.4f}")

# %% presence check with the F=3 repumper in the second window
for atom in ("F3", "F4", "EMPTY"):
    res = presence_check(atom, cfg, rng)
    print(f"{atom:5s} -> {res.hyperfine.value:12s} present={res.present}")
assert presence_check("EMPTY", cfg, rng).hyperfine is not Classification.F4_PRESENT
