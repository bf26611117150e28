"""Synthetic Raman spectra after short (hot) and long (cold) cooling."""
import numpy as np

from cavitycool import acquire_spectrum, config

TWO_PI = 2 * np.pi

for preset in ("fig3a", "fig3b"):
    cfg = config.load_preset(preset)
    pts = acquire_spectrum(cfg.spectrum.detunings, cfg.trap, cfg.cooling, cfg.trial,
                           cfg.detection, seed=1)
    print(f"--- {preset}: {cfg.trial.cool_duration * 1e6:.0f} us cooling, "
          f"I4 = {cfg.cooling.repump_intensity} Isat")
    for pt in pts:
        if abs(abs(pt.detuning) / TWO_PI - 530e3) < 1 or pt.detuning == 0:
            print(f"delta = {pt.detuning / TWO_PI / 1e3:+6.0f} kHz   P4 = {pt.p4:.3f} +- {pt.p4_error:.3f}"
                  f"   ({pt.inconclusive} inconclusive of {pt.total_trials})")
