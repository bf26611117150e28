"""From a spectrum to nbar and P0 with the three background treatments."""
from dataclasses import replace

import numpy as np

from cavitycool import acquire_spectrum, config
from cavitycool import analysis as A
from cavitycool.physics import thermal_distribution

cfg = config.load_preset("fig3b")
trap = replace(cfg.trap, spatial_phase=np.pi / 4)
trial = replace(cfg.trial, spatial_phase=np.pi / 4)

# %% inject a known thermal state and see what each mode recovers
for nbar in (0.05, 0.12):
    pts = acquire_spectrum(cfg.spectrum.detunings, trap, cfg.cooling, trial, cfg.detection,
                           seed=3, motional=thermal_distribution(nbar, 40))
    print(f"--- injected nbar = {nbar}  (r0 = {nbar / (nbar + 1):.3f})")
    for mode, res in A.analyze_all(pts, trap.axial_frequency).items():
        print(f"{mode:22s} r0 = {res.r0:+.3f} +- {res.r0_error:.3f}   "
              f"nbar = {res.nbar:+.3f}   P0 = {res.p0:.3f}")

# %% the thermal map itself
for r0 in (0.01, 0.05, 0.10):
    th = A.infer_nbar(r0, 0.03)
    print(f"r0 = {r0:.2f} -> nbar = {th.nbar:.3f} +- {th.nbar_error:.3f}, P0 = {th.p0:.2f}")
