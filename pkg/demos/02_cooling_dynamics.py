"""Rate-equation cooling: time evolution, steady state and the two parameter scans."""
import numpy as np

from cavitycool import CoolingConfig, TrapConfig, build_rate_matrix, evolve, steady_state_nbar
from cavitycool.cooling import parameter_scan, sample_trajectories
from cavitycool.physics import thermal_distribution

TWO_PI = 2 * np.pi
trap, cfg = TrapConfig(), CoolingConfig()
rates = build_rate_matrix(trap, cfg)
print(f"repump rate gamma_p = 2pi x {cfg.repump_rate / TWO_PI / 1e3:.1f} kHz")

# %% cool from nbar = 2
p = thermal_distribution(2.0, cfg.n_max)
for t in (0, 50e-6, 250e-6, 1e-3, 5e-3):
    q = evolve(p, rates, t)
    print(f"t = {t * 1e3:5.2f} ms   nbar = {q.nbar:.4f}   P0 = {q.ground_population:.4f}")

# %% the same dynamics as quantum jumps
streams = [np.random.default_rng(s) for s in np.random.SeedSequence(1).spawn(2000)]
final = sample_trajectories(rates, p, 250e-6, streams) % (cfg.n_max + 1)
print(f"2000 trajectories at 250 us: nbar = {final.mean():.3f} +- {final.std() / np.sqrt(final.size):.3f}")

# %% steady state and its dependence on the cooling parameters
print(f"steady state nbar = {steady_state_nbar(trap, cfg):.4f}")
for row in parameter_scan(trap, cfg, "delta_r", TWO_PI * np.array([-600e3, -525e3, -400e3])):
    print(f"delta_R = {row['param_value'] / TWO_PI / 1e3:6.0f} kHz   r0 = {row['r0']:.4f}")
for row in parameter_scan(trap, cfg, "i4", [0.1, 1.0, 10.0]):
    print(f"I4 = {row['param_value']:4.1f} Isat   r0 = {row['r0']:.4f}")
