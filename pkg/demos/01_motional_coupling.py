"""Length and frequency scales of a Cs atom in a 530 kHz FORT well."""
import numpy as np

from cavitycool import CavityConfig, TrapConfig, carrier_rabi, sideband_rabi, zeeman_shift
from cavitycool.physics import zero_point_temperature

TWO_PI = 2 * np.pi

# %% wavepacket size and Lamb-Dicke parameter
trap = TrapConfig()
print(f"z0  = {trap.ground_state_size * 1e9:.2f} nm")
print(f"eta = {trap.lamb_dicke:.4f}")
print(f"zero-point temperature = {zero_point_temperature(trap.axial_frequency) * 1e6:.1f} uK")

# %% the well phase alpha trades carrier strength for sideband strength
for alpha in np.linspace(0, np.pi / 2, 5):
    c = carrier_rabi(trap.base_rabi, alpha) / TWO_PI / 1e3
    s = sideband_rabi(trap.base_rabi, alpha, trap.lamb_dicke, 1) / TWO_PI / 1e3
    print(f"alpha = {alpha:5.3f}   carrier {c:7.2f} kHz   n=1 red sideband {s:6.2f} kHz")

# %% cavity QED: strong coupling
cav = CavityConfig()
n0, N0 = cav.critical_numbers
print(f"critical photon number n0 = {n0:.4f}, critical atom number N0 = {N0:.4f}")

# %% Zeeman shifts of the m -> m Raman lines in a residual 40 mG field
for m in range(-3, 4):
    print(f"m = {m:+d}: {zeeman_shift(m, m, 40e-7) / 1e3:+6.1f} kHz")
