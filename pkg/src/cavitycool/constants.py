"""Physical constants (CODATA 2018) and the Cs D2 / trap numbers used as defaults.

All angular frequencies are in rad/s. Quantities quoted as plain frequencies
(Hz) carry a ``_HZ`` suffix.
"""

import numpy as np

TWO_PI = 2.0 * np.pi

HBAR = 1.054571817e-34  # J s
H_PLANCK = 6.62607015e-34  # J s
K_B = 1.380649e-23  # J/K
MU_B = 9.274010078e-24  # J/T
AMU = 1.660539067e-27  # kg

M_CS = 132.905451961 * AMU  # kg, 133Cs
MU_B_OVER_H = MU_B / H_PLANCK  # Hz/T, 1.39962 MHz/G

GAUSS = 1e-4  # T

# ground-state Lande factors of the Cs 6S1/2 hyperfine manifolds
G_F3 = -0.25
G_F4 = +0.25

# trap and beams
AXIAL_FREQUENCY = TWO_PI * 530e3
RADIAL_FREQUENCY = TWO_PI * 4.5e3
FORT_WAVELENGTH = 935.6e-9
RAMAN_WAVELENGTH = 945.6e-9
REPUMP_WAVELENGTH = 852.3e-9  # D2 line, carries spontaneous-emission recoil
FORT_DEPTH_HZ = -41e6
RAMAN_STARK_SHIFT_HZ = 0.84e6
BASE_RABI = TWO_PI * 200e3
CAVITY_LENGTH = 42.2e-6  # housed only; no operation uses it

# cavity QED
COUPLING_G0 = TWO_PI * 34e6  # 2 g0 / 2pi = 68 MHz
CAVITY_DECAY = TWO_PI * 4.1e6
ATOMIC_DECAY = TWO_PI * 2.6e6  # dipole decay gamma; full linewidth is 2 gamma
FORT_MODE_LINEWIDTH = TWO_PI * 0.8e9
RAMAN_MODE_LINEWIDTH = TWO_PI * 6e9
HYPERFINE_SPLITTING_HZ = 9.19261e9
