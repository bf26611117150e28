"""Closed-form physics of a single Cs atom in a standing-wave FORT inside a cavity.

Everything here is a pure function of its arguments. Frequencies are angular
(rad/s) unless the name says ``_hz``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import constants as C

LOWER = "lower"
RAISE = "raise"


@dataclass(frozen=True)
class TrapConfig:
    """Trap, Raman-beam and atom parameters for one FORT well.

    ``spatial_phase`` is the relative phase alpha between the FORT and the
    Raman standing waves at the well bottom; the couplings only depend on
    ``cos 2 alpha`` and ``sin 2 alpha`` so it is kept in ``[0, pi/2]``.
    """

    axial_frequency: float = C.AXIAL_FREQUENCY
    radial_frequency: float = C.RADIAL_FREQUENCY
    fort_wavelength: float = C.FORT_WAVELENGTH
    raman_wavelength: float = C.RAMAN_WAVELENGTH
    fort_depth: float = C.FORT_DEPTH_HZ
    raman_stark_shift: float = C.RAMAN_STARK_SHIFT_HZ
    base_rabi: float = C.BASE_RABI
    spatial_phase: float = np.pi / 4
    atom_mass: float = C.M_CS

    def __post_init__(self):
        for name in ("axial_frequency", "radial_frequency", "fort_wavelength",
                     "raman_wavelength", "atom_mass"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)!r}")
        if self.base_rabi < 0:
            raise ValueError("base_rabi must be non-negative")
        if not 0.0 <= self.spatial_phase <= np.pi / 2 + 1e-12:
            raise ValueError(f"spatial_phase must lie in [0, pi/2], got {self.spatial_phase!r}")

    @property
    def ground_state_size(self) -> float:
        return ground_state_size(self.atom_mass, self.axial_frequency)

    @property
    def lamb_dicke(self) -> float:
        return lamb_dicke(self.raman_wavelength, self.ground_state_size)

    @property
    def carrier_rabi(self) -> float:
        return carrier_rabi(self.base_rabi, self.spatial_phase)


@dataclass(frozen=True)
class CavityConfig:
    coupling: float = C.COUPLING_G0
    field_decay: float = C.CAVITY_DECAY
    atomic_decay: float = C.ATOMIC_DECAY
    fort_mode_linewidth: float = C.FORT_MODE_LINEWIDTH
    raman_mode_linewidth: float = C.RAMAN_MODE_LINEWIDTH
    hyperfine_splitting: float = C.HYPERFINE_SPLITTING_HZ

    @property
    def strong_coupling(self) -> bool:
        return self.coupling > self.atomic_decay and self.coupling > self.field_decay

    @property
    def critical_numbers(self) -> tuple[float, float]:
        return critical_numbers(self.coupling, self.field_decay, self.atomic_decay)


@dataclass(frozen=True)
class AtomState:
    """Hyperfine manifold, Zeeman sublevel and axial Fock number."""

    manifold: int
    zeeman: int = 0
    vib: int = 0

    def __post_init__(self):
        if self.manifold not in (3, 4):
            raise ValueError(f"manifold must be 3 or 4, got {self.manifold!r}")
        if abs(self.zeeman) > self.manifold:
            raise ValueError(f"|m| = {abs(self.zeeman)} exceeds F = {self.manifold}")
        if self.vib < 0:
            raise ValueError("vibrational number must be non-negative")


@dataclass(frozen=True)
class MotionalDistribution:
    """Populations ``p[F - 3, n]`` over the two manifolds and ``n = 0..n_max``."""

    populations: np.ndarray = field(repr=False)

    def __post_init__(self):
        p = np.array(self.populations, dtype=float)
        if p.ndim == 1:
            p = np.vstack([p, np.zeros_like(p)])
        if p.ndim != 2 or p.shape[0] != 2:
            raise ValueError("populations must have shape (2, n_max + 1)")
        if np.any(p < -1e-12):
            raise ValueError("populations must be non-negative")
        total = p.sum()
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"populations sum to {total!r}, not 1")
        p = np.clip(p, 0.0, None)
        p.setflags(write=False)
        object.__setattr__(self, "populations", p)

    @classmethod
    def from_vector(cls, vector) -> MotionalDistribution:
        """Build from a flat vector ordered ``(F=3, n=0..), (F=4, n=0..)``."""
        v = np.asarray(vector, dtype=float)
        return cls(v.reshape(2, -1))

    @property
    def n_max(self) -> int:
        return self.populations.shape[1] - 1

    @property
    def vector(self) -> np.ndarray:
        return self.populations.reshape(-1)

    @property
    def vib_marginal(self) -> np.ndarray:
        return self.populations.sum(axis=0)

    @property
    def nbar(self) -> float:
        return float(np.dot(np.arange(self.n_max + 1), self.vib_marginal))

    @property
    def ground_population(self) -> float:
        return float(self.vib_marginal[0])


def ground_state_size(mass: float, axial_frequency: float) -> float:
    """Zero-point extent ``sqrt(hbar / 2 m omega)`` of the axial wavepacket, in m."""
    if mass <= 0 or axial_frequency <= 0:
        raise ValueError("mass and trap frequency must be positive")
    return float(np.sqrt(C.HBAR / (2.0 * mass * axial_frequency)))


def lamb_dicke(wavelength: float, size: float) -> float:
    """Lamb-Dicke parameter ``(2 pi / lambda) z0`` along the cavity axis."""
    if wavelength <= 0:
        raise ValueError("wavelength must be positive")
    if size < 0:
        raise ValueError("wavepacket size must be non-negative")
    return float(C.TWO_PI / wavelength * size)


def carrier_rabi(base_rabi: float, alpha: float, scale: float = 1.0) -> float:
    """n -> n Rabi frequency, ``(1 + cos 2 alpha) / 2 * base_rabi``.

    ``scale`` is a per-transition strength (1 for m = 0 -> m = 0); Zeeman
    dependent weights are left to the caller.
    """
    if base_rabi < 0:
        raise ValueError("base_rabi must be non-negative")
    return float(scale * 0.5 * (1.0 + np.cos(2.0 * alpha)) * base_rabi)


def sideband_rabi(base_rabi: float, alpha: float, eta: float, n: int,
                  direction: str = LOWER, scale: float = 1.0) -> float:
    """First-order Lamb-Dicke sideband Rabi frequency.

    ``direction="lower"`` is n -> n-1 with ``eta sqrt(n)``; ``"raise"`` is
    n -> n+1 with ``eta sqrt(n + 1)``. Both carry ``|sin 2 alpha|``.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if direction == LOWER:
        ladder = np.sqrt(n)
    elif direction == RAISE:
        ladder = np.sqrt(n + 1)
    else:
        raise ValueError(f"direction must be 'lower' or 'raise', got {direction!r}")
    return float(scale * eta * ladder * abs(np.sin(2.0 * alpha)) * base_rabi)


def critical_numbers(g0: float, kappa: float, gamma: float) -> tuple[float, float]:
    """Critical photon and atom numbers ``(gamma^2 / 2 g0^2, 2 kappa gamma / g0^2)``."""
    if g0 <= 0:
        raise ValueError("coupling g0 must be positive")
    return gamma**2 / (2.0 * g0**2), 2.0 * kappa * gamma / g0**2


def thermal_weights(nbar: float, n_max: int) -> np.ndarray:
    """Untruncated thermal occupations ``nbar^n / (nbar + 1)^(n + 1)`` for n <= n_max."""
    if nbar < 0:
        raise ValueError("nbar must be non-negative")
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    n = np.arange(n_max + 1)
    if nbar == 0:
        return (n == 0).astype(float)
    ratio = nbar / (nbar + 1.0)
    return ratio**n / (nbar + 1.0)


def thermal_distribution(nbar: float, n_max: int, manifold: int = 3) -> MotionalDistribution:
    """Thermal Fock distribution in one manifold, renormalised after truncation."""
    w = thermal_weights(nbar, n_max)
    p = np.zeros((2, n_max + 1))
    p[manifold - 3] = w / w.sum()
    return MotionalDistribution(p)


def zeeman_shift(m3: int, m4: int, field_tesla: float,
                 g3: float = C.G_F3, g4: float = C.G_F4) -> float:
    """Linear Zeeman shift (Hz) of the ``F=3, m3 -> F=4, m4`` Raman line."""
    if abs(m3) > 3 or abs(m4) > 4:
        raise ValueError(f"invalid sublevels m3={m3}, m4={m4}")
    if field_tesla < 0:
        raise ValueError("field magnitude must be non-negative")
    return (g4 * m4 - g3 * m3) * C.MU_B_OVER_H * field_tesla


def zero_point_temperature(axial_frequency: float) -> float:
    """Zero-point energy ``hbar omega / 2`` expressed as a temperature (K)."""
    if axial_frequency < 0:
        raise ValueError("trap frequency must be non-negative")
    return C.HBAR * axial_frequency / (2.0 * C.K_B)
