"""Rate-equation model of Raman sideband cooling on the axial Fock ladder.

States are ``(F, n)`` with ``F in {3, 4}`` and ``n = 0..n_max``, flattened as
``index = (F - 3) * (n_max + 1) + n``. From ``(3, n)`` three Raman channels
(carrier, lower and raise sideband) transfer to ``F = 4``; the repump returns
the atom to ``F = 3`` at the optical-pumping rate, kicking ``n`` by one with
probability set by the spontaneous-emission Lamb-Dicke factor.

The coherent F=3/F=4 dynamics are adiabatically eliminated: each channel is a
two-level line of width ``gamma_p`` (the repump rate). With
``saturate_channels`` the ``2 Omega^2`` power-broadening term is kept in the
denominator so a resonant channel can never outrun the repump.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace

import numpy as np
from scipy.integrate import solve_ivp

from . import constants as C
from .physics import (LOWER, RAISE, MotionalDistribution, TrapConfig,
                      carrier_rabi, lamb_dicke, sideband_rabi,
                      thermal_distribution)


@dataclass(frozen=True)
class CoolingConfig:
    raman_detuning: float = -C.TWO_PI * 525e3
    repump_intensity: float = 0.5  # units of I_sat
    repump_detuning: float = C.TWO_PI * 10e6
    pump_linewidth: float = 2.0 * C.ATOMIC_DECAY
    recoil_lamb_dicke: float | None = None  # None: derive from the trap at 852 nm
    emission_geometry_factor: float = 1.0 / 3.0
    n_max: int = 40
    duration: float = 5e-3
    initial_nbar: float = 2.0
    include_raise: bool = True
    saturate_channels: bool = True

    def __post_init__(self):
        if self.repump_intensity < 0:
            raise ValueError("repump_intensity must be non-negative")
        if self.n_max < 1:
            raise ValueError("n_max must be at least 1")
        if self.duration < 0:
            raise ValueError("duration must be non-negative")
        if not 0.0 <= self.emission_geometry_factor <= 1.0:
            raise ValueError("emission_geometry_factor must lie in [0, 1]")
        if self.pump_linewidth < 0:
            raise ValueError("pump_linewidth must be non-negative")
        if self.initial_nbar < 0:
            raise ValueError("initial_nbar must be non-negative")

    @property
    def repump_rate(self) -> float:
        """Optical pumping rate out of F=4, ``(Gamma/2) s / (1 + s + (2 Delta/Gamma)^2)``."""
        s = self.repump_intensity
        if self.pump_linewidth == 0 or s == 0:
            return 0.0
        detuning_term = (2.0 * self.repump_detuning / self.pump_linewidth) ** 2
        return 0.5 * self.pump_linewidth * s / (1.0 + s + detuning_term)

    def recoil_eta(self, trap: TrapConfig) -> float:
        if self.recoil_lamb_dicke is not None:
            return self.recoil_lamb_dicke
        return lamb_dicke(C.REPUMP_WAVELENGTH, trap.ground_state_size)


@dataclass(frozen=True)
class RateMatrix:
    """Generator ``G`` with ``dp/dt = G p``; columns sum to zero."""

    generator: np.ndarray
    n_max: int

    def index(self, manifold: int, n: int) -> int:
        return (manifold - 3) * (self.n_max + 1) + n

    @property
    def size(self) -> int:
        return self.generator.shape[0]


def channel_rate(rabi, detuning, gamma_p, saturate=True):
    """Adiabatically eliminated transfer rate of one driven two-level channel."""
    rabi2 = np.square(rabi)
    denom = gamma_p**2 + 4.0 * np.square(detuning)
    if saturate:
        denom = denom + 2.0 * rabi2
    with np.errstate(invalid="ignore", divide="ignore"):
        rate = np.where(rabi2 > 0, rabi2 * gamma_p / denom, 0.0)
    return rate


def raman_rates(trap: TrapConfig, cfg: CoolingConfig) -> dict[str, np.ndarray]:
    """Per-n Raman transfer rates out of ``(3, n)`` for each channel (1/s)."""
    n = np.arange(cfg.n_max + 1)
    gamma_p = cfg.repump_rate
    eta = trap.lamb_dicke
    alpha = trap.spatial_phase
    w = trap.axial_frequency
    d = cfg.raman_detuning

    carrier = np.full(n.shape, carrier_rabi(trap.base_rabi, alpha))
    lower = np.array([sideband_rabi(trap.base_rabi, alpha, eta, k, LOWER) for k in n])
    raise_ = np.array([sideband_rabi(trap.base_rabi, alpha, eta, k, RAISE) for k in n])
    if not cfg.include_raise:
        raise_[:] = 0.0
    raise_[-1] = 0.0  # n_max + 1 is outside the ladder

    drive = carrier.any() or lower.any() or raise_.any()
    if drive and gamma_p == 0:
        raise ValueError("Raman drive without repumping: no closed cooling cycle (gamma_p = 0)")

    sat = cfg.saturate_channels
    return {
        "carrier": channel_rate(carrier, d, gamma_p, sat),
        "lower": channel_rate(lower, d + w, gamma_p, sat),
        "raise": channel_rate(raise_, d - w, gamma_p, sat),
    }


def build_rate_matrix(trap: TrapConfig, cfg: CoolingConfig) -> RateMatrix:
    nmax = cfg.n_max
    dim = nmax + 1
    G = np.zeros((2 * dim, 2 * dim))
    rates = raman_rates(trap, cfg)

    def add(src, dst, rate):
        if rate > 0:
            G[dst, src] += rate
            G[src, src] -= rate

    for k in range(dim):
        src = k
        add(src, dim + k, rates["carrier"][k])
        if k > 0:
            add(src, dim + k - 1, rates["lower"][k])
        if k < nmax:
            add(src, dim + k + 1, rates["raise"][k])

    gamma_p = cfg.repump_rate
    heat = cfg.emission_geometry_factor * cfg.recoil_eta(trap) ** 2
    for k in range(dim):
        src = dim + k
        up = heat * (k + 1) if k < nmax else 0.0
        down = heat * k
        if up + down > 1.0:
            raise ValueError(f"recoil branching exceeds unity at n={k}; reduce n_max or eta_s")
        add(src, k, gamma_p * (1.0 - up - down))
        if k < nmax:
            add(src, k + 1, gamma_p * up)
        if k > 0:
            add(src, k - 1, gamma_p * down)
    return RateMatrix(G, nmax)


def evolve(dist: MotionalDistribution, rates: RateMatrix, duration: float,
           rtol: float = 1e-10, atol: float = 1e-13) -> MotionalDistribution:
    """Propagate ``dp/dt = G p`` for ``duration`` seconds with an implicit adaptive solver."""
    if duration < 0:
        raise ValueError("duration must be non-negative")
    if dist.n_max != rates.n_max:
        raise ValueError("distribution and rate matrix truncations differ")
    if duration == 0:
        return dist
    G = rates.generator
    sol = solve_ivp(lambda t, p: G @ p, (0.0, duration), dist.vector, method="Radau",
                    jac=G, rtol=rtol, atol=atol, t_eval=[duration])
    if not sol.success:
        raise RuntimeError(f"rate-equation integration failed at t={sol.t[-1] if sol.t.size else 0.0:.3e} s: "
                           f"{sol.message}")
    p = sol.y[:, -1]
    if abs(p.sum() - 1.0) > 1e-9 or p.min() < -1e-9:
        raise RuntimeError(f"probability not conserved: sum={p.sum():.12g}, min={p.min():.3e}")
    p = np.clip(p, 0.0, None)
    return MotionalDistribution.from_vector(p / p.sum())


def cooled_distribution(trap: TrapConfig, cfg: CoolingConfig,
                        start: MotionalDistribution | None = None) -> MotionalDistribution:
    """Distribution after ``cfg.duration`` of cooling from a thermal start."""
    if start is None:
        start = thermal_distribution(cfg.initial_nbar, cfg.n_max)
    return evolve(start, build_rate_matrix(trap, cfg), cfg.duration)


def steady_state(trap: TrapConfig, cfg: CoolingConfig,
                 gap: float = 1e-10) -> MotionalDistribution:
    """Stationary distribution of the cooling dynamics, the normalised null vector of ``G``.

    The generator is scaled by its fastest rate and decomposed by SVD. A
    second singular value below ``gap`` means the chain has more than one
    stationary state (e.g. every drive switched off) and raises RuntimeError.
    """
    rates = build_rate_matrix(trap, cfg)
    G = rates.generator
    rate_scale = np.max(np.abs(np.diag(G)))
    if rate_scale == 0:
        raise RuntimeError("rate matrix is zero; every state is stationary")
    _, sv, vt = np.linalg.svd(G / rate_scale)
    if sv[-2] < gap:
        raise RuntimeError(f"non-unique stationary state: second-smallest singular value {sv[-2]:.3e}")
    p = vt[-1]
    p = p / p.sum()
    if p.min() < -1e-9:
        raise RuntimeError(f"stationary vector has negative entries (min {p.min():.3e})")
    p = np.clip(p, 0.0, None)
    return MotionalDistribution.from_vector(p / p.sum())


def steady_state_nbar(trap: TrapConfig, cfg: CoolingConfig) -> float:
    return steady_state(trap, cfg).nbar


def sideband_ratio_prediction(trap: TrapConfig, cfg: CoolingConfig) -> float:
    nbar = steady_state_nbar(trap, cfg)
    return nbar / (nbar + 1.0)


SCAN_AXES = {"delta_r": "raman_detuning", "i4": "repump_intensity"}


def parameter_scan(trap: TrapConfig, cfg: CoolingConfig, axis: str, values) -> list[dict]:
    """Steady-state ``nbar`` and ``r0`` along one cooling parameter.

    ``axis`` is ``"delta_r"`` (values in rad/s) or ``"i4"`` (units of I_sat).
    """
    if axis not in SCAN_AXES:
        raise ValueError(f"unknown scan axis {axis!r}; expected one of {sorted(SCAN_AXES)}")
    rows = []
    for v in values:
        nbar = steady_state_nbar(trap, replace(cfg, **{SCAN_AXES[axis]: float(v)}))
        rows.append({"param_name": axis, "param_value": float(v),
                     "nbar_inf": nbar, "r0": nbar / (nbar + 1.0)})
    return rows


def write_scan_csv(rows: list[dict], path, comment: str | None = None) -> None:
    """``param_value`` is written in Hz for ``delta_r`` and in I_sat for ``i4``."""
    with open(path, "w", newline="") as fh:
        if comment:
            fh.write(f"# {comment}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["param_name", "param_value", "nbar_inf", "r0"])
        for r in rows:
            value = r["param_value"] / C.TWO_PI if r["param_name"] == "delta_r" else r["param_value"]
            writer.writerow([r["param_name"], f"{value:.10g}",
                             f"{r['nbar_inf']:.10g}", f"{r['r0']:.10g}"])


def sample_trajectories(rates: RateMatrix, start: MotionalDistribution, duration: float,
                        streams) -> np.ndarray:
    """Gillespie sampler of the jump process generated by ``rates``.

    ``streams`` is a sequence of ``numpy.random.Generator``, one per trajectory;
    returns the final flat state index of each trajectory.
    """
    G = rates.generator
    exit_rates = -np.diag(G)
    jump = np.where(np.eye(rates.size, dtype=bool), 0.0, G)
    with np.errstate(invalid="ignore", divide="ignore"):
        cumulative = np.cumsum(jump, axis=0) / exit_rates
    p0 = start.vector
    c0 = np.cumsum(p0)
    out = np.empty(len(streams), dtype=int)
    for i, rng in enumerate(streams):
        state = min(int(np.searchsorted(c0, rng.random() * c0[-1], side="right")), rates.size - 1)
        t = 0.0
        while True:
            rate = exit_rates[state]
            if rate <= 0:
                break
            t += rng.exponential(1.0 / rate)
            if t > duration:
                break
            col = cumulative[:, state]
            state = min(int(np.searchsorted(col, rng.random() * col[-1], side="right")),
                        rates.size - 1)
        out[i] = state
    return out
