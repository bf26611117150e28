"""Acceptance criteria, one PASS/FAIL line each.

Run ``pytest tests/test_acceptance.py -v``; the lines are also collected into
an "acceptance criteria" section of the terminal summary. Tolerances are the
published ones and are not adjusted to make a criterion pass.
"""

import time
from dataclasses import replace

import numpy as np

from cavitycool import analysis as A
from cavitycool import config, constants as C, cooling, detection
from cavitycool.physics import (TrapConfig, critical_numbers, thermal_distribution,
                                zero_point_temperature)
from cavitycool.spectroscopy import acquire_spectrum

from conftest import ACCEPTANCE_LINES

TWO_PI = 2 * np.pi
SEED = 20250101


def report(number, title, checks, elapsed, budget=None):
    """Print and record one line; ``checks`` maps a description to a bool."""
    ok = all(checks.values())
    if budget is not None:
        ok = ok and elapsed < budget
    failed = [k for k, v in checks.items() if not v]
    timing = f"{elapsed:.2f}s" + (f" (budget {budget:g}s)" if budget is not None else "")
    line = f"[{'PASS' if ok else 'FAIL'}] C{number} {title}: {timing}"
    if failed:
        line += "; failing: " + " | ".join(failed)
    line += "; " + " | ".join(k for k, v in checks.items() if v)
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def test_c1_constants():
    t = time.perf_counter()
    trap = TrapConfig()
    eta, z0 = trap.lamb_dicke, trap.ground_state_size
    t0 = zero_point_temperature(trap.axial_frequency)
    n0, N0 = critical_numbers(C.COUPLING_G0, C.CAVITY_DECAY, C.ATOMIC_DECAY)
    checks = {
        f"eta={eta:.4f} in 0.056+-0.001": abs(eta - 0.056) <= 0.001,
        f"z0={z0 * 1e9:.3f}nm in 8.5+-0.1": abs(z0 * 1e9 - 8.5) <= 0.1,
        f"T0={t0 * 1e6:.2f}uK in 13+-0.5": abs(t0 * 1e6 - 13) <= 0.5,
        f"n0={n0:.5f} within 2% of 0.0029": abs(n0 / 0.0029 - 1) <= 0.02,
        f"N0={N0:.5f} within 2% of 0.018 (off by {100 * (N0 / 0.018 - 1):+.1f}%)":
            abs(N0 / 0.018 - 1) <= 0.02,
    }
    report(1, "constants", checks, time.perf_counter() - t, budget=1.0)


def test_c2_thermometry_map():
    t = time.perf_counter()
    a, b = A.infer_nbar(0.05), A.infer_nbar(0.10)
    checks = {
        f"r0=0.05 -> P0={a.p0!r} == 0.95": a.p0 == 0.95,
        f"r0=0.10 -> nbar={b.nbar:.4f} rounds to 0.111": round(b.nbar, 3) == 0.111,
        "0.111 inside 0.12+-0.04": abs(round(b.nbar, 3) - 0.12) <= 0.04,
    }
    report(2, "thermometry map", checks, time.perf_counter() - t)


def test_c3_detection():
    t = time.perf_counter()
    cfg = detection.DetectionConfig(expected_counts=30.0, blocked_mean=0.5)
    exact = detection.confusion_matrix(cfg)
    mc = detection.confusion_matrix(cfg, "monte_carlo", 100_000, np.random.default_rng(SEED))
    sigma = np.sqrt(exact.matrix * (1 - exact.matrix) / mc.trials)
    mc_ok = bool(np.all(np.abs(mc.matrix - exact.matrix) <= np.maximum(3 * sigma, 1e-12)))

    flips = replace(cfg, flip_rate_4to3=250.0)  # a flip starts in 2.5% of F4 windows
    op = detection.confusion_matrix(flips, "monte_carlo", 100_000, np.random.default_rng(SEED + 1))
    checks = {
        f"P(F4_PRESENT|F4)={exact.correct('F4'):.6f} > 0.999": exact.correct("F4") > 0.999,
        f"P(F4_ABSENT|F3, conclusive)={exact.confidence('F3'):.6f} > 0.999 "
        f"(unconditional {exact.correct('F3'):.4f}, inconclusive {exact.inconclusive('F3'):.4f})":
            exact.confidence("F3") > 0.999,
        f"flip 250/s: confidence(F4)={op.confidence('F4'):.4f} >= 0.98": op.confidence("F4") >= 0.98,
        f"flip 250/s: inconclusive(F4)={op.inconclusive('F4'):.4f} < 0.02": op.inconclusive("F4") < 0.02,
        "Monte Carlo 1e5 within 3 sigma of exact in every cell": mc_ok,
    }
    report(3, "detection", checks, time.perf_counter() - t, budget=10.0)


def test_c4_spectrum_round_trip():
    t = time.perf_counter()
    cfg = config.load_preset("fig3b")
    trap = replace(cfg.trap, spatial_phase=np.pi / 4)
    trial = replace(cfg.trial, spatial_phase=np.pi / 4, residual_field=40e-3 * C.GAUSS)
    checks = {}
    for k, nbar in enumerate((0.05, 0.12)):
        pts = acquire_spectrum(cfg.spectrum.detunings, trap, cfg.cooling, trial, cfg.detection,
                               SEED + k, motional=thermal_distribution(nbar, cfg.cooling.n_max))
        res = A.analyze_all(pts, trap.axial_frequency, window_halfwidth=cfg.analysis.window)
        target = nbar / (nbar + 1)
        raw, const, lor = res[A.RAW].r0, res[A.CONSTANT].r0, res[A.LORENTZIAN].r0
        checks[f"nbar={nbar}: raw r0={raw:.3f} within 0.05 of {target:.3f}"] = abs(raw - target) <= 0.05
        checks[f"nbar={nbar}: order lor {lor:.3f} <= const {const:.3f} <= raw {raw:.3f}"] = \
            lor <= const <= raw
    report(4, "spectrum round-trip", checks, time.perf_counter() - t, budget=60.0)


def test_c5_ground_state_signature():
    t = time.perf_counter()
    cfg = config.load_preset("fig3b")
    wa = cfg.trap.axial_frequency
    pts = acquire_spectrum([wa], cfg.trap, cfg.cooling, cfg.trial, cfg.detection, SEED)
    red, blue = pts
    bg = cfg.trial.background
    checks = {
        f"red P4={red.p4:.4f}+-{red.p4_error:.4f} within 2 sigma of {bg}":
            abs(red.p4 - bg) <= 2 * red.p4_error,
        f"blue P4={blue.p4:.4f} exceeds {bg} by {(blue.p4 - bg) / blue.p4_error:.1f} sigma > 5":
            blue.p4 - bg > 5 * blue.p4_error,
    }
    report(5, "ground-state signature", checks, time.perf_counter() - t, budget=60.0)


def test_c6_cooling_robustness():
    t = time.perf_counter()
    a, b = config.load_preset("fig4a"), config.load_preset("fig4b")
    r_d = np.array([r["r0"] for r in cooling.parameter_scan(a.trap, a.cooling, "delta_r",
                                                            a.scan.physical())])
    r_i = np.array([r["r0"] for r in cooling.parameter_scan(b.trap, b.cooling, "i4",
                                                            b.scan.physical())])
    fig3b = config.load_preset("fig3b")
    nbar = cooling.steady_state_nbar(fig3b.trap, fig3b.cooling)
    checks = {
        f"delta_R in -[400,600] kHz: r0 max/min={r_d.max() / r_d.min():.1f} < 2": r_d.max() < 2 * r_d.min(),
        f"I4 in [0.1,10] Isat: r0 max/min={r_i.max() / r_i.min():.0f} < 2": r_i.max() < 2 * r_i.min(),
        f"fig3b nbar_inf={nbar:.4f} < 0.1": nbar < 0.1,
    }
    report(6, "cooling robustness", checks, time.perf_counter() - t, budget=10.0)


def test_c7_numerical_hygiene():
    t = time.perf_counter()
    trap, cool = TrapConfig(), cooling.CoolingConfig()
    G = cooling.build_rate_matrix(trap, cool).generator
    # columns of exp(G dt) conserve probability; G columns sum to zero
    drift = float(np.max(np.abs(G.sum(axis=0)))) * 1e-3
    p = cooling.evolve(thermal_distribution(2.0, cool.n_max), cooling.build_rate_matrix(trap, cool), 1e-3)
    a = cooling.steady_state_nbar(trap, cool)
    b = cooling.steady_state_nbar(trap, replace(cool, n_max=80))
    truth = np.array([0.8, 0.0, TWO_PI * 100e3, 0.02])
    x = TWO_PI * np.linspace(-400e3, 400e3, 41)
    fit = A.fit_lorentzian_arrays(x, A.lorentzian(x, *truth))
    rel = np.abs(fit.params - truth) / np.where(truth == 0, truth[2], np.abs(truth))
    checks = {
        f"column drift over 1 ms={drift:.1e} <= 1e-9 and evolve sum-1={abs(p.vector.sum() - 1):.1e}":
            drift <= 1e-9 and abs(p.vector.sum() - 1) <= 1e-9,
        f"nbar_inf n_max 40 vs 80 differ by {abs(a - b) / a:.1e} < 1%": abs(a - b) < 0.01 * a,
        f"noiseless Lorentzian max rel error {rel.max():.1e} <= 1e-6": rel.max() <= 1e-6,
    }
    report(7, "numerical hygiene", checks, time.perf_counter() - t)
