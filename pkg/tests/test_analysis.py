import json
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import curve_fit

from cavitycool import analysis as A
from cavitycool import config
from cavitycool.physics import TrapConfig, thermal_distribution
from cavitycool.spectroscopy import SpectrumPoint, TrialConfig, acquire_spectrum

TWO_PI = 2 * np.pi
WA = TrapConfig().axial_frequency
TRUE = (0.8, 0.0, TWO_PI * 100e3, 0.02)
X = TWO_PI * np.linspace(-400e3, 400e3, 41)


def binomial_points(x, p, n, rng):
    k = rng.binomial(n, np.clip(p, 0, 1))
    return [SpectrumPoint(float(d), int(t), n) for d, t in zip(x, k)]


def test_noiseless_recovery():
    fit = A.fit_lorentzian_arrays(X, A.lorentzian(X, *TRUE))
    assert fit.converged
    np.testing.assert_allclose(fit.params, TRUE, rtol=1e-6, atol=1e-6 * TRUE[2])


def test_matches_curve_fit_on_noisy_data():
    rng = np.random.default_rng(0)
    pts = binomial_points(X, A.lorentzian(X, *TRUE), 299, rng)
    fit = A.fit_lorentzian(pts)
    x = np.array([p.detuning for p in pts]) / 1e6
    y = np.array([p.p4 for p in pts])
    s = np.array([A._sigma_floor(p) for p in pts])
    ref, _ = curve_fit(lambda x, a, c, w, b: A.lorentzian(x, a, c, w, b), x, y,
                       p0=[0.7, 0.01, 0.5, 0.0], sigma=s, absolute_sigma=True)
    ref[1:3] *= 1e6
    np.testing.assert_allclose(fit.params, ref, rtol=1e-4, atol=1e-4 * TRUE[2])


def fisher_sigma_amplitude(x, n):
    p = A.lorentzian(x, *TRUE)
    J = A._jacobian(x, *TRUE) / np.sqrt(p * (1 - p) / n)[:, None]
    return float(np.sqrt(np.linalg.inv(J.T @ J)[0, 0]))


def test_amplitude_calibrated_over_seeds():
    sigma = fisher_sigma_amplitude(X, 299)
    amps = np.array([A.fit_lorentzian(binomial_points(X, A.lorentzian(X, *TRUE), 299,
                                                      np.random.default_rng(seed))).amplitude
                     for seed in range(100)])
    # 3 sigma outliers are expected at 0.3% per fit; allow one in a hundred
    assert np.sum(np.abs(amps - TRUE[0]) > 3 * sigma) <= 1
    assert amps.std(ddof=1) == pytest.approx(sigma, rel=0.2)


@settings(max_examples=25, deadline=None)
@given(scale=st.floats(1e-3, 1e3))
def test_fit_rescaling_invariance(scale):
    y = A.lorentzian(X, *TRUE) + 0.01 * np.sin(X / 1e5)
    a = A.fit_lorentzian_arrays(X, y)
    b = A.fit_lorentzian_arrays(X * scale, y)
    assert b.center == pytest.approx(a.center * scale, abs=1e-6 * a.fwhm * scale)
    assert b.fwhm == pytest.approx(a.fwhm * scale, rel=1e-6)
    assert b.amplitude == pytest.approx(a.amplitude, rel=1e-6)
    assert b.offset == pytest.approx(a.offset, rel=1e-6, abs=1e-9)


def test_fit_errors():
    with pytest.raises(ValueError, match="degenerate"):
        A.fit_lorentzian_arrays(X, np.full(X.size, 0.3))
    with pytest.raises(ValueError, match="5 points"):
        A.fit_lorentzian_arrays(X[:4], X[:4])


def test_fit_flags_non_convergence():
    fit = A.fit_lorentzian_arrays(X, A.lorentzian(X, *TRUE) + 0.05 * np.cos(X / 3e4), max_iter=1)
    assert not fit.converged and fit.iterations == 1


def test_subtraction_modes():
    pts = [SpectrumPoint(d, 10, 100) for d in (-WA, 0.0, WA)]
    raw = A.subtract_background(pts, A.RAW)
    assert [s.p4 for s in raw] == [p.p4 for p in pts]
    const = A.subtract_background(pts, A.CONSTANT, 0.024)
    assert [s.p4 for s in const] == pytest.approx([0.1 - 0.024] * 3)
    fit = A.LorentzianFit(0.2, 0.0, 1e5, 0.05, 0.0, True, 1)
    lor = A.subtract_background(pts, A.LORENTZIAN, fit)
    assert lor[1].p4 == pytest.approx(0.1 - 0.25)
    with pytest.raises(ValueError):
        A.subtract_background(pts, A.LORENTZIAN, 0.02)
    with pytest.raises(ValueError):
        A.subtract_background(pts, "median")


def test_self_subtraction_leaves_noise():
    rng = np.random.default_rng(1)
    pts = binomial_points(X, A.lorentzian(X, *TRUE), 299, rng)
    res = A.subtract_background(pts, A.LORENTZIAN, A.fit_lorentzian(pts))
    z = np.array([s.p4 / A._sigma_floor(p) for s, p in zip(res, pts)])
    assert np.mean(z**2) < 2.0


def window_points(red, blue, n=100):
    out = []
    for d in np.linspace(-30e3, 30e3, 7) * TWO_PI:
        out.append(SpectrumPoint(-(WA + d), int(red * n), n))
        out.append(SpectrumPoint(WA + d, int(blue * n), n))
    return out


def test_sideband_ratio_examples():
    r0, s = A.sideband_ratio(window_points(0.0, 0.4), WA)
    assert r0 == 0.0 and s == 0.0
    r0, s = A.sideband_ratio(window_points(0.1, 0.4), WA)
    assert r0 == pytest.approx(0.25)
    with pytest.raises(ValueError, match="blue"):
        A.sideband_ratio(window_points(0.1, 0.0), WA)
    with pytest.raises(ValueError):
        A.sideband_ratio([SpectrumPoint(0.0, 1, 10)], WA)


def test_single_pair_uses_binomial_error():
    pts = [SpectrumPoint(-WA, 10, 100), SpectrumPoint(WA, 40, 100)]
    r0, s = A.sideband_ratio(pts, WA)
    assert r0 == pytest.approx(0.25) and s > 0


def test_infer_nbar_examples():
    t = A.infer_nbar(0.0)
    assert (t.nbar, t.p0) == (0.0, 1.0)
    t = A.infer_nbar(0.05, 0.04)
    assert t.nbar == pytest.approx(0.0526, abs=1e-4)
    assert t.p0 == pytest.approx(0.95, abs=1e-12)
    t = A.infer_nbar(0.10, 0.03)
    assert t.nbar == pytest.approx(0.111, abs=1e-3)
    assert t.p0 == pytest.approx(0.90)
    assert t.nbar_error == pytest.approx(0.03 / 0.81)
    with pytest.raises(ValueError):
        A.infer_nbar(1.0)


@given(r=st.floats(0, 0.999))
def test_p0_identity(r):
    assert A.infer_nbar(r).p0 == pytest.approx(1 - r, rel=1e-12, abs=1e-15)


def test_symmetric_spectrum_gives_unit_ratio():
    trap = replace(TrapConfig(), spatial_phase=0.0)
    trial = TrialConfig(residual_field=0.0, spatial_phase=0.0, trials_per_sign=299, atoms_per_point=10)
    cfg = config.RunConfig()
    mags = WA + TWO_PI * np.arange(-30e3, 31e3, 10e3)
    pts = acquire_spectrum(mags, trap, cfg.cooling, trial, cfg.detection, seed=3,
                           motional=thermal_distribution(0.2, 40))
    r0, s = A.sideband_ratio(pts, WA)
    assert abs(r0 - 1.0) < 3 * s


@pytest.mark.parametrize("nbar", [0.0, 0.05, 0.12, 0.5])
def test_raw_round_trip_without_field(nbar):
    cfg = config.load_preset("fig3b")
    trap = replace(cfg.trap, spatial_phase=np.pi / 4)
    trial = replace(cfg.trial, spatial_phase=np.pi / 4, residual_field=0.0)
    mags = WA + TWO_PI * np.arange(-30e3, 31e3, 10e3)
    pts = acquire_spectrum(mags, trap, cfg.cooling, trial, cfg.detection, seed=1,
                           motional=thermal_distribution(nbar, 40))
    r0, s = A.sideband_ratio(pts, WA)
    th = A.infer_nbar(r0, s)
    assert abs(th.nbar - nbar) < 3 * th.nbar_error


def test_mode_ordering_and_outputs(tmp_path):
    cfg = config.load_preset("fig3b")
    trial = replace(cfg.trial, trials_per_sign=150, atoms_per_point=20, spatial_phase=np.pi / 4)
    pts = acquire_spectrum(cfg.spectrum.detunings, cfg.trap, cfg.cooling, trial, cfg.detection,
                           seed=2, motional=thermal_distribution(0.12, 40))
    res = A.analyze_all(pts, WA)
    assert res[A.LORENTZIAN].r0 <= res[A.CONSTANT].r0 <= res[A.RAW].r0
    A.write_results_json(res, tmp_path / "a.json", {"input_sha256": "x"})
    data = json.loads((tmp_path / "a.json").read_text())
    assert set(data) == set(A.MODES)
    assert data[A.LORENTZIAN]["fit"]["converged"] in (True, False)
    assert data[A.RAW]["provenance"] == {"input_sha256": "x"}
    assert data[A.RAW]["window_hz"] == pytest.approx(30e3)
    A.write_residuals_csv(pts, res[A.LORENTZIAN].fit, tmp_path / "r.csv")
    assert (tmp_path / "r.csv").read_text().startswith("delta_r_hz,p4,p4_err,model,residual\n")
