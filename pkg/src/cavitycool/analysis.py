"""Thermometry from a Raman spectrum.

Pipeline: fit a Lorentzian to the carrier, optionally subtract it (or a
constant background) from the data, take the red/blue sideband ratio in a
window around ``|delta| = omega_a`` and map it to ``nbar`` and ``P0`` through
the thermal two-level relation ``r0 = nbar / (nbar + 1)``.
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import asdict, dataclass

import numpy as np

from . import constants as C

LORENTZIAN = "lorentzian_subtracted"
CONSTANT = "constant_background"
RAW = "raw"
MODES = (LORENTZIAN, CONSTANT, RAW)

DEFAULT_WINDOW = C.TWO_PI * 30e3
DEFAULT_CARRIER_HALFWIDTH = C.TWO_PI * 400e3


@dataclass(frozen=True)
class Sample:
    """A background-subtracted spectrum value; may be negative."""

    detuning: float
    p4: float
    p4_error: float


@dataclass(frozen=True)
class LorentzianFit:
    amplitude: float
    center: float
    fwhm: float
    offset: float
    residual_norm: float
    converged: bool
    iterations: int

    @property
    def params(self) -> np.ndarray:
        return np.array([self.amplitude, self.center, self.fwhm, self.offset])

    def __call__(self, detuning):
        return lorentzian(detuning, self.amplitude, self.center, self.fwhm, self.offset)

    def peak(self, detuning):
        """Lorentzian part only, without the offset."""
        return lorentzian(detuning, self.amplitude, self.center, self.fwhm, 0.0)


def lorentzian(x, amplitude, center, fwhm, offset):
    hw2 = (0.5 * fwhm) ** 2
    return amplitude * hw2 / ((np.asarray(x) - center) ** 2 + hw2) + offset


def _jacobian(x, a, x0, w, b):
    hw2 = 0.25 * w * w
    d = x - x0
    den = d * d + hw2
    shape = hw2 / den
    return np.column_stack([
        shape,
        a * hw2 * 2.0 * d / den**2,
        a * (0.5 * w) * d * d / den**2,
        np.ones_like(x),
    ])


def _initial_guess(x, y):
    i = int(np.argmax(y))
    base = float(np.min(y))
    amp = float(y[i] - base)
    above = x[y >= base + 0.5 * amp]
    width = float(above.max() - above.min()) if above.size > 1 else 0.0
    if width <= 0:
        width = 0.1 * float(np.ptp(x))
    return np.array([amp, float(x[i]), width, base])


def fit_lorentzian_arrays(x, y, sigma=None, max_iter: int = 200, step_tol: float = 1e-8,
                          lam0: float = 1e-3) -> LorentzianFit:
    """Weighted Levenberg-Marquardt fit of ``A (w/2)^2 / ((x - x0)^2 + (w/2)^2) + B``.

    The damping starts at ``lam0`` and is divided by 10 on an accepted step,
    multiplied by 10 on a rejected one. Detunings are rescaled by their span
    internally, so results are covariant under a global rescaling of ``x``.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 5:
        raise ValueError("need at least 5 points to fit a Lorentzian")
    if np.ptp(y) == 0:
        raise ValueError("degenerate data: all values are equal")
    sigma = np.ones_like(y) if sigma is None else np.asarray(sigma, dtype=float)
    if np.any(sigma <= 0):
        raise ValueError("uncertainties must be positive")
    wts = 1.0 / sigma

    scale = float(np.ptp(x)) or 1.0
    xs = x / scale
    p = _initial_guess(xs, y)

    def cost(q):
        r = (y - lorentzian(xs, *q)) * wts
        return float(r @ r), r

    c, r = cost(p)
    lam = lam0
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        J = _jacobian(xs, *p) * wts[:, None]
        JtJ = J.T @ J
        g = J.T @ r
        accepted = False
        while lam < 1e16:
            A = JtJ + lam * np.diag(np.diag(JtJ))
            try:
                step = np.linalg.solve(A, g)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            trial = p + step
            trial[2] = abs(trial[2])
            c_new, r_new = cost(trial)
            if c_new <= c:
                accepted = True
                break
            lam *= 10.0
        if not accepted:
            break
        rel = np.max(np.abs(step) / np.maximum(np.abs(trial), 1e-12))
        p, c, r = trial, c_new, r_new
        lam = max(lam / 10.0, 1e-12)
        if rel < step_tol:
            converged = True
            break
    amp, x0, w, b = p
    return LorentzianFit(float(amp), float(x0 * scale), float(abs(w) * scale), float(b),
                         float(np.sqrt(c)), bool(converged and w != 0), it)


def _sigma_floor(pt) -> float:
    err = pt.p4_error
    if err > 0:
        return err
    n = getattr(pt, "valid_trials", 0)
    if n:
        q = 1.0 / (n + 2.0)
        return float(np.sqrt(q * (1.0 - q) / n))
    return 1.0


def fit_lorentzian(points) -> LorentzianFit:
    """Fit the carrier peak in ``points`` weighting by the binomial error bars.

    Points with zero error (``p4`` exactly 0 or 1) get the error of
    ``p = 1/(N+2)`` instead of infinite weight.
    """
    points = list(points)
    x = np.array([pt.detuning for pt in points])
    y = np.array([pt.p4 for pt in points])
    s = np.array([_sigma_floor(pt) for pt in points])
    return fit_lorentzian_arrays(x, y, s)


def carrier_region(points, halfwidth: float = DEFAULT_CARRIER_HALFWIDTH):
    return [pt for pt in points if abs(pt.detuning) <= halfwidth]


def subtract_background(points, mode: str, model=None) -> list[Sample]:
    """Remove the carrier contribution according to ``mode``.

    ``lorentzian_subtracted`` needs a :class:`LorentzianFit` and subtracts the
    full fitted curve; ``constant_background`` subtracts a number; ``raw``
    leaves values untouched. Nothing is clamped.
    """
    out = []
    for pt in points:
        if mode == RAW:
            value = pt.p4
        elif mode == CONSTANT:
            if model is None:
                raise ValueError("constant_background mode needs a background value")
            value = pt.p4 - float(model)
        elif mode == LORENTZIAN:
            if not isinstance(model, LorentzianFit):
                raise ValueError("lorentzian_subtracted mode needs a LorentzianFit")
            value = pt.p4 - float(model(pt.detuning))
        else:
            raise ValueError(f"unknown mode {mode!r}")
        out.append(Sample(pt.detuning, value, pt.p4_error))
    return out


def sideband_ratio(points, axial_frequency: float,
                   window_halfwidth: float = DEFAULT_WINDOW) -> tuple[float, float]:
    """Red/blue ratio of mean ``p4`` within ``window_halfwidth`` of ``|delta| = omega_a``.

    The uncertainty is the sample standard deviation of the pointwise ratios
    of red and blue points paired by ``|delta|``; with a single pair it falls
    back to binomial error propagation.
    """
    red = {}
    blue = {}
    for pt in points:
        if abs(abs(pt.detuning) - axial_frequency) > window_halfwidth * (1 + 1e-12):
            continue
        key = round(abs(pt.detuning), 3)
        (red if pt.detuning < 0 else blue)[key] = pt
    if not red or not blue:
        raise ValueError("need red and blue sideband points inside the window")
    red_mean = float(np.mean([pt.p4 for pt in red.values()]))
    blue_mean = float(np.mean([pt.p4 for pt in blue.values()]))
    if blue_mean <= 0:
        raise ValueError("blue sideband mean is not positive; ratio undefined")
    r0 = red_mean / blue_mean

    pairs = [(red[k], blue[k]) for k in sorted(red.keys() & blue.keys()) if blue[k].p4 != 0]
    if len(pairs) >= 2:
        sigma = float(np.std([r.p4 / b.p4 for r, b in pairs], ddof=1))
    else:
        er = np.sqrt(np.mean([pt.p4_error**2 for pt in red.values()]) / len(red))
        eb = np.sqrt(np.mean([pt.p4_error**2 for pt in blue.values()]) / len(blue))
        sigma = float(np.hypot(er / blue_mean, r0 * eb / blue_mean))
    return r0, sigma


@dataclass(frozen=True)
class Thermometry:
    nbar: float
    nbar_error: float
    p0: float
    p0_error: float


def infer_nbar(r0: float, sigma_r: float = 0.0) -> Thermometry:
    """Thermal map ``nbar = r0 / (1 - r0)``, ``P0 = 1 - r0`` with linear error propagation."""
    if r0 >= 1:
        raise ValueError(f"r0 = {r0:.4g} >= 1: no thermal state has this sideband ratio")
    nbar = r0 / (1.0 - r0)
    return Thermometry(nbar, sigma_r / (1.0 - r0) ** 2, 1.0 - r0, sigma_r)


@dataclass(frozen=True)
class AnalysisResult:
    mode: str
    r0: float
    r0_error: float
    nbar: float
    nbar_error: float
    p0: float
    p0_error: float
    window: float  # rad/s
    fit: LorentzianFit | None = None

    def to_dict(self, provenance: dict | None = None) -> dict:
        d = asdict(self)
        d["window_hz"] = self.window / C.TWO_PI
        if self.fit is not None:
            d["fit"]["center_hz"] = self.fit.center / C.TWO_PI
            d["fit"]["fwhm_hz"] = self.fit.fwhm / C.TWO_PI
        if provenance:
            d["provenance"] = provenance
        return d


def analyze(points, axial_frequency: float, mode: str = RAW,
            window_halfwidth: float = DEFAULT_WINDOW, background: float = 0.024,
            carrier_halfwidth: float = DEFAULT_CARRIER_HALFWIDTH) -> AnalysisResult:
    points = list(points)
    fit = None
    if mode == LORENTZIAN:
        fit = fit_lorentzian(carrier_region(points, carrier_halfwidth))
        data = subtract_background(points, mode, fit)
    elif mode == CONSTANT:
        data = subtract_background(points, mode, background)
    else:
        data = subtract_background(points, mode)
    r0, sr = sideband_ratio(data, axial_frequency, window_halfwidth)
    th = infer_nbar(r0, sr)
    return AnalysisResult(mode, r0, sr, th.nbar, th.nbar_error, th.p0, th.p0_error,
                          window_halfwidth, fit)


def analyze_all(points, axial_frequency: float, **kwargs) -> dict[str, AnalysisResult]:
    return {mode: analyze(points, axial_frequency, mode, **kwargs) for mode in MODES}


def file_sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def write_results_json(results, path, provenance: dict | None = None) -> None:
    if isinstance(results, AnalysisResult):
        results = {results.mode: results}
    payload = {mode: res.to_dict(provenance) for mode, res in results.items()}
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, allow_nan=True)
        fh.write("\n")


def write_residuals_csv(points, fit: LorentzianFit, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["delta_r_hz", "p4", "p4_err", "model", "residual"])
        for pt in points:
            m = float(fit(pt.detuning))
            w.writerow([f"{pt.detuning / C.TWO_PI:.10g}", f"{pt.p4:.10g}", f"{pt.p4_error:.10g}",
                        f"{m:.10g}", f"{pt.p4 - m:.10g}"])
