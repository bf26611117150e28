"""Tiny deterministic SVG plots (axes, polylines, markers, dashed verticals).

Every renderer reads its CSV so figures can be regenerated from data alone.
"""

from __future__ import annotations

import csv
import math

W, H = 640, 420
LEFT, RIGHT, TOP, BOTTOM = 70, 20, 30, 50
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
    start = math.ceil(lo / step) * step
    out = []
    v = start
    while v <= hi + 1e-9 * step:
        out.append(round(v, 12))
        v += step
    return out


class Plot:
    def __init__(self, title: str, xlabel: str, ylabel: str, xlog: bool = False):
        self.title, self.xlabel, self.ylabel, self.xlog = title, xlabel, ylabel, xlog
        self.series = []
        self.vlines = []
        self.comment = None

    def add(self, xs, ys, label: str, style: str = "line"):
        self.series.append((list(map(float, xs)), list(map(float, ys)), label, style))

    def vline(self, x: float, label: str = ""):
        self.vlines.append((float(x), label))

    def render(self) -> str:
        tx = (lambda v: math.log10(v)) if self.xlog else (lambda v: v)
        xs = [tx(x) for s in self.series for x in s[0]] + [tx(v) for v, _ in self.vlines]
        ys = [y for s in self.series for y in s[1] if math.isfinite(y)]
        x0, x1 = min(xs), max(xs)
        y0, y1 = min(ys + [0.0]), max(ys)
        if x1 == x0:
            x0, x1 = x0 - 1, x1 + 1
        if y1 == y0:
            y1 = y0 + 1
        pad = 0.05 * (y1 - y0)
        y0, y1 = y0 - (pad if y0 < 0 else 0), y1 + pad
        pw, ph = W - LEFT - RIGHT, H - TOP - BOTTOM

        def px(v):
            return LEFT + (tx(v) - x0) / (x1 - x0) * pw

        def py(v):
            return TOP + (1 - (v - y0) / (y1 - y0)) * ph

        out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" '
               f'viewBox="0 0 {W} {H}" font-family="sans-serif" font-size="11">']
        if self.comment:
            out.append(f"<!-- {self.comment} -->")
        out.append(f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>')
        out.append(f'<text x="{W / 2}" y="18" text-anchor="middle" font-size="13">{self.title}</text>')
        out.append(f'<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>')
        for t in _ticks(x0, x1):
            xv = 10**t if self.xlog else t
            X = LEFT + (t - x0) / (x1 - x0) * pw
            out.append(f'<line x1="{_fmt(X)}" y1="{TOP + ph}" x2="{_fmt(X)}" y2="{TOP + ph + 4}" stroke="black"/>')
            out.append(f'<text x="{_fmt(X)}" y="{TOP + ph + 16}" text-anchor="middle">{xv:g}</text>')
        for t in _ticks(y0, y1):
            Y = py(t)
            out.append(f'<line x1="{LEFT - 4}" y1="{_fmt(Y)}" x2="{LEFT}" y2="{_fmt(Y)}" stroke="black"/>')
            out.append(f'<text x="{LEFT - 6}" y="{_fmt(Y + 4)}" text-anchor="end">{t:g}</text>')
        out.append(f'<text x="{LEFT + pw / 2}" y="{H - 12}" text-anchor="middle">{self.xlabel}</text>')
        out.append(f'<text x="16" y="{TOP + ph / 2}" text-anchor="middle" '
                   f'transform="rotate(-90 16 {TOP + ph / 2})">{self.ylabel}</text>')
        for v, label in self.vlines:
            X = _fmt(px(v))
            out.append(f'<line x1="{X}" y1="{TOP}" x2="{X}" y2="{TOP + ph}" stroke="gray" '
                       f'stroke-dasharray="5,4"/>')
            if label:
                out.append(f'<text x="{X}" y="{TOP - 4}" text-anchor="middle" fill="gray">{label}</text>')
        for i, (sx, sy, label, style) in enumerate(self.series):
            color = COLORS[i % len(COLORS)]
            pts = [(px(x), py(y)) for x, y in zip(sx, sy) if math.isfinite(y)]
            if style == "step":
                path = []
                for X, Y in pts:
                    path.append(f"{_fmt(X - 0.5 * pw / max(len(pts), 1))},{_fmt(Y)} "
                                f"{_fmt(X + 0.5 * pw / max(len(pts), 1))},{_fmt(Y)}")
                out.append(f'<polyline points="{" ".join(path)}" fill="none" stroke="{color}"/>')
            else:
                coords = " ".join(f"{_fmt(X)},{_fmt(Y)}" for X, Y in pts)
                out.append(f'<polyline points="{coords}" fill="none" stroke="{color}"/>')
                if style == "markers":
                    out.extend(f'<circle cx="{_fmt(X)}" cy="{_fmt(Y)}" r="2" fill="{color}"/>' for X, Y in pts)
            out.append(f'<text x="{LEFT + pw - 8}" y="{TOP + 16 + 14 * i}" text-anchor="end" '
                       f'fill="{color}">{label}</text>')
        out.append("</svg>")
        return "\n".join(out) + "\n"


def read_csv(path):
    """Rows of a CSV plus ``key=value`` metadata from leading ``#`` lines."""
    meta = {}
    lines = []
    with open(path, newline="") as fh:
        for line in fh:
            if line.startswith("#"):
                for tok in line[1:].split():
                    if "=" in tok:
                        k, v = tok.split("=", 1)
                        meta[k] = v
            else:
                lines.append(line)
    return list(csv.DictReader(lines)), meta


def histogram_svg(csv_path) -> str:
    rows, meta = read_csv(csv_path)
    n = [float(r["count"]) for r in rows]
    plot = Plot("Probe-window count distributions", "counts N", "P(N)")
    plot.comment = f"derived from {meta.get('data', 'csv')}; manifest={meta.get('manifest', '')}"
    plot.add(n, [float(r["p_given_f3"]) for r in rows], "F=3 / empty (transmitted)", "step")
    plot.add(n, [float(r["p_given_f4"]) for r in rows], "F=4 (blocked)", "step")
    for key in ("lower", "upper"):
        if key in meta:
            plot.vline(float(meta[key]), f"{float(meta[key]):g}")
    return plot.render()


def spectrum_svg(csv_path) -> str:
    rows, meta = read_csv(csv_path)
    plot = Plot("Raman spectrum", "delta_R / 2pi (kHz)", "P4")
    plot.comment = f"manifest={meta.get('manifest', '')}"
    plot.add([float(r["delta_r_hz"]) / 1e3 for r in rows], [float(r["p4"]) for r in rows], "P4", "markers")
    return plot.render()


def scan_svg(csv_path) -> str:
    rows, meta = read_csv(csv_path)
    axis = rows[0]["param_name"] if rows else "delta_r"
    xlog = axis == "i4"
    scale = 1.0 if xlog else 1e-3
    xlabel = "I4 / I_sat" if xlog else "cooling delta_R / 2pi (kHz)"
    plot = Plot("Model sideband ratio r0", xlabel, "r0", xlog=xlog)
    plot.comment = f"manifest={meta.get('manifest', '')}"
    plot.add([float(r["param_value"]) * scale for r in rows], [float(r["r0"]) for r in rows], "r0", "markers")
    return plot.render()
