"""Minimal SVG plotting: line plots and heat maps, linear or log axes.

Deliberately dependency-free so the command line tool stays self-contained.
Output is static SVG markup; figures display results, nothing more.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

_W, _H = 640, 440
_ML, _MR, _MT, _MB = 70, 20, 36, 52

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")

# compact viridis approximation, linearly interpolated between anchors
_VIRIDIS = np.array([
    (68, 1, 84), (71, 44, 122), (59, 81, 139), (44, 113, 142),
    (33, 144, 141), (39, 173, 129), (92, 200, 99), (170, 220, 50),
    (253, 231, 37),
], dtype=float)


def _color(frac):
    frac = min(max(float(frac), 0.0), 1.0)
    x = frac * (len(_VIRIDIS) - 1)
    i = min(int(x), len(_VIRIDIS) - 2)
    t = x - i
    r, g, b = (1 - t) * _VIRIDIS[i] + t * _VIRIDIS[i + 1]
    return f"rgb({int(r)},{int(g)},{int(b)})"


class _Axis:
    def __init__(self, lo, hi, log, pixels, offset, flip=False):
        if log:
            if lo <= 0:
                raise ValueError("log axis needs positive range")
            self.lo, self.hi = math.log10(lo), math.log10(hi)
        else:
            self.lo, self.hi = float(lo), float(hi)
        if self.hi <= self.lo:
            self.hi = self.lo + 1.0
        self.log = log
        self.pixels = pixels
        self.offset = offset
        self.flip = flip

    def to_px(self, value):
        v = math.log10(max(value, 1e-300)) if self.log else value
        frac = (v - self.lo) / (self.hi - self.lo)
        frac = min(max(frac, -0.02), 1.02)
        if self.flip:
            frac = 1.0 - frac
        return self.offset + frac * self.pixels

    def ticks(self, n=6):
        if self.log:
            lo, hi = math.floor(self.lo), math.ceil(self.hi)
            step = max(1, int(round((hi - lo) / n)))
            return [10.0 ** e for e in range(int(lo), int(hi) + 1, step)]
        span = self.hi - self.lo
        if span <= 0:
            return [self.lo]
        raw = span / n
        mag = 10.0 ** math.floor(math.log10(raw))
        step = min((s for s in (1, 2, 5, 10) if s * mag >= raw),
                   default=10) * mag
        first = math.ceil(self.lo / step) * step
        out = []
        v = first
        while v <= self.hi + 1e-9 * step:
            out.append(v)
            v += step
        return out


def _tick_label(v):
    if v == 0:
        return "0"
    mag = abs(v)
    if 1e-3 <= mag < 1e4:
        return f"{v:g}"
    return f"{v:.1e}"


def _frame(xaxis, yaxis, xlabel, ylabel, title):
    parts = [f'<rect x="{_ML}" y="{_MT}" width="{xaxis.pixels}" '
             f'height="{yaxis.pixels}" fill="none" stroke="black"/>']
    for tv in xaxis.ticks():
        px = xaxis.to_px(tv)
        parts.append(f'<line x1="{px:.1f}" y1="{_MT + yaxis.pixels}" '
                     f'x2="{px:.1f}" y2="{_MT + yaxis.pixels + 5}" stroke="black"/>')
        parts.append(f'<text x="{px:.1f}" y="{_MT + yaxis.pixels + 18}" '
                     f'font-size="11" text-anchor="middle">{_tick_label(tv)}</text>')
    for tv in yaxis.ticks():
        py = yaxis.to_px(tv)
        parts.append(f'<line x1="{_ML - 5}" y1="{py:.1f}" x2="{_ML}" '
                     f'y2="{py:.1f}" stroke="black"/>')
        parts.append(f'<text x="{_ML - 8}" y="{py + 4:.1f}" font-size="11" '
                     f'text-anchor="end">{_tick_label(tv)}</text>')
    parts.append(f'<text x="{_ML + xaxis.pixels / 2:.1f}" y="{_H - 12}" '
                 f'font-size="13" text-anchor="middle">{xlabel}</text>')
    parts.append(f'<text x="16" y="{_MT + yaxis.pixels / 2:.1f}" font-size="13" '
                 f'text-anchor="middle" transform="rotate(-90 16 '
                 f'{_MT + yaxis.pixels / 2:.1f})">{ylabel}</text>')
    parts.append(f'<text x="{_W / 2:.1f}" y="20" font-size="14" '
                 f'text-anchor="middle">{title}</text>')
    return parts


def _document(parts):
    return ('<svg xmlns="http://www.w3.org/2000/svg" '
            f'width="{_W}" height="{_H}" viewBox="0 0 {_W} {_H}">\n'
            '<rect width="100%" height="100%" fill="white"/>\n'
            + "\n".join(parts) + "\n</svg>\n")


def line_plot(series, xlabel="", ylabel="", title="", xlog=False, ylog=False):
    """series: list of (name, x array, y array) triples."""
    xs = np.concatenate([np.asarray(s[1], float) for s in series])
    ys = np.concatenate([np.asarray(s[2], float) for s in series])
    finite = np.isfinite(ys)
    if ylog:
        finite &= ys > 0
    ys = ys[finite] if finite.any() else np.array([0.0, 1.0])
    xaxis = _Axis(xs.min(), xs.max(), xlog, _W - _ML - _MR, _ML)
    pad = 0.05 * (ys.max() - ys.min() + 1e-30)
    ylo, yhi = (ys.min(), ys.max()) if ylog else (ys.min() - pad, ys.max() + pad)
    yaxis = _Axis(ylo, yhi, ylog, _H - _MT - _MB, _MT, flip=True)
    parts = _frame(xaxis, yaxis, xlabel, ylabel, title)
    for i, (name, x, y) in enumerate(series):
        x = np.asarray(x, float)
        y = np.asarray(y, float)
        keep = np.isfinite(x) & np.isfinite(y)
        if ylog:
            keep &= y > 0
        pts = " ".join(f"{xaxis.to_px(a):.2f},{yaxis.to_px(b):.2f}"
                       for a, b in zip(x[keep], y[keep]))
        color = _COLORS[i % len(_COLORS)]
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" '
                     f'stroke-width="1.5"/>')
        if name:
            parts.append(f'<text x="{_W - _MR - 6}" y="{_MT + 16 + 14 * i}" '
                         f'font-size="11" text-anchor="end" fill="{color}">'
                         f'{name}</text>')
    return _document(parts)


def _contour_segments(x, y, z, level):
    """Marching-squares segments of the z = level contour (grid coords)."""
    segs = []
    for i in range(len(x) - 1):
        for j in range(len(y) - 1):
            corners = [(x[i], y[j], z[j, i]), (x[i + 1], y[j], z[j, i + 1]),
                       (x[i + 1], y[j + 1], z[j + 1, i + 1]),
                       (x[i], y[j + 1], z[j + 1, i])]
            pts = []
            for k in range(4):
                x0, y0, v0 = corners[k]
                x1, y1, v1 = corners[(k + 1) % 4]
                if not (np.isfinite(v0) and np.isfinite(v1)):
                    continue
                if (v0 - level) * (v1 - level) < 0:
                    t = (level - v0) / (v1 - v0)
                    pts.append((x0 + t * (x1 - x0), y0 + t * (y1 - y0)))
            if len(pts) >= 2:
                segs.append((pts[0], pts[1]))
    return segs


def heat_map(x, y, z, xlabel="", ylabel="", title="", xlog=False, ylog=False,
             contour_level=None, zlog=True):
    """z[j, i] is the value at (x[i], y[j]).  Optional single contour line."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    z = np.asarray(z, float)
    xaxis = _Axis(x.min(), x.max(), xlog, _W - _ML - _MR, _ML)
    yaxis = _Axis(y.min(), y.max(), ylog, _H - _MT - _MB, _MT, flip=True)
    finite = np.isfinite(z)
    if zlog:
        finite &= z > 0
    zvals = z[finite] if finite.any() else np.array([0.0, 1.0])
    zlo, zhi = float(zvals.min()), float(zvals.max())
    if zlog:
        zlo, zhi = math.log10(max(zlo, 1e-300)), math.log10(max(zhi, 1e-299))
    if zhi <= zlo:
        zhi = zlo + 1.0
    parts = []
    xe = _cell_edges(x, xlog)
    ye = _cell_edges(y, ylog)
    for j in range(len(y)):
        for i in range(len(x)):
            v = z[j, i]
            if not np.isfinite(v) or (zlog and v <= 0):
                fill = "#dddddd"
            else:
                vv = math.log10(max(v, 1e-300)) if zlog else v
                fill = _color((vv - zlo) / (zhi - zlo))
            x0, x1 = xaxis.to_px(xe[i]), xaxis.to_px(xe[i + 1])
            y0, y1 = yaxis.to_px(ye[j + 1]), yaxis.to_px(ye[j])
            parts.append(f'<rect x="{x0:.2f}" y="{y0:.2f}" '
                         f'width="{x1 - x0:.2f}" height="{y1 - y0:.2f}" '
                         f'fill="{fill}"/>')
    if contour_level is not None:
        for (p0, p1) in _contour_segments(x, y, z, contour_level):
            parts.append(f'<line x1="{xaxis.to_px(p0[0]):.2f}" '
                         f'y1="{yaxis.to_px(p0[1]):.2f}" '
                         f'x2="{xaxis.to_px(p1[0]):.2f}" '
                         f'y2="{yaxis.to_px(p1[1]):.2f}" '
                         f'stroke="black" stroke-dasharray="5,3" '
                         f'stroke-width="1.6"/>')
    parts.extend(_frame(xaxis, yaxis, xlabel, ylabel, title))
    return _document(parts)


def _cell_edges(values, log):
    v = np.log10(values) if log else np.asarray(values, float)
    if len(v) == 1:
        edges = np.array([v[0] - 0.5, v[0] + 0.5])
    else:
        mid = 0.5 * (v[1:] + v[:-1])
        edges = np.concatenate([[v[0] - (mid[0] - v[0])], mid,
                                [v[-1] + (v[-1] - mid[-1])]])
    return 10.0 ** edges if log else edges


def save(path, svg_text):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(svg_text)
    return path
