"""Minimal SVG line plots: axes, ticks and one polyline per series."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


@dataclass
class LinePlot:
    title: str = ""
    xlabel: str = ""
    ylabel: str = ""
    logy: bool = False
    width: int = 640
    height: int = 420
    series: list = field(default_factory=list)

    def add(self, x: Sequence[float], y: Sequence[float], label: str = ""):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        if x.shape != y.shape:
            raise ValueError("x and y must have the same shape")
        self.series.append((x, y, label))
        return self

    def _finite(self, y):
        if self.logy:
            with np.errstate(divide="ignore", invalid="ignore"):
                return np.where(y > 0, np.log10(np.where(y > 0, y, 1.0)), np.nan)
        return np.where(np.isfinite(y), y, np.nan)

    def render(self) -> str:
        ml, mr, mt, mb = 70, 20, 30, 50
        pw, ph = self.width - ml - mr, self.height - mt - mb
        xs = [x for x, _, _ in self.series]
        ys = [self._finite(y) for _, y, _ in self.series]
        allx = np.concatenate(xs) if xs else np.array([0.0, 1.0])
        ally = np.concatenate(ys) if ys else np.array([0.0, 1.0])
        ally = ally[np.isfinite(ally)]
        x0, x1 = _span(allx[np.isfinite(allx)])
        y0, y1 = _span(ally)

        def px(v):
            return ml + (v - x0) / (x1 - x0) * pw

        def py(v):
            return mt + ph - (v - y0) / (y1 - y0) * ph

        out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{self.width}" height="{self.height}" '
               f'font-family="sans-serif" font-size="11">',
               f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="black"/>']
        for v in _ticks(x0, x1):
            out.append(f'<line x1="{px(v):.2f}" y1="{mt + ph}" x2="{px(v):.2f}" y2="{mt + ph + 4}" stroke="black"/>')
            out.append(f'<text x="{px(v):.2f}" y="{mt + ph + 16}" text-anchor="middle">{v:g}</text>')
        for v in _ticks(y0, y1):
            lab = f"1e{v:g}" if self.logy else f"{v:g}"
            out.append(f'<line x1="{ml - 4}" y1="{py(v):.2f}" x2="{ml}" y2="{py(v):.2f}" stroke="black"/>')
            out.append(f'<text x="{ml - 6}" y="{py(v) + 4:.2f}" text-anchor="end">{lab}</text>')
        for k, (x, y) in enumerate(zip(xs, ys)):
            color = COLORS[k % len(COLORS)]
            for seg in _segments(x, y):
                pts = " ".join(f"{px(a):.2f},{py(b):.2f}" for a, b in seg)
                out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
            label = self.series[k][2]
            if label:
                out.append(f'<text x="{ml + pw - 6}" y="{mt + 14 + 14 * k}" text-anchor="end" '
                           f'fill="{color}">{escape(label)}</text>')
        out.append(f'<text x="{ml + pw / 2}" y="{self.height - 12}" text-anchor="middle">{escape(self.xlabel)}</text>')
        out.append(f'<text x="14" y="{mt + ph / 2}" text-anchor="middle" '
                   f'transform="rotate(-90 14 {mt + ph / 2})">{escape(self.ylabel)}</text>')
        out.append(f'<text x="{ml + pw / 2}" y="18" text-anchor="middle">{escape(self.title)}</text>')
        out.append("</svg>")
        return "\n".join(out) + "\n"

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.render())


def _span(v):
    if v.size == 0:
        return 0.0, 1.0
    lo, hi = float(np.min(v)), float(np.max(v))
    if hi == lo:
        pad = abs(lo) * 0.05 or 1.0
        return lo - pad, hi + pad
    return lo, hi


def _ticks(lo, hi, n=6):
    step = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(step))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= step), default=10 * mag)
    start = math.ceil(lo / step) * step
    return [round(start + k * step, 12) for k in range(int((hi - start) / step + 1e-9) + 1)]


def _segments(x, y):
    """Split a series at non-finite points."""
    ok = np.isfinite(x) & np.isfinite(y)
    seg = []
    for a, b, good in zip(x, y, ok):
        if good:
            seg.append((a, b))
        elif seg:
            yield seg
            seg = []
    if seg:
        yield seg
