"""Minimal deterministic SVG charts; no plotting dependency.

Output text is fully determined by the input data (fixed precision, no
timestamps), so chart files can be compared byte for byte.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

WIDTH = 880
HEIGHT = 560
MARGIN_LEFT = 84
MARGIN_RIGHT = 36
MARGIN_TOP = 56
MARGIN_BOTTOM = 72

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd")


def _escape(text: str) -> str:
    return (
        text.replace("&", "&amp;")
        .replace("<", "&lt;")
        .replace(">", "&gt;")
        .replace('"', "&quot;")
    )


def _nice_ticks(lo: float, hi: float, target: int = 6) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / target
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 5.0, 10.0):
        if raw <= mult * mag:
            step = mult * mag
            break
    first = math.ceil(lo / step) * step
    ticks = []
    v = first
    while v <= hi + step * 1e-9:
        ticks.append(round(v / step) * step)
        v += step
    return ticks


def _decade_ticks(lo: float, hi: float) -> list[float]:
    lo_e = math.floor(math.log10(lo))
    hi_e = math.ceil(math.log10(hi))
    return [10.0**e for e in range(lo_e, hi_e + 1)]


@dataclass
class Chart:
    """Scatter/line chart on linear or log axes."""

    title: str
    x_label: str
    y_label: str
    log_x: bool = False
    log_y: bool = False
    series: list = field(default_factory=list)
    annotations: list = field(default_factory=list)

    def add_line(self, label: str, xs: Sequence[float], ys: Sequence[float]) -> None:
        self.series.append(("line", label, list(xs), list(ys)))

    def add_points(self, label: str, xs: Sequence[float], ys: Sequence[float]) -> None:
        self.series.append(("points", label, list(xs), list(ys)))

    def annotate(self, x: float, y: float, text: str) -> None:
        self.annotations.append((x, y, text))

    def _bounds(self) -> tuple[float, float, float, float]:
        xs, ys = [], []
        for _, _, sx, sy in self.series:
            xs.extend(sx)
            ys.extend(sy)
        if not xs:
            raise ValueError("chart has no data")
        x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
        if self.log_x:
            x0 = min((x for x in xs if x > 0), default=1.0)
        if self.log_y:
            y0 = min((y for y in ys if y > 0), default=1.0)
        if not self.log_x:
            pad = 0.02 * (x1 - x0 or 1.0)
            x0, x1 = x0 - pad, x1 + pad
        if not self.log_y:
            pad = 0.05 * (y1 - y0 or 1.0)
            y0, y1 = y0 - pad, y1 + pad
        return x0, x1, y0, y1

    def render(self) -> str:
        x0, x1, y0, y1 = self._bounds()
        plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
        plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM
        bottom = MARGIN_TOP + plot_h

        def to_x(v: float) -> float:
            if self.log_x:
                lo, hi = math.log10(x0), math.log10(x1)
                f = (math.log10(max(v, x0)) - lo) / (hi - lo or 1.0)
            else:
                f = (v - x0) / (x1 - x0 or 1.0)
            return MARGIN_LEFT + f * plot_w

        def to_y(v: float) -> float:
            if self.log_y:
                lo, hi = math.log10(y0), math.log10(y1)
                f = (math.log10(max(v, y0)) - lo) / (hi - lo or 1.0)
            else:
                f = (v - y0) / (y1 - y0 or 1.0)
            return bottom - f * plot_h

        out = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
            f'viewBox="0 0 {WIDTH} {HEIGHT}">',
            '<rect width="100%" height="100%" fill="#ffffff"/>',
            f'<text x="{WIDTH / 2:.1f}" y="30" text-anchor="middle" font-size="18" '
            f'font-family="sans-serif">{_escape(self.title)}</text>',
        ]

        x_ticks = _decade_ticks(x0, x1) if self.log_x else _nice_ticks(x0, x1)
        y_ticks = _decade_ticks(y0, y1) if self.log_y else _nice_ticks(y0, y1)
        for v in y_ticks:
            y = to_y(v)
            if not MARGIN_TOP - 1 <= y <= bottom + 1:
                continue
            out.append(
                f'<line x1="{MARGIN_LEFT}" y1="{y:.2f}" x2="{MARGIN_LEFT + plot_w}" '
                f'y2="{y:.2f}" stroke="#dddddd" stroke-width="1"/>'
            )
            out.append(
                f'<text x="{MARGIN_LEFT - 8}" y="{y + 4:.2f}" text-anchor="end" '
                f'font-size="12" font-family="sans-serif">{v:.6g}</text>'
            )
        for v in x_ticks:
            x = to_x(v)
            if not MARGIN_LEFT - 1 <= x <= MARGIN_LEFT + plot_w + 1:
                continue
            out.append(
                f'<line x1="{x:.2f}" y1="{bottom}" x2="{x:.2f}" y2="{bottom + 5}" '
                f'stroke="#000000" stroke-width="1"/>'
            )
            out.append(
                f'<text x="{x:.2f}" y="{bottom + 20}" text-anchor="middle" '
                f'font-size="12" font-family="sans-serif">{v:.6g}</text>'
            )

        out.append(
            f'<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{plot_w}" '
            f'height="{plot_h}" fill="none" stroke="#000000" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{MARGIN_LEFT + plot_w / 2:.1f}" y="{HEIGHT - 18}" '
            f'text-anchor="middle" font-size="14" font-family="sans-serif">'
            f"{_escape(self.x_label)}</text>"
        )
        out.append(
            f'<text x="22" y="{MARGIN_TOP + plot_h / 2:.1f}" text-anchor="middle" '
            f'font-size="14" font-family="sans-serif" '
            f'transform="rotate(-90 22 {MARGIN_TOP + plot_h / 2:.1f})">'
            f"{_escape(self.y_label)}</text>"
        )

        for idx, (mode, label, xs, ys) in enumerate(self.series):
            color = PALETTE[idx % len(PALETTE)]
            if mode == "line":
                pts = " ".join(f"{to_x(x):.2f},{to_y(y):.2f}" for x, y in zip(xs, ys))
                out.append(
                    f'<polyline points="{pts}" fill="none" stroke="{color}" '
                    f'stroke-width="1.8"/>'
                )
            else:
                for x, y in zip(xs, ys):
                    out.append(
                        f'<circle cx="{to_x(x):.2f}" cy="{to_y(y):.2f}" r="2.6" '
                        f'fill="{color}" fill-opacity="0.75"/>'
                    )
            out.append(
                f'<text x="{MARGIN_LEFT + plot_w - 8}" y="{MARGIN_TOP + 18 + 16 * idx}" '
                f'text-anchor="end" font-size="12" font-family="sans-serif" '
                f'fill="{color}">{_escape(label)}</text>'
            )

        for x, y, text in self.annotations:
            out.append(
                f'<circle cx="{to_x(x):.2f}" cy="{to_y(y):.2f}" r="4" fill="none" '
                f'stroke="#000000" stroke-width="1.2"/>'
            )
            out.append(
                f'<text x="{to_x(x) + 8:.2f}" y="{to_y(y) - 8:.2f}" font-size="12" '
                f'font-family="sans-serif">{_escape(text)}</text>'
            )

        out.append("</svg>")
        return "\n".join(out) + "\n"
