"""Minimal self-contained SVG line plots."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 800, 500
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 80, 80, 50, 60


@dataclass(frozen=True)
class Line:
    label: str
    values: np.ndarray
    color: str = "#000000"
    dashed: bool = False


def _ticks(lo: float, hi: float, count: int = 5) -> np.ndarray:
    return np.linspace(lo, hi, count)


def _fmt(x: float) -> str:
    return f"{x:.3g}"


def line_plot(times: Sequence[float], lines: Sequence[Line], title: str = "",
              left_label: str = "", right_label: str = "") -> str:
    """Render ``lines`` against ``times``.

    Left and right vertical axes share one scale, so series labelled on either
    side are directly comparable.
    """
    times = np.asarray(times, dtype=float)
    all_values = np.concatenate([np.asarray(line.values, float) for line in lines])
    y_lo, y_hi = float(np.min(all_values)), float(np.max(all_values))
    if y_hi - y_lo < 1e-12:
        y_lo, y_hi = y_lo - 0.5, y_hi + 0.5
    pad = 0.05 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad
    x_lo, x_hi = float(times[0]), float(times[-1])

    plot_w = WIDTH - _MARGIN_L - _MARGIN_R
    plot_h = HEIGHT - _MARGIN_T - _MARGIN_B

    def sx(x):
        return _MARGIN_L + (x - x_lo) / (x_hi - x_lo) * plot_w

    def sy(y):
        return _MARGIN_T + (y_hi - y) / (y_hi - y_lo) * plot_h

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>',
        f'<text x="{WIDTH / 2}" y="28" font-family="sans-serif" font-size="16" '
        f'text-anchor="middle">{escape(title)}</text>',
        f'<rect x="{_MARGIN_L}" y="{_MARGIN_T}" width="{plot_w}" height="{plot_h}" '
        'fill="none" stroke="#000000" stroke-width="1"/>',
    ]
    x_right = _MARGIN_L + plot_w
    for y in _ticks(y_lo, y_hi):
        py = sy(y)
        out.append(f'<line x1="{_MARGIN_L - 5}" y1="{py:.2f}" x2="{_MARGIN_L}" y2="{py:.2f}" stroke="#000000"/>')
        out.append(f'<line x1="{x_right}" y1="{py:.2f}" x2="{x_right + 5}" y2="{py:.2f}" stroke="#000000"/>')
        out.append(f'<text x="{_MARGIN_L - 8}" y="{py + 4:.2f}" font-family="sans-serif" font-size="11" '
                   f'text-anchor="end">{_fmt(y)}</text>')
        out.append(f'<text x="{x_right + 8}" y="{py + 4:.2f}" font-family="sans-serif" font-size="11" '
                   f'text-anchor="start">{_fmt(y)}</text>')
    for x in _ticks(x_lo, x_hi, 6):
        px = sx(x)
        y_axis = _MARGIN_T + plot_h
        out.append(f'<line x1="{px:.2f}" y1="{y_axis}" x2="{px:.2f}" y2="{y_axis + 5}" stroke="#000000"/>')
        out.append(f'<text x="{px:.2f}" y="{y_axis + 20}" font-family="sans-serif" font-size="11" '
                   f'text-anchor="middle">{_fmt(x)}</text>')
    out.append(f'<text x="{_MARGIN_L + plot_w / 2}" y="{HEIGHT - 15}" font-family="sans-serif" '
               'font-size="13" text-anchor="middle">t</text>')
    if left_label:
        out.append(f'<text x="20" y="{_MARGIN_T + plot_h / 2}" font-family="sans-serif" font-size="13" '
                   f'text-anchor="middle" transform="rotate(-90 20 {_MARGIN_T + plot_h / 2})">'
                   f'{escape(left_label)}</text>')
    if right_label:
        xr = WIDTH - 20
        out.append(f'<text x="{xr}" y="{_MARGIN_T + plot_h / 2}" font-family="sans-serif" font-size="13" '
                   f'text-anchor="middle" transform="rotate(90 {xr} {_MARGIN_T + plot_h / 2})">'
                   f'{escape(right_label)}</text>')

    for k, line in enumerate(lines):
        points = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(times, line.values))
        dash = ' stroke-dasharray="6,4"' if line.dashed else ""
        out.append(f'<polyline fill="none" stroke="{line.color}" stroke-width="1.5"{dash} '
                   f'points="{points}"/>')
        ly = _MARGIN_T + 14 + 16 * k
        out.append(f'<line x1="{_MARGIN_L + 10}" y1="{ly}" x2="{_MARGIN_L + 34}" y2="{ly}" '
                   f'stroke="{line.color}" stroke-width="1.5"{dash}/>')
        out.append(f'<text x="{_MARGIN_L + 40}" y="{ly + 4}" font-family="sans-serif" font-size="11">'
                   f'{escape(line.label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
