"""Minimal self-contained SVG 1.1 rendering: line plots and heatmaps.

These are visual aids for the exported CSV data, not a plotting framework:
fixed margins, five ticks per axis, a short list of series colors and a
simple heat colormap.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np


_SERIES_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _short(x: float) -> str:
    if x == 0:
        return "0"
    if 1e-3 <= abs(x) < 1e4:
        return f"{x:.4g}"
    return f"{x:.3e}"


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if not math.isfinite(lo) or not math.isfinite(hi) or lo == hi:
        return [lo]
    return [lo + (hi - lo) * i / (n - 1) for i in range(n)]


def _svg_header(width: int, height: int) -> list[str]:
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
    ]


def _axes(parts, x0, y0, x1, y1, xlo, xhi, ylo, yhi, xlabel, ylabel, title):
    parts.append(
        f'<line x1="{x0}" y1="{y1}" x2="{x1}" y2="{y1}" stroke="black" stroke-width="1"/>'
    )
    parts.append(
        f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black" stroke-width="1"/>'
    )
    for tx in _ticks(xlo, xhi):
        px = x0 + (tx - xlo) / (xhi - xlo) * (x1 - x0) if xhi != xlo else x0
        parts.append(f'<line x1="{px:.2f}" y1="{y1}" x2="{px:.2f}" y2="{y1 + 5}" stroke="black"/>')
        parts.append(
            f'<text x="{px:.2f}" y="{y1 + 18}" font-size="11" text-anchor="middle" '
            f'font-family="sans-serif">{_short(tx)}</text>'
        )
    for ty in _ticks(ylo, yhi):
        py = y1 - (ty - ylo) / (yhi - ylo) * (y1 - y0) if yhi != ylo else y1
        parts.append(f'<line x1="{x0 - 5}" y1="{py:.2f}" x2="{x0}" y2="{py:.2f}" stroke="black"/>')
        parts.append(
            f'<text x="{x0 - 8}" y="{py + 4:.2f}" font-size="11" text-anchor="end" '
            f'font-family="sans-serif">{_short(ty)}</text>'
        )
    cx = (x0 + x1) / 2
    parts.append(
        f'<text x="{cx}" y="{y1 + 36}" font-size="13" text-anchor="middle" '
        f'font-family="sans-serif">{xlabel}</text>'
    )
    parts.append(
        f'<text x="16" y="{(y0 + y1) / 2}" font-size="13" text-anchor="middle" '
        f'font-family="sans-serif" transform="rotate(-90 16 {(y0 + y1) / 2})">{ylabel}</text>'
    )
    parts.append(
        f'<text x="{cx}" y="{y0 - 10}" font-size="14" text-anchor="middle" '
        f'font-family="sans-serif">{title}</text>'
    )


def line_plot(
    path,
    series: Sequence[tuple[str, Sequence[float], Sequence[float]]],
    title: str = "",
    xlabel: str = "",
    ylabel: str = "",
    width: int = 640,
    height: int = 440,
) -> None:
    """Render one or more (label, x, y) series as polylines."""
    x0, y0, x1, y1 = 70, 30, width - 20, height - 60
    xs = np.concatenate([np.asarray(x, float) for _, x, _ in series])
    ys = np.concatenate([np.asarray(y, float) for _, _, y in series])
    finite = np.isfinite(xs) & np.isfinite(ys)
    if not finite.any():
        raise ValueError("nothing finite to plot")
    xlo, xhi = float(xs[finite].min()), float(xs[finite].max())
    ylo, yhi = float(ys[finite].min()), float(ys[finite].max())
    if xhi == xlo:
        xhi = xlo + 1.0
    if yhi == ylo:
        yhi = ylo + 1.0
    pad = 0.05 * (yhi - ylo)
    ylo -= pad
    yhi += pad

    parts = _svg_header(width, height)
    _axes(parts, x0, y0, x1, y1, xlo, xhi, ylo, yhi, xlabel, ylabel, title)
    for k, (label, x, y) in enumerate(series):
        color = _SERIES_COLORS[k % len(_SERIES_COLORS)]
        x = np.asarray(x, float)
        y = np.asarray(y, float)
        good = np.isfinite(x) & np.isfinite(y)
        # break the polyline at gaps so missing cells do not get bridged
        segments: list[list[str]] = [[]]
        for xi, yi, ok in zip(x, y, good):
            if not ok:
                if segments[-1]:
                    segments.append([])
                continue
            px = x0 + (xi - xlo) / (xhi - xlo) * (x1 - x0)
            py = y1 - (yi - ylo) / (yhi - ylo) * (y1 - y0)
            segments[-1].append(f"{px:.2f},{py:.2f}")
        for seg in segments:
            if len(seg) >= 2:
                parts.append(
                    f'<polyline points="{" ".join(seg)}" fill="none" '
                    f'stroke="{color}" stroke-width="1.5"/>'
                )
        if label:
            ly = y0 + 14 + 16 * k
            parts.append(
                f'<line x1="{x1 - 120}" y1="{ly - 4}" x2="{x1 - 95}" y2="{ly - 4}" '
                f'stroke="{color}" stroke-width="2"/>'
            )
            parts.append(
                f'<text x="{x1 - 90}" y="{ly}" font-size="11" '
                f'font-family="sans-serif">{label}</text>'
            )
    parts.append("</svg>")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(parts) + "\n")


def _heat_color(t: float) -> str:
    """Black-red-yellow-white ramp for t in [0, 1]."""
    t = min(1.0, max(0.0, t))
    r = min(1.0, 3.0 * t)
    g = min(1.0, max(0.0, 3.0 * t - 1.0))
    b = min(1.0, max(0.0, 3.0 * t - 2.0))
    return f"#{int(255 * r):02x}{int(255 * g):02x}{int(255 * b):02x}"


def heatmap(
    path,
    x_axis: Sequence[float],
    y_axis: Sequence[float],
    values: np.ndarray,
    title: str = "",
    xlabel: str = "",
    ylabel: str = "",
    width: int = 560,
    height: int = 540,
) -> None:
    """Render values[i, j] at (x_axis[i], y_axis[j]) as colored cells."""
    x_axis = np.asarray(x_axis, float)
    y_axis = np.asarray(y_axis, float)
    values = np.asarray(values, float)
    if values.shape != (x_axis.size, y_axis.size):
        raise ValueError("values shape must match the axes")
    x0, y0, x1, y1 = 70, 30, width - 30, height - 60
    xlo, xhi = float(x_axis.min()), float(x_axis.max())
    ylo, yhi = float(y_axis.min()), float(y_axis.max())
    top = float(values.max()) or 1.0

    parts = _svg_header(width, height)
    nx, ny = x_axis.size, y_axis.size
    cw = (x1 - x0) / nx
    ch = (y1 - y0) / ny
    for i in range(nx):
        for j in range(ny):
            color = _heat_color(values[i, j] / top)
            px = x0 + i * cw
            py = y1 - (j + 1) * ch
            parts.append(
                f'<rect x="{px:.2f}" y="{py:.2f}" width="{cw + 0.5:.2f}" '
                f'height="{ch + 0.5:.2f}" fill="{color}"/>'
            )
    _axes(parts, x0, y0, x1, y1, xlo, xhi, ylo, yhi, xlabel, ylabel, title)
    parts.append("</svg>")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(parts) + "\n")
