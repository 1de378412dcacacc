"""Minimal SVG line plots: polylines, optional log axes, no dependencies.

CSV files are the normative outputs; these plots are reading aids only, so
the renderer stays deliberately small -- one axes box, decade or spread-out
ticks, one polyline per labelled curve, and a text legend.
"""

from __future__ import annotations

import math

__all__ = ["line_plot"]

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
            "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")

_WIDTH, _HEIGHT = 720, 480
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 72, 24, 36, 56


def _fmt(v):
    return f"{v:.6g}"


def _ticks(lo, hi, log):
    if log:
        first = math.ceil(math.log10(lo) - 1e-9)
        last = math.floor(math.log10(hi) + 1e-9)
        return [10.0**e for e in range(first, last + 1)]
    span = hi - lo
    step = 10.0 ** math.floor(math.log10(span / 4.0))
    for mult in (1.0, 2.0, 5.0, 10.0):
        if span / (step * mult) <= 6:
            step *= mult
            break
    first = math.ceil(lo / step)
    return [k * step for k in range(first, math.floor(hi / step) + 1)]


def line_plot(path, curves, title="", xlabel="", ylabel="", log_x=False, log_y=False):
    """Write an SVG with one polyline per (label, xs, ys) curve."""
    pts = [
        (x, y)
        for _, xs, ys in curves
        for x, y in zip(xs, ys)
        if (not log_x or x > 0) and (not log_y or y > 0)
    ]
    if not pts:
        raise ValueError("nothing to plot")
    fx = math.log10 if log_x else float
    fy = math.log10 if log_y else float
    xlo, xhi = min(p[0] for p in pts), max(p[0] for p in pts)
    ylo, yhi = min(p[1] for p in pts), max(p[1] for p in pts)
    if xhi == xlo:
        xhi = xlo + 1.0
    if yhi == ylo:
        yhi = ylo + 1.0

    x0, x1 = _MARGIN_L, _WIDTH - _MARGIN_R
    y0, y1 = _HEIGHT - _MARGIN_B, _MARGIN_T

    def sx(v):
        return x0 + (fx(v) - fx(xlo)) / (fx(xhi) - fx(xlo)) * (x1 - x0)

    def sy(v):
        return y0 + (fy(v) - fy(ylo)) / (fy(yhi) - fy(ylo)) * (y1 - y0)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" height="{_HEIGHT}" '
        f'viewBox="0 0 {_WIDTH} {_HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="{x0}" y="{y1}" width="{x1 - x0}" height="{y0 - y1}" '
        'fill="none" stroke="#000"/>',
    ]
    if title:
        out.append(
            f'<text x="{(x0 + x1) / 2}" y="{_MARGIN_T - 12}" text-anchor="middle">{title}</text>'
        )
    for tick in _ticks(xlo, xhi, log_x):
        if tick < xlo - 1e-12 or tick > xhi + 1e-12:
            continue
        px = sx(tick)
        out.append(f'<line x1="{px:.2f}" y1="{y0}" x2="{px:.2f}" y2="{y0 + 5}" stroke="#000"/>')
        out.append(
            f'<text x="{px:.2f}" y="{y0 + 18}" text-anchor="middle">{_fmt(tick)}</text>'
        )
    for tick in _ticks(ylo, yhi, log_y):
        if tick < ylo - 1e-12 or tick > yhi + 1e-12:
            continue
        py = sy(tick)
        out.append(f'<line x1="{x0 - 5}" y1="{py:.2f}" x2="{x0}" y2="{py:.2f}" stroke="#000"/>')
        out.append(
            f'<text x="{x0 - 8}" y="{py + 4:.2f}" text-anchor="end">{_fmt(tick)}</text>'
        )
    if xlabel:
        out.append(
            f'<text x="{(x0 + x1) / 2}" y="{_HEIGHT - 14}" text-anchor="middle">{xlabel}</text>'
        )
    if ylabel:
        out.append(
            f'<text x="16" y="{(y0 + y1) / 2}" text-anchor="middle" '
            f'transform="rotate(-90 16 {(y0 + y1) / 2})">{ylabel}</text>'
        )
    for i, (label, xs, ys) in enumerate(curves):
        color = _PALETTE[i % len(_PALETTE)]
        coords = " ".join(
            f"{sx(x):.2f},{sy(y):.2f}"
            for x, y in zip(xs, ys)
            if (not log_x or x > 0) and (not log_y or y > 0)
        )
        if coords:
            out.append(
                f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.5"/>'
            )
        ly = y1 + 16 + 16 * i
        out.append(
            f'<line x1="{x1 - 150}" y1="{ly - 4}" x2="{x1 - 126}" y2="{ly - 4}" '
            f'stroke="{color}" stroke-width="1.5"/>'
        )
        out.append(f'<text x="{x1 - 120}" y="{ly}">{label}</text>')
    out.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(out) + "\n")
