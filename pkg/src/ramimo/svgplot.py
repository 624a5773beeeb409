"""Minimal deterministic SVG line plots: linear or log-y axes plus a legend.

The CSV files are the real output contract; these plots exist so a sweep can
be eyeballed without extra tooling, and they are written with fixed number
formatting so identical data gives identical bytes.
"""

from __future__ import annotations

import math

_W, _H = 640, 440
_ML, _MR, _MT, _MB = 70, 20, 20, 50  # margins
_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def _ticks(lo: float, hi: float, n: int = 6) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10.0 ** math.floor(math.log10(raw))
    step = min(s for s in (mag, 2 * mag, 5 * mag, 10 * mag) if s >= raw)
    start = math.ceil(lo / step) * step
    out = []
    t = start
    while t <= hi + 1e-12 * step:
        out.append(round(t, 12))
        t += step
    return out


def _log_ticks(lo: float, hi: float) -> list[float]:
    lo_e = math.floor(math.log10(lo))
    hi_e = math.ceil(math.log10(hi))
    return [10.0**e for e in range(lo_e, hi_e + 1) if lo <= 10.0**e <= hi * (1 + 1e-12)]


def write_svg(
    path,
    series: list[tuple[str, list[float], list[float]]],
    x_label: str,
    y_label: str,
    log_y: bool = False,
    title: str = "",
) -> None:
    """Write a line plot of (label, xs, ys) series; log_y drops values <= 0."""
    pts = []
    for _, xs, ys in series:
        pts += [(x, y) for x, y in zip(xs, ys) if not log_y or y > 0]
    if not pts:
        raise ValueError("nothing to plot")
    x_lo, x_hi = min(p[0] for p in pts), max(p[0] for p in pts)
    y_lo, y_hi = min(p[1] for p in pts), max(p[1] for p in pts)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if log_y:
        y_lo, y_hi = math.log10(y_lo), math.log10(y_hi)
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    pw, ph = _W - _ML - _MR, _H - _MT - _MB

    def sx(x):
        return _ML + pw * (x - x_lo) / (x_hi - x_lo)

    def sy(y):
        v = math.log10(y) if log_y else y
        return _MT + ph * (1.0 - (v - y_lo) / (y_hi - y_lo))

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
        f'font-family="sans-serif" font-size="12">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
    ]
    if title:
        out.append(f'<text x="{_W/2:.0f}" y="14" text-anchor="middle">{title}</text>')
    # axes box
    out.append(
        f'<rect x="{_ML}" y="{_MT}" width="{pw}" height="{ph}" fill="none" stroke="black"/>'
    )
    x_ticks = _ticks(x_lo, x_hi)
    y_ticks = _log_ticks(10**y_lo, 10**y_hi) if log_y else _ticks(y_lo, y_hi)
    for t in x_ticks:
        px = sx(t)
        out.append(
            f'<line x1="{_fmt(px)}" y1="{_MT + ph}" x2="{_fmt(px)}" y2="{_MT + ph + 4}" stroke="black"/>'
        )
        out.append(
            f'<text x="{_fmt(px)}" y="{_MT + ph + 18}" text-anchor="middle">{t:g}</text>'
        )
    for t in y_ticks:
        py = sy(t)
        label = f"1e{round(math.log10(t))}" if log_y else f"{t:g}"
        out.append(
            f'<line x1="{_ML - 4}" y1="{_fmt(py)}" x2="{_ML}" y2="{_fmt(py)}" stroke="black"/>'
        )
        out.append(
            f'<text x="{_ML - 8}" y="{_fmt(py + 4)}" text-anchor="end">{label}</text>'
        )
    out.append(
        f'<text x="{_ML + pw / 2:.0f}" y="{_H - 12}" text-anchor="middle">{x_label}</text>'
    )
    out.append(
        f'<text x="16" y="{_MT + ph / 2:.0f}" text-anchor="middle" '
        f'transform="rotate(-90 16 {_MT + ph / 2:.0f})">{y_label}</text>'
    )
    for i, (label, xs, ys) in enumerate(series):
        color = _COLORS[i % len(_COLORS)]
        keep = [(x, y) for x, y in zip(xs, ys) if not log_y or y > 0]
        if keep:
            path_d = " ".join(f"{_fmt(sx(x))},{_fmt(sy(y))}" for x, y in keep)
            out.append(
                f'<polyline points="{path_d}" fill="none" stroke="{color}" stroke-width="1.5"/>'
            )
        ly = _MT + 16 + 16 * i
        out.append(
            f'<line x1="{_ML + 10}" y1="{ly - 4}" x2="{_ML + 34}" y2="{ly - 4}" '
            f'stroke="{color}" stroke-width="1.5"/>'
        )
        out.append(f'<text x="{_ML + 40}" y="{ly}">{label}</text>')
    out.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(out) + "\n")
