"""Minimal standalone SVG line charts with shaded one-sd bands."""

from __future__ import annotations

import math
from pathlib import Path
from typing import Mapping, Optional, Sequence
from xml.sax.saxutils import escape

COLORS = {"DA": "#444444", "WDA": "#1f77b4", "PDA": "#d62728"}
_FALLBACK = ["#2ca02c", "#9467bd", "#8c564b", "#e377c2"]

W, H = 640, 420
LEFT, RIGHT, TOP, BOTTOM = 80, 130, 40, 60


def _nice_ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((s * mag for s in (1, 2, 2.5, 5, 10) if s * mag >= raw), default=10 * mag)
    start = math.floor(lo / step) * step
    ticks, t = [], start
    while t <= hi + 1e-9 * step:
        if t >= lo - 1e-9 * step:
            ticks.append(round(t, 10))
        t += step
    return ticks


def _fmt(v: float) -> str:
    if abs(v) >= 1000:
        return f"{v:,.0f}"
    if float(v).is_integer():
        return f"{int(v)}"
    return f"{v:g}"


def line_chart(
    path,
    x: Sequence[float],
    series: Mapping[str, tuple[Sequence[float], Sequence[float]]],
    title: str,
    xlabel: str,
    ylabel: str,
    labels: Optional[Mapping[str, Sequence[str]]] = None,
) -> None:
    """Write an SVG with one line per series and a translucent mean ± sd band.

    ``labels`` optionally attaches a short text annotation to each point of a series.
    """
    xs = [float(v) for v in x]
    lows = [m - s for ms, ss in series.values() for m, s in zip(ms, ss)]
    highs = [m + s for ms, ss in series.values() for m, s in zip(ms, ss)]
    y_lo, y_hi = min(0.0, min(lows, default=0.0)), max(highs, default=1.0)
    y_ticks = _nice_ticks(y_lo, y_hi * 1.05 if y_hi > 0 else 1.0)
    y_lo, y_hi = y_ticks[0], y_ticks[-1]
    x_lo, x_hi = min(xs), max(xs)
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    pw, ph = W - LEFT - RIGHT, H - TOP - BOTTOM

    def px(v):
        return LEFT + (v - x_lo) / (x_hi - x_lo) * pw

    def py(v):
        return TOP + ph - (v - y_lo) / (y_hi - y_lo) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}" '
        'font-family="sans-serif" font-size="12">',
        f'<rect width="{W}" height="{H}" fill="white"/>',
        f'<text x="{W / 2:.1f}" y="22" text-anchor="middle" font-size="15">{escape(title)}</text>',
    ]
    for t in y_ticks:
        out.append(f'<line x1="{LEFT}" y1="{py(t):.2f}" x2="{LEFT + pw}" y2="{py(t):.2f}" stroke="#e5e5e5"/>')
        out.append(f'<text x="{LEFT - 6}" y="{py(t) + 4:.2f}" text-anchor="end">{_fmt(t)}</text>')
    for v in xs:
        out.append(f'<line x1="{px(v):.2f}" y1="{TOP + ph}" x2="{px(v):.2f}" y2="{TOP + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{px(v):.2f}" y="{TOP + ph + 18}" text-anchor="middle">{_fmt(v)}</text>')
    out.append(f'<rect x="{LEFT}" y="{TOP}" width="{pw}" height="{ph}" fill="none" stroke="black"/>')
    out.append(f'<text x="{LEFT + pw / 2:.1f}" y="{H - 18}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text transform="translate(20,{TOP + ph / 2:.1f}) rotate(-90)" '
               f'text-anchor="middle">{escape(ylabel)}</text>')

    for k, (name, (means, sds)) in enumerate(series.items()):
        color = COLORS.get(name, _FALLBACK[k % len(_FALLBACK)])
        upper = [f"{px(a):.2f},{py(m + s):.2f}" for a, m, s in zip(xs, means, sds)]
        lower = [f"{px(a):.2f},{py(m - s):.2f}" for a, m, s in reversed(list(zip(xs, means, sds)))]
        out.append(f'<polygon points="{" ".join(upper + lower)}" fill="{color}" fill-opacity="0.18" stroke="none"/>')
        pts = " ".join(f"{px(a):.2f},{py(m):.2f}" for a, m in zip(xs, means))
        out.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="2"/>')
        for a, m in zip(xs, means):
            out.append(f'<circle cx="{px(a):.2f}" cy="{py(m):.2f}" r="3" fill="{color}"/>')
        if labels and name in labels:
            for a, m, text in zip(xs, means, labels[name]):
                out.append(f'<text x="{px(a):.2f}" y="{py(m) - 8:.2f}" text-anchor="middle" '
                           f'fill="#2ca02c" font-size="10">{escape(text)}</text>')
        ly = TOP + 16 + 20 * k
        out.append(f'<line x1="{LEFT + pw + 14}" y1="{ly}" x2="{LEFT + pw + 38}" y2="{ly}" '
                   f'stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{LEFT + pw + 44}" y="{ly + 4}">{escape(name)}</text>')
    out.append("</svg>")
    Path(path).write_text("\n".join(out) + "\n")
