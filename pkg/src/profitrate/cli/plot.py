"""Minimal deterministic SVG line charts."""

from __future__ import annotations

from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

__all__ = ["render_plot", "PALETTE"]

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b")
W, H = 720, 420
LEFT, RIGHT, TOP, BOTTOM = 70, 160, 30, 50


def _ticks(lo: float, hi: float, n: int = 5) -> np.ndarray:
    if hi == lo:
        return np.array([lo])
    raw = (hi - lo) / n
    mag = 10 ** np.floor(np.log10(raw))
    step = min((s * mag for s in (1, 2, 5, 10) if s * mag >= raw), default=10 * mag)
    return np.arange(np.ceil(lo / step) * step, hi + step * 1e-9, step)


def render_plot(path, series, title: str = "", ylabel: str = "rate") -> Path:
    """Write an SVG chart.

    ``series`` is a list of ``(label, years, values)``; the first is drawn as
    the main line and the rest as overlays, each with a legend entry.
    """
    if not series or any(len(v) == 0 for _, _, v in series):
        raise ValueError("nothing to plot: empty series")
    xs = np.concatenate([np.asarray(y, float) for _, y, _ in series])
    ys = np.concatenate([np.asarray(v, float) for _, _, v in series])
    x0, x1 = xs.min(), xs.max()
    y0, y1 = ys.min(), ys.max()
    if x1 == x0:
        x0, x1 = x0 - 1, x1 + 1
    if y1 == y0:
        y0, y1 = y0 - 1, y1 + 1
    pw, ph = W - LEFT - RIGHT, H - TOP - BOTTOM

    def px(x):
        return LEFT + (x - x0) / (x1 - x0) * pw

    def py(y):
        return TOP + (y1 - y) / (y1 - y0) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
           f'<rect width="{W}" height="{H}" fill="white"/>',
           f'<text x="{W / 2:.1f}" y="18" text-anchor="middle" font-size="14">{escape(title)}</text>',
           f'<line x1="{LEFT}" y1="{TOP + ph}" x2="{LEFT + pw}" y2="{TOP + ph}" stroke="black"/>',
           f'<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{TOP + ph}" stroke="black"/>']
    for t in _ticks(x0, x1):
        out.append(f'<text x="{px(t):.2f}" y="{TOP + ph + 16}" text-anchor="middle" font-size="10">{t:g}</text>')
    for t in _ticks(y0, y1):
        out.append(f'<text x="{LEFT - 6}" y="{py(t) + 3:.2f}" text-anchor="end" font-size="10">{t:.4g}</text>')
    out.append(f'<text x="{LEFT + pw / 2:.1f}" y="{H - 10}" text-anchor="middle" font-size="12">year</text>')
    out.append(f'<text x="16" y="{TOP + ph / 2:.1f}" text-anchor="middle" font-size="12" '
               f'transform="rotate(-90 16 {TOP + ph / 2:.1f})">{escape(ylabel)}</text>')
    for i, (label, years, values) in enumerate(series):
        colour = PALETTE[i % len(PALETTE)]
        pts = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in zip(years, values))
        width = 1.5 if i == 0 else 2.0
        out.append(f'<polyline fill="none" stroke="{colour}" stroke-width="{width}" points="{pts}">'
                   f'<title>{escape(label)}</title></polyline>')
        ly = TOP + 14 + 18 * i
        out.append(f'<g class="legend"><line x1="{LEFT + pw + 10}" y1="{ly}" x2="{LEFT + pw + 30}" y2="{ly}" '
                   f'stroke="{colour}" stroke-width="2"/><text x="{LEFT + pw + 35}" y="{ly + 4}" '
                   f'font-size="11">{escape(label)}</text></g>')
    out.append("</svg>")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(out) + "\n", encoding="utf-8")
    return path
