"""Minimal self-contained SVG line plots (no plotting dependency, stable bytes)."""

from __future__ import annotations

import math

_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]

_W, _H = 640, 420
_ML, _MR, _MT, _MB = 64, 16, 28, 44


def _ticks(lo, hi, n=6):
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / max(n - 1, 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        if raw <= mult * mag:
            step = mult * mag
            break
    start = math.ceil(lo / step) * step
    out = []
    t = start
    while t <= hi + 1e-12 * step:
        out.append(0.0 if abs(t) < 1e-12 * step else t)
        t += step
    return out


def _fmt(v):
    return f"{v:.6g}"


def line_plot(path, series, *, title="", xlabel="", ylabel="", logy=False):
    """Write an SVG plot of the named series [(label, xs, ys), ...]."""
    pts = [(x, math.log10(y) if logy else y)
           for _, xs, ys in series for x, y in zip(xs, ys)
           if not logy or y > 0]
    if not pts:
        raise ValueError("nothing to plot")
    x_lo = min(p[0] for p in pts)
    x_hi = max(p[0] for p in pts)
    y_lo = min(p[1] for p in pts)
    y_hi = max(p[1] for p in pts)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    padx = 0.03 * (x_hi - x_lo)
    pady = 0.06 * (y_hi - y_lo)
    x_lo, x_hi = x_lo - padx, x_hi + padx
    y_lo, y_hi = y_lo - pady, y_hi + pady

    def sx(x):
        return _ML + (x - x_lo) / (x_hi - x_lo) * (_W - _ML - _MR)

    def sy(y):
        return _H - _MB - (y - y_lo) / (y_hi - y_lo) * (_H - _MT - _MB)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}" '
           f'viewBox="0 0 {_W} {_H}">',
           f'<rect width="{_W}" height="{_H}" fill="white"/>']
    out.append(f'<text x="{_W // 2}" y="18" text-anchor="middle" '
               f'font-family="sans-serif" font-size="14">{title}</text>')
    for t in _ticks(x_lo, x_hi):
        px = sx(t)
        out.append(f'<line x1="{px:.2f}" y1="{_MT}" x2="{px:.2f}" y2="{_H - _MB}" '
                   f'stroke="#dddddd" stroke-width="1"/>')
        out.append(f'<text x="{px:.2f}" y="{_H - _MB + 16}" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="11">{_fmt(t)}</text>')
    for t in _ticks(y_lo, y_hi):
        py = sy(t)
        lab = _fmt(10.0 ** t) if logy else _fmt(t)
        out.append(f'<line x1="{_ML}" y1="{py:.2f}" x2="{_W - _MR}" y2="{py:.2f}" '
                   f'stroke="#dddddd" stroke-width="1"/>')
        out.append(f'<text x="{_ML - 6}" y="{py + 4:.2f}" text-anchor="end" '
                   f'font-family="sans-serif" font-size="11">{lab}</text>')
    out.append(f'<rect x="{_ML}" y="{_MT}" width="{_W - _ML - _MR}" '
               f'height="{_H - _MT - _MB}" fill="none" stroke="#444444"/>')
    if xlabel:
        out.append(f'<text x="{_W // 2}" y="{_H - 10}" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="12">{xlabel}</text>')
    if ylabel:
        out.append(f'<text x="16" y="{_H // 2}" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="12" '
                   f'transform="rotate(-90 16 {_H // 2})">{ylabel}</text>')
    for k, (label, xs, ys) in enumerate(series):
        color = _COLORS[k % len(_COLORS)]
        coords = [(sx(x), sy(math.log10(y) if logy else y))
                  for x, y in zip(xs, ys) if not logy or y > 0]
        if not coords:
            continue
        d = " ".join(f"{'M' if i == 0 else 'L'}{px:.2f},{py:.2f}"
                     for i, (px, py) in enumerate(coords))
        out.append(f'<path d="{d}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        for px, py in coords:
            out.append(f'<circle cx="{px:.2f}" cy="{py:.2f}" r="2.4" fill="{color}"/>')
        out.append(f'<text x="{_W - _MR - 8}" y="{_MT + 16 + 15 * k}" text-anchor="end" '
                   f'font-family="sans-serif" font-size="11" fill="{color}">{label}</text>')
    out.append("</svg>\n")
    with open(path, "w") as fh:
        fh.write("\n".join(out))
