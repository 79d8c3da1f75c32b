"""Tiny hand-rolled SVG charts.

Text-based and fully deterministic for a given input, so chart artifacts
diff cleanly across runs; no plotting dependency.
"""

from __future__ import annotations

import math

WIDTH, HEIGHT = 640, 400
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 64, 20, 36, 48

PALETTE = ("#1f4e8c", "#7fb3e0", "#d62728", "#7f7f7f", "#2ca02c", "#9467bd")


def _fmt(v: float) -> str:
    return f"{v:.2f}".rstrip("0").rstrip(".") if v == v else "nan"


def _nice_ticks(lo: float, hi: float, target: int = 5) -> list[float]:
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
    t = first
    while t <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(t) < step * 1e-9 else t)
        t += step
    return ticks


def _axes(x_lo, x_hi, y_lo, y_hi, title, x_label, y_label):
    plot_w = WIDTH - MARGIN_L - MARGIN_R
    plot_h = HEIGHT - MARGIN_T - MARGIN_B

    def sx(v):
        return MARGIN_L + (v - x_lo) / (x_hi - x_lo) * plot_w

    def sy(v):
        return MARGIN_T + plot_h - (v - y_lo) / (y_hi - y_lo) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" '
        f'font-family="sans-serif" font-size="12">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.1f}" y="20" text-anchor="middle" font-size="14">{title}</text>',
        f'<text x="{MARGIN_L + plot_w / 2:.1f}" y="{HEIGHT - 10}" text-anchor="middle">{x_label}</text>',
        f'<text x="16" y="{MARGIN_T + plot_h / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 16 {MARGIN_T + plot_h / 2:.1f})">{y_label}</text>',
        f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{plot_w}" height="{plot_h}" '
        f'fill="none" stroke="#333"/>',
    ]
    for t in _nice_ticks(y_lo, y_hi):
        y = sy(t)
        parts.append(f'<line x1="{MARGIN_L - 4}" y1="{y:.1f}" x2="{MARGIN_L}" y2="{y:.1f}" stroke="#333"/>')
        parts.append(
            f'<line x1="{MARGIN_L}" y1="{y:.1f}" x2="{MARGIN_L + plot_w}" y2="{y:.1f}" '
            f'stroke="#ddd" stroke-dasharray="3,3"/>'
        )
        parts.append(f'<text x="{MARGIN_L - 8}" y="{y + 4:.1f}" text-anchor="end">{_fmt(t)}</text>')
    return parts, sx, sy


def line_chart(
    series: dict[str, list[tuple[float, float]]],
    title: str,
    x_label: str,
    y_label: str,
    colors: dict[str, str] | None = None,
) -> str:
    """Multi-series line chart; series maps name -> [(x, y), ...]."""
    xs = [x for pts in series.values() for x, _ in pts]
    ys = [y for pts in series.values() for _, y in pts if math.isfinite(y)]
    x_lo, x_hi = min(xs), max(xs)
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    y_lo, y_hi = min(ys), max(ys)
    pad = 0.05 * (y_hi - y_lo) or 0.5
    y_lo, y_hi = y_lo - pad, y_hi + pad

    parts, sx, sy = _axes(x_lo, x_hi, y_lo, y_hi, title, x_label, y_label)
    for i, t in enumerate(sorted({int(x) for x in xs})):
        x = sx(t)
        parts.append(f'<line x1="{x:.1f}" y1="{sy(y_lo):.1f}" x2="{x:.1f}" y2="{sy(y_lo) + 4:.1f}" stroke="#333"/>')
        parts.append(f'<text x="{x:.1f}" y="{sy(y_lo) + 18:.1f}" text-anchor="middle">{t}</text>')

    for i, (name, pts) in enumerate(series.items()):
        color = (colors or {}).get(name, PALETTE[i % len(PALETTE)])
        coords = " ".join(f"{sx(x):.1f},{sy(y):.1f}" for x, y in pts if math.isfinite(y))
        parts.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="2"/>')
        for x, y in pts:
            if math.isfinite(y):
                parts.append(f'<circle cx="{sx(x):.1f}" cy="{sy(y):.1f}" r="3" fill="{color}"/>')
        ly = MARGIN_T + 14 + 16 * i
        lx = WIDTH - MARGIN_R - 110
        parts.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 22}" y2="{ly - 4}" stroke="{color}" stroke-width="2"/>')
        parts.append(f'<text x="{lx + 28}" y="{ly}">{name}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def bar_chart(
    bars: list[tuple[str, float | None, float | None]],
    title: str,
    y_label: str,
) -> str:
    """Bar chart with optional error whiskers; None values render as a dash."""
    tops = [v + (e or 0.0) for _, v, e in bars if v is not None]
    y_hi = max(max(tops) * 1.08, 1e-9) if tops else 1.0
    parts, sx, sy = _axes(0.0, float(len(bars)), 0.0, y_hi, title, "", y_label)
    plot_h = HEIGHT - MARGIN_T - MARGIN_B
    slot = (WIDTH - MARGIN_L - MARGIN_R) / len(bars)
    for i, (label, value, err) in enumerate(bars):
        cx = MARGIN_L + slot * (i + 0.5)
        if value is None:
            parts.append(f'<text x="{cx:.1f}" y="{MARGIN_T + plot_h - 8:.1f}" text-anchor="middle" font-size="16">&#8212;</text>')
        else:
            w = slot * 0.6
            top = sy(value)
            parts.append(
                f'<rect x="{cx - w / 2:.1f}" y="{top:.1f}" width="{w:.1f}" '
                f'height="{MARGIN_T + plot_h - top:.1f}" fill="{PALETTE[0]}"/>'
            )
            if err:
                parts.append(f'<line x1="{cx:.1f}" y1="{sy(value - err):.1f}" x2="{cx:.1f}" y2="{sy(min(value + err, y_hi)):.1f}" stroke="#333"/>')
                for yv in (value - err, min(value + err, y_hi)):
                    parts.append(f'<line x1="{cx - 5:.1f}" y1="{sy(yv):.1f}" x2="{cx + 5:.1f}" y2="{sy(yv):.1f}" stroke="#333"/>')
            parts.append(f'<text x="{cx:.1f}" y="{top - 6:.1f}" text-anchor="middle">{_fmt(value)}</text>')
        parts.append(f'<text x="{cx:.1f}" y="{MARGIN_T + plot_h + 16:.1f}" text-anchor="middle">{label}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
