"""Dependency-free SVG polyline plots for the experiment tables."""

from __future__ import annotations

WIDTH, HEIGHT = 640, 440
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 20, 40, 60


def _ticks(lo: float, hi: float, count: int = 6) -> list[float]:
    if hi <= lo:
        return [lo]
    step = (hi - lo) / (count - 1)
    return [lo + i * step for i in range(count)]


def _fmt(x: float) -> str:
    return f"{x:.6g}"


def polyline_plot(points, xlabel: str, ylabel: str, title: str) -> str:
    """SVG document for one x-sorted line series with axes and ticks."""
    pts = sorted((float(x), float(y)) for x, y in points)
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = min(ys), max(ys)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    plot_w = WIDTH - MARGIN_L - MARGIN_R
    plot_h = HEIGHT - MARGIN_T - MARGIN_B

    def px(x: float) -> float:
        return MARGIN_L + (x - x_lo) / (x_hi - x_lo) * plot_w

    def py(y: float) -> float:
        return MARGIN_T + plot_h - (y - y_lo) / (y_hi - y_lo) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" '
        f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.1f}" y="24" text-anchor="middle" '
        f'font-size="16" font-family="sans-serif">{title}</text>',
    ]
    axis_y = MARGIN_T + plot_h
    parts.append(f'<line x1="{MARGIN_L}" y1="{axis_y}" '
                 f'x2="{MARGIN_L + plot_w}" y2="{axis_y}" stroke="black"/>')
    parts.append(f'<line x1="{MARGIN_L}" y1="{MARGIN_T}" '
                 f'x2="{MARGIN_L}" y2="{axis_y}" stroke="black"/>')
    for t in _ticks(x_lo, x_hi):
        x = px(t)
        parts.append(f'<line x1="{x:.1f}" y1="{axis_y}" x2="{x:.1f}" '
                     f'y2="{axis_y + 5}" stroke="black"/>')
        parts.append(f'<text x="{x:.1f}" y="{axis_y + 20}" '
                     f'text-anchor="middle" font-size="11" '
                     f'font-family="sans-serif">{_fmt(t)}</text>')
    for t in _ticks(y_lo, y_hi):
        y = py(t)
        parts.append(f'<line x1="{MARGIN_L - 5}" y1="{y:.1f}" '
                     f'x2="{MARGIN_L}" y2="{y:.1f}" stroke="black"/>')
        parts.append(f'<text x="{MARGIN_L - 8}" y="{y + 4:.1f}" '
                     f'text-anchor="end" font-size="11" '
                     f'font-family="sans-serif">{_fmt(t)}</text>')
    parts.append(f'<text x="{MARGIN_L + plot_w / 2:.1f}" '
                 f'y="{HEIGHT - 14}" text-anchor="middle" font-size="13" '
                 f'font-family="sans-serif">{xlabel}</text>')
    parts.append(f'<text x="18" y="{MARGIN_T + plot_h / 2:.1f}" '
                 f'text-anchor="middle" font-size="13" '
                 f'font-family="sans-serif" transform="rotate(-90 18 '
                 f'{MARGIN_T + plot_h / 2:.1f})">{ylabel}</text>')
    path = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in pts)
    parts.append(f'<polyline points="{path}" fill="none" stroke="#1f77b4" '
                 f'stroke-width="2"/>')
    for x, y in pts:
        parts.append(f'<circle cx="{px(x):.2f}" cy="{py(y):.2f}" r="3.5" '
                     f'fill="#1f77b4"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
