"""Tiny dependency-free SVG line charts for CLI artifacts.

Output is a pure function of the inputs (fixed precision, fixed palette),
so repeated runs emit byte-identical files.
"""

from __future__ import annotations

from typing import Sequence

PALETTE = (
    "#1f77b4",
    "#d62728",
    "#2ca02c",
    "#9467bd",
    "#ff7f0e",
    "#8c564b",
    "#17becf",
    "#7f7f7f",
)

WIDTH = 640
HEIGHT = 420
MARGIN = 56


def _fmt(x: float) -> str:
    return f"{x:.3f}"


def line_chart(
    series: Sequence[tuple[str, Sequence[float], Sequence[float]]],
    title: str,
    x_label: str,
    y_label: str,
) -> str:
    """Render labelled (xs, ys) polylines with axes and a legend."""
    xs_all = [x for _, xs, _ in series for x in xs]
    ys_all = [y for _, _, ys in series for y in ys]
    if not xs_all:
        xs_all = [0.0, 1.0]
        ys_all = [0.0, 1.0]
    x_min, x_max = min(xs_all), max(xs_all)
    y_min, y_max = min(ys_all), max(ys_all)
    if x_max == x_min:
        x_max = x_min + 1.0
    if y_max == y_min:
        y_max = y_min + 1.0
    plot_w = WIDTH - 2 * MARGIN
    plot_h = HEIGHT - 2 * MARGIN

    def px(x: float) -> float:
        return MARGIN + (x - x_min) / (x_max - x_min) * plot_w

    def py(y: float) -> float:
        return HEIGHT - MARGIN - (y - y_min) / (y_max - y_min) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH // 2}" y="24" text-anchor="middle" '
        f'font-family="sans-serif" font-size="15">{title}</text>',
        f'<line x1="{MARGIN}" y1="{HEIGHT - MARGIN}" x2="{WIDTH - MARGIN}" '
        f'y2="{HEIGHT - MARGIN}" stroke="black"/>',
        f'<line x1="{MARGIN}" y1="{MARGIN}" x2="{MARGIN}" '
        f'y2="{HEIGHT - MARGIN}" stroke="black"/>',
        f'<text x="{WIDTH // 2}" y="{HEIGHT - 12}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12">{x_label}</text>',
        f'<text x="16" y="{HEIGHT // 2}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="12" '
        f'transform="rotate(-90 16 {HEIGHT // 2})">{y_label}</text>',
    ]
    for value, anchor in ((x_min, "start"), (x_max, "end")):
        parts.append(
            f'<text x="{_fmt(px(value))}" y="{HEIGHT - MARGIN + 16}" '
            f'text-anchor="{anchor}" font-family="sans-serif" font-size="10">'
            f"{value:g}</text>"
        )
    for value in (y_min, y_max):
        parts.append(
            f'<text x="{MARGIN - 6}" y="{_fmt(py(value) + 3)}" text-anchor="end" '
            f'font-family="sans-serif" font-size="10">{value:g}</text>'
        )
    for idx, (label, xs, ys) in enumerate(series):
        color = PALETTE[idx % len(PALETTE)]
        points = " ".join(f"{_fmt(px(x))},{_fmt(py(y))}" for x, y in zip(xs, ys))
        parts.append(
            f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
            f'points="{points}"/>'
        )
        ly = MARGIN + 16 * idx
        parts.append(
            f'<line x1="{WIDTH - MARGIN - 110}" y1="{ly}" '
            f'x2="{WIDTH - MARGIN - 86}" y2="{ly}" stroke="{color}" stroke-width="2"/>'
        )
        parts.append(
            f'<text x="{WIDTH - MARGIN - 80}" y="{ly + 4}" '
            f'font-family="sans-serif" font-size="11">{label}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
