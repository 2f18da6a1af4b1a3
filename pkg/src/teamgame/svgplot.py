"""Minimal standalone SVG polyline plots.

The CSV files are the ground truth for every experiment; these plots are
derived artifacts for quick visual inspection, so a tiny hand-rolled
writer is preferred over a plotting dependency.
"""

from __future__ import annotations

from typing import List, Optional, Sequence, Tuple

import numpy as np

Series = Tuple[np.ndarray, np.ndarray, str, float]  # xs, ys, css colour, stroke width


def _fmt(value: float) -> str:
    return format(value, ".6g")


def render_lines(
    series: Sequence[Series],
    path,
    title: str = "",
    width: int = 720,
    height: int = 440,
) -> None:
    """Write polylines with a data-fitted viewport, axes box and range labels."""
    margin = 52.0
    xs_all = np.concatenate([s[0] for s in series])
    ys_all = np.concatenate([s[1] for s in series])
    x0, x1 = float(np.min(xs_all)), float(np.max(xs_all))
    y0, y1 = float(np.min(ys_all)), float(np.max(ys_all))
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0
    pad = 0.04 * (y1 - y0)
    y0, y1 = y0 - pad, y1 + pad
    sx = (width - 2 * margin) / (x1 - x0)
    sy = (height - 2 * margin) / (y1 - y0)

    def to_px(xs, ys):
        px = margin + (xs - x0) * sx
        py = height - margin - (ys - y0) * sy
        return px, py

    parts: List[str] = []
    parts.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">'
    )
    parts.append(f'<rect width="{width}" height="{height}" fill="white"/>')
    parts.append(
        f'<rect x="{margin}" y="{margin}" width="{width - 2 * margin}" '
        f'height="{height - 2 * margin}" fill="none" stroke="black" stroke-width="1"/>'
    )
    if title:
        parts.append(
            f'<text x="{width / 2}" y="{margin / 2 + 6}" text-anchor="middle" '
            f'font-family="sans-serif" font-size="15">{title}</text>'
        )
    labels = [
        (margin, height - margin + 18, "start", _fmt(x0)),
        (width - margin, height - margin + 18, "end", _fmt(x1)),
        (margin - 6, height - margin, "end", _fmt(y0)),
        (margin - 6, margin + 4, "end", _fmt(y1)),
    ]
    for lx, ly, anchor, text in labels:
        parts.append(
            f'<text x="{lx}" y="{ly}" text-anchor="{anchor}" '
            f'font-family="sans-serif" font-size="12">{text}</text>'
        )
    for xs, ys, colour, stroke in series:
        px, py = to_px(np.asarray(xs, dtype=float), np.asarray(ys, dtype=float))
        pts = " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in zip(px, py))
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{colour}" '
            f'stroke-width="{stroke}"/>'
        )
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(parts) + "\n")


def trajectory_plot(times, component_rows, diagnostics: Optional[dict], path, title="") -> None:
    """Components as thin grey polylines plus highlighted diagnostics."""
    series: List[Series] = []
    for row in component_rows:
        series.append((np.asarray(times), np.asarray(row), "#999999", 0.8))
    palette = {"mca": "#cc0000", "mass": "#0055cc", "l2": "#118833"}
    for name, values in (diagnostics or {}).items():
        series.append((np.asarray(times), np.asarray(values), palette.get(name, "#000000"), 1.8))
    render_lines(series, path, title=title)
