"""CSV and SVG emission for payoff clouds.

Both writers are deterministic: the same cloud always produces byte-identical
files. Floats go to CSV with 17 significant digits, enough to round-trip
float64 exactly.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

CSV_HEADER = "index,q1,q2,q3,q4,sx,sy,degenerate,method"

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_cloud_csv(path: str | Path, cloud) -> Path:
    """One row per opponent: index, strategy components, payoffs, flags."""
    path = Path(path)
    lines = [CSV_HEADER]
    for i in range(len(cloud)):
        q = cloud.opponents[i]
        lines.append(
            ",".join(
                [
                    str(i),
                    _fmt(q[0]),
                    _fmt(q[1]),
                    _fmt(q[2]),
                    _fmt(q[3]),
                    _fmt(cloud.sx[i]),
                    _fmt(cloud.sy[i]),
                    "true" if cloud.degenerate[i] else "false",
                    str(cloud.method[i]),
                ]
            )
        )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def read_cloud_csv(path: str | Path):
    """Parse a cloud CSV back into (opponents, sx, sy, degenerate, method)."""
    lines = Path(path).read_text(encoding="utf-8").strip().split("\n")
    if lines[0] != CSV_HEADER:
        raise ValueError(f"unexpected CSV header: {lines[0]!r}")
    rows = [line.split(",") for line in lines[1:]]
    opponents = np.array([[float(r[i]) for i in range(1, 5)] for r in rows])
    sx = np.array([float(r[5]) for r in rows])
    sy = np.array([float(r[6]) for r in rows])
    degenerate = np.array([r[7] == "true" for r in rows])
    method = np.array([r[8] for r in rows], dtype="U13")
    return opponents, sx, sy, degenerate, method


def write_scatter_svg(
    path: str | Path,
    clouds: list[tuple[str, np.ndarray, np.ndarray]],
    *,
    title: str = "",
    width: int = 640,
    height: int = 640,
) -> Path:
    """Scatter plot of (s_X, s_Y) pairs, s_X horizontal and s_Y vertical.

    Hand-rolled SVG so output stays deterministic and dependency-free.
    """
    path = Path(path)
    all_x = np.concatenate([c[1] for c in clouds])
    all_y = np.concatenate([c[2] for c in clouds])
    x_lo, x_hi = float(all_x.min()), float(all_x.max())
    y_lo, y_hi = float(all_y.min()), float(all_y.max())
    x_pad = 0.05 * (x_hi - x_lo) or 0.5
    y_pad = 0.05 * (y_hi - y_lo) or 0.5
    x_lo, x_hi = x_lo - x_pad, x_hi + x_pad
    y_lo, y_hi = y_lo - y_pad, y_hi + y_pad
    margin = 60
    plot_w = width - 2 * margin
    plot_h = height - 2 * margin

    def sx_px(x: float) -> float:
        return margin + (x - x_lo) / (x_hi - x_lo) * plot_w

    def sy_px(y: float) -> float:
        return height - margin - (y - y_lo) / (y_hi - y_lo) * plot_h

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{margin}" y="{margin}" width="{plot_w}" height="{plot_h}" '
        'fill="none" stroke="black" stroke-width="1"/>',
    ]
    for k in range(5):
        fx = x_lo + (x_hi - x_lo) * k / 4
        fy = y_lo + (y_hi - y_lo) * k / 4
        px = sx_px(fx)
        py = sy_px(fy)
        parts.append(
            f'<line x1="{px:.2f}" y1="{height - margin}" x2="{px:.2f}" '
            f'y2="{height - margin + 5}" stroke="black"/>'
        )
        parts.append(
            f'<text x="{px:.2f}" y="{height - margin + 18}" font-size="11" '
            f'text-anchor="middle">{fx:.2f}</text>'
        )
        parts.append(
            f'<line x1="{margin - 5}" y1="{py:.2f}" x2="{margin}" y2="{py:.2f}" '
            'stroke="black"/>'
        )
        parts.append(
            f'<text x="{margin - 8}" y="{py + 4:.2f}" font-size="11" '
            f'text-anchor="end">{fy:.2f}</text>'
        )
    parts.append(
        f'<text x="{width / 2:.0f}" y="{height - 15}" font-size="14" '
        'text-anchor="middle">s_X</text>'
    )
    parts.append(
        f'<text x="18" y="{height / 2:.0f}" font-size="14" text-anchor="middle" '
        f'transform="rotate(-90 18 {height / 2:.0f})">s_Y</text>'
    )
    if title:
        parts.append(
            f'<text x="{width / 2:.0f}" y="25" font-size="15" '
            f'text-anchor="middle">{title}</text>'
        )
    for idx, (label, xs, ys) in enumerate(clouds):
        color = _COLORS[idx % len(_COLORS)]
        parts.append(f'<g fill="{color}" fill-opacity="0.5">')
        for x, y in zip(xs, ys):
            parts.append(f'<circle cx="{sx_px(x):.2f}" cy="{sy_px(y):.2f}" r="1.5"/>')
        parts.append("</g>")
        parts.append(
            f'<text x="{width - margin - 5}" y="{margin + 16 + 14 * idx}" font-size="12" '
            f'text-anchor="end" fill="{color}">{label}</text>'
        )
    parts.append("</svg>")
    path.write_text("\n".join(parts) + "\n", encoding="utf-8")
    return path
