"""Minimal SVG scatter writer (no plotting dependency)."""

from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

# viridis-like ramp, sampled at 5 stops
RAMP = np.array([
    [68, 1, 84],
    [59, 82, 139],
    [33, 145, 140],
    [94, 201, 98],
    [253, 231, 37],
], dtype=float)


def ramp_color(t: float) -> str:
    t = min(max(float(t), 0.0), 1.0) * (len(RAMP) - 1)
    lo = min(int(t), len(RAMP) - 2)
    rgb = RAMP[lo] + (t - lo) * (RAMP[lo + 1] - RAMP[lo])
    return "#%02x%02x%02x" % tuple(int(round(c)) for c in rgb)


def scatter_svg(points, color=None, title="", labels=None, edges=None,
                width=480, height=480, margin=48, radius=2.5) -> str:
    """SVG document with one ``<circle class="pt">`` per point.

    Only the first two columns are drawn; a single column is drawn on y = 0.
    ``edges`` is an optional iterable of ``(a, b)`` index pairs drawn as lines.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    xy = pts[:, :2] if pts.shape[1] >= 2 else np.column_stack([pts[:, 0], np.zeros(len(pts))])

    lo, hi = xy.min(axis=0), xy.max(axis=0)
    span = np.where(hi > lo, hi - lo, 1.0)
    inner_w, inner_h = width - 2 * margin, height - 2 * margin
    sx = margin + (xy[:, 0] - lo[0]) / span[0] * inner_w
    sy = height - margin - (xy[:, 1] - lo[1]) / span[1] * inner_h

    if color is not None:
        c = np.asarray(color, dtype=float)
        cspan = c.max() - c.min()
        fills = [ramp_color((v - c.min()) / cspan if cspan > 0 else 0.5) for v in c]
    else:
        fills = ["#3b528b"] * len(xy)

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>',
        f'<rect x="{margin}" y="{margin}" width="{inner_w}" height="{inner_h}" fill="none" stroke="#888888"/>',
        f'<text x="{width / 2:.1f}" y="{margin / 2:.1f}" text-anchor="middle" font-size="14">{escape(title)}</text>',
        f'<text x="{margin}" y="{height - margin / 2:.1f}" font-size="10">{lo[0]:.3g}</text>',
        f'<text x="{width - margin}" y="{height - margin / 2:.1f}" text-anchor="end" font-size="10">{hi[0]:.3g}</text>',
        f'<text x="{margin / 2:.1f}" y="{height - margin}" font-size="10">{lo[1]:.3g}</text>',
        f'<text x="{margin / 2:.1f}" y="{margin}" font-size="10">{hi[1]:.3g}</text>',
    ]
    if edges is not None:
        out.append('<g stroke="#bbbbbb" stroke-width="0.6">')
        for a, b in edges:
            out.append(f'<line x1="{sx[a]:.2f}" y1="{sy[a]:.2f}" x2="{sx[b]:.2f}" y2="{sy[b]:.2f}"/>')
        out.append("</g>")
    out.append("<g>")
    for k in range(len(xy)):
        out.append(f'<circle class="pt" cx="{sx[k]:.2f}" cy="{sy[k]:.2f}" r="{radius}" fill="{fills[k]}"/>')
    out.append("</g>")
    if labels is not None:
        out.append('<g font-size="11">')
        for k, name in enumerate(labels):
            out.append(f'<text x="{sx[k] + 4:.2f}" y="{sy[k] - 4:.2f}">{escape(str(name))}</text>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_scatter_svg(path, points, **kwargs) -> None:
    with open(path, "w") as fh:
        fh.write(scatter_svg(points, **kwargs))
