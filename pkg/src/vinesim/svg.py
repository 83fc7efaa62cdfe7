"""Minimal SVG emitter for deployment geometry.

Documents use millimeter user units with the y axis flipped to the usual
math convention (y up).  The locked region is drawn in orange and the
unlocked window in blue, mirroring the hook-and-loop color scheme used
throughout the plots.  Coordinates are written with nine decimals so the
file agrees with the in-memory snapshot well below a micrometer.
"""
from __future__ import annotations

import numpy as np

LOCKED_COLOR = "#ff7f0e"
UNLOCKED_COLOR = "#1f77b4"
TARGET_COLOR = "#999999"
MARGIN_MM = 25.0


def _fmt(value: float) -> str:
    return f"{value:.9f}"


def _polyline(points: np.ndarray, color: str, width: float, dashed=False) -> str:
    coords = " ".join(f"{_fmt(x)},{_fmt(-y)}" for x, y in points)
    dash = ' stroke-dasharray="8 6"' if dashed else ""
    return (
        f'<polyline points="{coords}" fill="none" stroke="{color}" '
        f'stroke-width="{_fmt(width)}" stroke-linecap="round" '
        f'stroke-linejoin="round"{dash}/>'
    )


def render_deployment_svg(
    centerline,
    lock_boundary_index: int,
    beam_radius: float = 54.0,
    target=None,
) -> str:
    """Render a deployment snapshot as an SVG document string."""
    points = np.asarray(centerline, dtype=float)
    stacks = [points] if target is None else [points, np.asarray(target, dtype=float)]
    everything = np.vstack(stacks)
    x_min, y_min = everything.min(axis=0) - MARGIN_MM
    x_max, y_max = everything.max(axis=0) + MARGIN_MM
    width = x_max - x_min
    height = y_max - y_min
    # The document y axis grows downward, so the viewBox covers [-y_max, -y_min].
    view = f"{_fmt(x_min)} {_fmt(-y_max)} {_fmt(width)} {_fmt(height)}"
    body_width = 2.0 * beam_radius

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="{view}" '
        f'width="{_fmt(width)}mm" height="{_fmt(height)}mm">',
    ]
    if target is not None:
        parts.append(_polyline(np.asarray(target, float), TARGET_COLOR, 2.0, dashed=True))
    boundary = int(np.clip(lock_boundary_index, 0, len(points)))
    if boundary >= 2:
        parts.append(_polyline(points[:boundary], LOCKED_COLOR, body_width))
    if boundary < len(points):
        start = max(boundary - 1, 0)
        parts.append(_polyline(points[start:], UNLOCKED_COLOR, body_width))
    base_x, base_y = points[0]
    parts.append(
        f'<circle cx="{_fmt(base_x)}" cy="{_fmt(-base_y)}" r="{_fmt(beam_radius / 3)}" '
        'fill="#333333"/>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def parse_polyline_points(svg_text: str) -> list[np.ndarray]:
    """Read back the polylines of a rendered document, y flipped to math axes."""
    polylines = []
    for chunk in svg_text.split("<polyline points=\"")[1:]:
        raw = chunk.split('"', 1)[0]
        pairs = [pair.split(",") for pair in raw.split()]
        pts = np.array([[float(x), -float(y)] for x, y in pairs])
        polylines.append(pts)
    return polylines


def write_deployment_svg(path, centerline, lock_boundary_index, beam_radius=54.0, target=None) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(
            render_deployment_svg(
                centerline, lock_boundary_index, beam_radius, target
            )
        )
