"""Deterministic SVG rendering of spiral frames.

Output is byte-for-byte stable for fixed inputs: floats are formatted with
fixed precision and every element id derives from the event key, so a UI can
cross-highlight nodes against log rows.
"""

from __future__ import annotations

import hashlib
import math
from typing import Mapping

from .layouts import (
    REGION_BILLING,
    SpiralLayout,
    SpiralNode,
    color_for,
    day_angle,
    shape_for,
)

_XML_ESCAPES = {"&": "&amp;", "<": "&lt;", ">": "&gt;", '"': "&quot;", "'": "&apos;"}

REGION_FILL = {REGION_BILLING: "#d9d9d9", "radial_cluster": "#f4cccc"}


def _esc(text: str) -> str:
    return "".join(_XML_ESCAPES.get(ch, ch) for ch in str(text))


def _fmt(value: float) -> str:
    out = f"{value:.2f}"
    return "0.00" if out == "-0.00" else out


def node_id(event_key: str) -> str:
    return "ev-" + hashlib.sha1(event_key.encode("utf-8")).hexdigest()[:16]


def _xy(cx: float, cy: float, radius: float, angle: float) -> tuple[float, float]:
    # angle 0 points up, growing clockwise
    return cx + radius * math.sin(angle), cy - radius * math.cos(angle)


def _arc_points(a0: float, a1: float) -> list[tuple[float, float]]:
    """Split [a0, a1] into arc segments no wider than pi."""
    steps = max(1, math.ceil((a1 - a0) / math.pi - 1e-9))
    return [(a0 + (a1 - a0) * i / steps, a0 + (a1 - a0) * (i + 1) / steps) for i in range(steps)]


def _sector_path(cx: float, cy: float, ri: float, ro: float, a0: float, a1: float) -> str:
    if a1 - a0 >= 2.0 * math.pi:
        a1 = a0 + 2.0 * math.pi - 1e-6
    x0, y0 = _xy(cx, cy, ri, a0)
    parts = [f"M {_fmt(x0)} {_fmt(y0)}"]
    xo, yo = _xy(cx, cy, ro, a0)
    parts.append(f"L {_fmt(xo)} {_fmt(yo)}")
    for _, seg_end in _arc_points(a0, a1):
        x, y = _xy(cx, cy, ro, seg_end)
        parts.append(f"A {_fmt(ro)} {_fmt(ro)} 0 0 1 {_fmt(x)} {_fmt(y)}")
    xi, yi = _xy(cx, cy, ri, a1)
    parts.append(f"L {_fmt(xi)} {_fmt(yi)}")
    for seg_end, _ in reversed(_arc_points(a0, a1)):
        x, y = _xy(cx, cy, ri, seg_end)
        parts.append(f"A {_fmt(ri)} {_fmt(ri)} 0 0 0 {_fmt(x)} {_fmt(y)}")
    parts.append("Z")
    return " ".join(parts)


def _shape_element(node: SpiralNode, cx: float, cy: float, size: float = 4.5) -> str:
    x, y = _xy(cx, cy, node.radius, node.angle)
    nid = node_id(node.event.key)
    color = color_for(node.color_key)
    shape = shape_for(node.shape_key)
    common = f'id="{nid}" data-key="{_esc(node.event.key)}" fill="{color}" stroke="#333" stroke-width="0.6"'
    s = size
    if shape == "square":
        return (
            f'<rect {common} x="{_fmt(x - s)}" y="{_fmt(y - s)}"'
            f' width="{_fmt(2 * s)}" height="{_fmt(2 * s)}"/>'
        )
    if shape == "triangle":
        pts = f"{_fmt(x)},{_fmt(y - s)} {_fmt(x - s)},{_fmt(y + s)} {_fmt(x + s)},{_fmt(y + s)}"
        return f'<polygon {common} points="{pts}"/>'
    if shape == "diamond":
        pts = f"{_fmt(x)},{_fmt(y - s)} {_fmt(x + s)},{_fmt(y)} {_fmt(x)},{_fmt(y + s)} {_fmt(x - s)},{_fmt(y)}"
        return f'<polygon {common} points="{pts}"/>'
    if shape == "cross":
        d = (
            f"M {_fmt(x - s)} {_fmt(y - s)} L {_fmt(x + s)} {_fmt(y + s)}"
            f" M {_fmt(x - s)} {_fmt(y + s)} L {_fmt(x + s)} {_fmt(y - s)}"
        )
        return f'<path {common} d="{d}" stroke-width="2"/>'
    return f'<circle {common} cx="{_fmt(x)}" cy="{_fmt(y)}" r="{_fmt(s)}"/>'


def _spiral_group(layout: SpiralLayout, cx: float, cy: float) -> list[str]:
    outer = layout.r0 + layout.dr * len(layout.branches)
    parts = ['<g class="spiral">']

    for region in layout.regions:
        fill = REGION_FILL.get(region.kind, "#eeeeee")
        path = _sector_path(cx, cy, layout.r0 * 0.4, outer, region.start_angle, region.end_angle)
        parts.append(
            f'<path class="region region-{region.kind}" d="{path}" fill="{fill}" fill-opacity="0.55"/>'
        )

    for angle in layout.ticks:
        x1, y1 = _xy(cx, cy, layout.r0 * 0.4, angle)
        x2, y2 = _xy(cx, cy, outer, angle)
        parts.append(
            f'<line class="tick" x1="{_fmt(x1)}" y1="{_fmt(y1)}" x2="{_fmt(x2)}" y2="{_fmt(y2)}"'
            ' stroke="#dddddd" stroke-width="0.5"/>'
        )

    for branch in layout.branches:
        parts.append(
            f'<circle class="branch-ring" cx="{_fmt(cx)}" cy="{_fmt(cy)}" r="{_fmt(branch.r_start)}"'
            ' fill="none" stroke="#bbbbbb" stroke-width="0.7"/>'
        )
        bx, by = _xy(cx, cy, branch.r_start + 1.0, 0.03)
        parts.append(
            f'<text class="branch-label" x="{_fmt(bx)}" y="{_fmt(by)}" font-size="7"'
            f' fill="#666666">{_esc(branch.label)}</text>'
        )

    for node in layout.nodes:
        parts.append(_shape_element(node, cx, cy))
    parts.append("</g>")
    return parts


def _day_ray(cx: float, cy: float, layout: SpiralLayout, day: int, color: str, dash: str, label: str) -> list[str]:
    angle = day_angle(day, layout.period_days)
    outer = layout.r0 + layout.dr * len(layout.branches)
    x1, y1 = _xy(cx, cy, layout.r0 * 0.4, angle)
    x2, y2 = _xy(cx, cy, outer + 6, angle)
    lx, ly = _xy(cx, cy, outer + 14, angle)
    return [
        f'<line class="day-ray" x1="{_fmt(x1)}" y1="{_fmt(y1)}" x2="{_fmt(x2)}" y2="{_fmt(y2)}"'
        f' stroke="{color}" stroke-width="1.2"{dash}/>',
        f'<text class="day-ray-label" x="{_fmt(lx)}" y="{_fmt(ly)}" font-size="8" text-anchor="middle"'
        f' fill="{color}">{_esc(label)}</text>',
    ]


def render_frame(
    client_id: str,
    spiral: SpiralLayout,
    annotations: Mapping[str, str] | None = None,
    *,
    billing_day: int | None = None,
    due_day: int | None = None,
    size: int = 560,
) -> str:
    """Self-contained SVG frame for one client.

    Fixed inputs produce identical bytes; every event node carries a stable
    id plus a data-key attribute with the raw event key.
    """
    annotations = dict(annotations or {})
    cx = cy = size / 2.0
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}"'
        f' viewBox="0 0 {size} {size}" data-client="{_esc(client_id)}">',
        f'<rect width="{size}" height="{size}" fill="#ffffff"/>',
        f'<title>client {_esc(client_id)}</title>',
        f'<text x="12" y="20" font-size="13" font-weight="bold" fill="#222222">'
        f"client {_esc(client_id)}</text>",
    ]
    line_y = 36
    for key in sorted(annotations):
        parts.append(
            f'<text x="12" y="{line_y}" font-size="9" fill="#444444">'
            f"{_esc(key)}: {_esc(annotations[key])}</text>"
        )
        line_y += 12
    parts.extend(_spiral_group(spiral, cx, cy))
    if billing_day is not None:
        parts.extend(_day_ray(cx, cy, spiral, billing_day, "#555555", "", f"bill {billing_day}"))
    if due_day is not None:
        parts.extend(_day_ray(cx, cy, spiral, due_day, "#888888", ' stroke-dasharray="4 3"', f"due {due_day}"))
    parts.append("</svg>")
    return "\n".join(parts)
