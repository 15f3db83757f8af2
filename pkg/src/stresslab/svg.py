"""Deterministic SVG rendering of drawings.

Output is plain text with fixed float formatting so identical drawings give
byte-identical documents. Coordinates are mapped from the unit square with a
fixed margin; the y axis is flipped so larger y renders upward.
"""
from __future__ import annotations

from dataclasses import dataclass

from .graphs import Drawing


@dataclass(frozen=True)
class SvgStyle:
    node_radius: float = 0.012
    node_fill: str = "#2b2b2b"
    edge_width: float = 0.004
    edge_stroke: str = "#555555"
    margin: float = 0.05
    pixel_size: int = 600


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def render_svg(drawing: Drawing, style: SvgStyle | None = None) -> str:
    """Render one circle per node and one line per edge.

    The viewBox is the unit square expanded by the style margin on every
    side, independent of the drawing's own extent.
    """
    st = style or SvgStyle()
    span = 1.0 + 2.0 * st.margin
    view = f"{_fmt(-st.margin)} {_fmt(-st.margin)} {_fmt(span)} {_fmt(span)}"
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{st.pixel_size}" '
        f'height="{st.pixel_size}" viewBox="{view}">',
        f'<rect x="{_fmt(-st.margin)}" y="{_fmt(-st.margin)}" width="{_fmt(span)}" '
        f'height="{_fmt(span)}" fill="#ffffff"/>',
    ]
    pos = drawing.pos
    for u, v in drawing.graph.edges:
        x1, y1 = pos[u]
        x2, y2 = pos[v]
        lines.append(
            f'<line x1="{_fmt(x1)}" y1="{_fmt(1.0 - y1)}" '
            f'x2="{_fmt(x2)}" y2="{_fmt(1.0 - y2)}" '
            f'stroke="{st.edge_stroke}" stroke-width="{_fmt(st.edge_width)}"/>'
        )
    for x, y in pos:
        lines.append(
            f'<circle cx="{_fmt(x)}" cy="{_fmt(1.0 - y)}" r="{_fmt(st.node_radius)}" '
            f'fill="{st.node_fill}"/>'
        )
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
