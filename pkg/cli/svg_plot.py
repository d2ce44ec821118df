"""
Static SVG renderings: Newton polygons, their normal fans and the amoeba
of a linear polynomial.

Every drawing is an 800x800 viewport; lattice coordinates are scaled to fit
and y points up.
"""

import math
import xml.etree.ElementTree as ET
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from preprocessor import SparsePoly, Tropicalization, Tropism, newton_polygon, tropicalization, tropism_intersection
from preprocessor.polygon import NewtonPolygon, convex_hull, inner_normals

SIZE = 800
MARGIN = 40
COLOURS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")
COMMON = "#ff7f0e"

Box = Tuple[float, float, float, float]


def svg_root(width: int = SIZE, height: int = SIZE) -> ET.Element:
    return ET.Element(
        "svg",
        xmlns="http://www.w3.org/2000/svg",
        version="1.1",
        width=f"{width}px",
        height=f"{height}px",
        viewBox=f"0 0 {width} {height}",
    )


def svg_write(root: ET.Element, path) -> None:
    ET.ElementTree(root).write(path, encoding="utf-8", xml_declaration=True)


class _Frame:
    """Maps lattice coordinates into a pixel box, keeping the aspect ratio."""

    def __init__(self, box: Box, lo: Tuple[float, float], hi: Tuple[float, float]):
        left, top, width, height = box
        span = max(hi[0] - lo[0], hi[1] - lo[1], 1.0)
        self.scale = (min(width, height) - 2 * MARGIN) / span
        self.cx = left + width / 2
        self.cy = top + height / 2
        self.mid = ((lo[0] + hi[0]) / 2, (lo[1] + hi[1]) / 2)

    def __call__(self, x: float, y: float) -> Tuple[float, float]:
        return (
            round(self.cx + (x - self.mid[0]) * self.scale, 2),
            round(self.cy - (y - self.mid[1]) * self.scale, 2),
        )


def _points_attr(points: Iterable[Tuple[float, float]]) -> str:
    return " ".join(f"{x},{y}" for x, y in points)


def draw_polygon(parent: ET.Element, p: SparsePoly, frame: _Frame, colour: str) -> NewtonPolygon:
    """Lattice points of the support, the hull and its vertices."""
    group = ET.SubElement(parent, "g", {"class": "polygon"})
    polygon = newton_polygon(p)
    for e in p.support:
        x, y = frame(e.i, e.j)
        ET.SubElement(group, "circle", {"class": "support", "cx": str(x), "cy": str(y), "r": "3", "fill": "#888"})
    pixels = [frame(v.i, v.j) for v in polygon.vertices]
    if len(pixels) >= 3:
        ET.SubElement(group, "polygon", {
            "class": "hull", "points": _points_attr(pixels),
            "fill": colour, "fill-opacity": "0.15", "stroke": colour, "stroke-width": "2",
        })
    elif len(pixels) == 2:
        ET.SubElement(group, "polyline", {
            "class": "hull", "points": _points_attr(pixels), "fill": "none", "stroke": colour, "stroke-width": "2",
        })
    for x, y in pixels:
        ET.SubElement(group, "circle", {"class": "vertex", "cx": str(x), "cy": str(y), "r": "5", "fill": colour})
    return polygon


def draw_fan(
    parent: ET.Element,
    normals: Sequence[Tropism],
    box: Box,
    colour: str,
    common: Sequence[Tropism] = (),
) -> None:
    """Normal rays from the centre of ``box``; rays in ``common`` are highlighted."""
    left, top, width, height = box
    cx, cy = left + width / 2, top + height / 2
    length = min(width, height) / 2 - MARGIN
    group = ET.SubElement(parent, "g", {"class": "fan"})
    common_pairs = {t.pair() for t in common}
    for t in normals:
        norm = math.hypot(t.u, t.v)
        x2 = round(cx + length * t.u / norm, 2)
        y2 = round(cy - length * t.v / norm, 2)
        is_common = t.pair() in common_pairs
        ET.SubElement(group, "line", {
            "class": "common-ray" if is_common else "ray",
            "x1": str(cx), "y1": str(cy), "x2": str(x2), "y2": str(y2),
            "stroke": COMMON if is_common else colour, "stroke-width": "3" if is_common else "1.5",
        })
        label = ET.SubElement(group, "text", {"x": str(x2), "y": str(y2), "font-size": "12"})
        label.text = str(t)


def plot_polynomials(polys: Sequence[SparsePoly], what: str = "both") -> ET.Element:
    """
    Newton polygons and/or normal fans of one or more polynomials.

    With several polynomials the rays they all share are drawn once, as
    ``common-ray`` lines.
    """
    if what not in ("polygon", "fan", "both"):
        raise ValueError(f"unknown plot kind {what!r}")
    root = svg_root()
    if what == "both":
        polygon_box: Optional[Box] = (0, 0, SIZE / 2, SIZE)
        fan_box: Optional[Box] = (SIZE / 2, 0, SIZE / 2, SIZE)
    else:
        polygon_box = (0, 0, SIZE, SIZE) if what == "polygon" else None
        fan_box = (0, 0, SIZE, SIZE) if what == "fan" else None

    if polygon_box is not None:
        support = [e for p in polys for e in p.support]
        lo = (min(e.i for e in support), min(e.j for e in support))
        hi = (max(e.i for e in support), max(e.j for e in support))
        frame = _Frame(polygon_box, lo, hi)
        for k, p in enumerate(polys):
            draw_polygon(root, p, frame, COLOURS[k % len(COLOURS)])

    if fan_box is not None:
        fans = [tropicalization(p) for p in polys]
        common: List[Tropism] = []
        if len(fans) > 1:
            common = list(fans[0].normals)
            for other in fans[1:]:
                common = tropism_intersection(Tropicalization(tuple(common)), other)
        drawn = set()
        for k, fan in enumerate(fans):
            fresh = [t for t in fan if t.pair() not in drawn]
            drawn.update(t.pair() for t in fresh)
            draw_fan(root, fresh, fan_box, COLOURS[k % len(COLOURS)], common)
    return root


# ---------------------------------------------------------------------------
# Amoeba of a line
# ---------------------------------------------------------------------------

def amoeba_points(
    a: complex = 0.5,
    b: complex = 0.2,
    c: complex = -1.0,
    n_radius: int = 80,
    n_angle: int = 48,
    max_exponent: float = 6.0,
) -> np.ndarray:
    """
    Points (ln|x|, ln|y|) on the amoeba of a*x + b*y + c = 0.

    x = r e^(i theta) is sampled in polar coordinates with theta in [0, pi)
    and r over a symmetric range that leaves out 0; y is solved for.  The
    same is done with the roles of x and y swapped, so that every tentacle
    gets samples.  Points with a zero coordinate are dropped.
    """
    magnitudes = np.logspace(-max_exponent, max_exponent, n_radius)
    radii = np.concatenate([-magnitudes[::-1], magnitudes])
    angles = np.linspace(0.0, np.pi, n_angle, endpoint=False)
    z = (radii[:, None] * np.exp(1j * angles[None, :])).ravel()

    x_side = np.stack([z, -(a * z + c) / b], axis=1)
    y_side = np.stack([-(b * z + c) / a, z], axis=1)
    pairs = np.concatenate([x_side, y_side])
    finite = np.all(np.abs(pairs) > 0, axis=1)
    return np.log(np.abs(pairs[finite]))


def amoeba_svg(points: np.ndarray, window: float = 10.0) -> ET.Element:
    """
    Amoeba samples inside [-window, window]^2 with the tentacle
    directions of the unit triangle drawn as dashed rays.
    """
    root = svg_root()
    frame = _Frame((0, 0, SIZE, SIZE), (-window, -window), (window, window))
    axes = ET.SubElement(root, "g", {"class": "axes"})
    for start, end in (((-window, 0), (window, 0)), ((0, -window), (0, window))):
        (x1, y1), (x2, y2) = frame(*start), frame(*end)
        ET.SubElement(axes, "line", {"x1": str(x1), "y1": str(y1), "x2": str(x2), "y2": str(y2), "stroke": "#ccc"})

    group = ET.SubElement(root, "g", {"class": "amoeba"})
    inside = points[np.all(np.abs(points) <= window, axis=1)]
    for u, v in inside:
        x, y = frame(float(u), float(v))
        ET.SubElement(group, "circle", {"class": "sample", "cx": str(x), "cy": str(y), "r": "1", "fill": COLOURS[0]})

    rays = ET.SubElement(root, "g", {"class": "tentacles"})
    for t in tentacle_directions():
        norm = math.hypot(*t)
        (x1, y1), (x2, y2) = frame(0.0, 0.0), frame(window * t[0] / norm, window * t[1] / norm)
        ET.SubElement(rays, "line", {
            "class": "tentacle", "x1": str(x1), "y1": str(y1), "x2": str(x2), "y2": str(y2),
            "stroke": COMMON, "stroke-dasharray": "6,4",
        })
    return root


def tentacle_directions() -> List[Tuple[int, int]]:
    """Tentacles of a generic line run opposite to the inner normals of its Newton triangle."""
    triangle = convex_hull([(0, 0), (1, 0), (0, 1)])
    return [(-t.u, -t.v) for t in inner_normals(triangle)]
