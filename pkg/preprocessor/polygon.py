"""
Newton polygons, their primitive inner edge normals and tropisms.

Everything here works on exponent vectors only, with exact integer
arithmetic, so the outcome of this stage does not depend on the
coefficients.
"""

import logging
from dataclasses import dataclass
from functools import cmp_to_key
from math import gcd
from typing import Dict, Iterable, Iterator, List, Sequence, Tuple

from .errors import NotPrimitiveError
from .polynomial import Direction, DirectionLike, ExponentVector, SparsePoly, initial_form

logger = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class Tropism(Direction):
    """A primitive integer direction: gcd(|u|, |v|) = 1."""

    def __post_init__(self):
        super().__post_init__()
        if gcd(self.u, self.v) != 1:
            raise NotPrimitiveError(f"direction ({self.u}, {self.v}) is not primitive")

    @classmethod
    def normalized(cls, u: int, v: int) -> "Tropism":
        """Divide out the gcd of a nonzero integer vector."""
        g = gcd(u, v)
        if g == 0:
            raise ValueError("direction (0, 0) is not allowed")
        return cls(u // g, v // g)

    def __str__(self) -> str:
        return f"({self.u},{self.v})"


def _half(d: Tuple[int, int]) -> int:
    # 0 for angles in [0, pi), 1 for [pi, 2*pi)
    u, v = d
    return 0 if v > 0 or (v == 0 and u > 0) else 1


def compare_angle(a: Tuple[int, int], b: Tuple[int, int]) -> int:
    """Order directions by angle in [0, 2*pi) measured from (1, 0), exactly."""
    au, av = a
    bu, bv = b
    ha, hb = _half(a), _half(b)
    if ha != hb:
        return -1 if ha < hb else 1
    cross = au * bv - av * bu
    if cross > 0:
        return -1
    if cross < 0:
        return 1
    return 0


angle_key = cmp_to_key(compare_angle)


def _cross(o: Tuple[int, int], a: Tuple[int, int], b: Tuple[int, int]) -> int:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


@dataclass(frozen=True)
class NewtonPolygon:
    """Vertices of a convex lattice polygon in counterclockwise order."""

    vertices: Tuple[ExponentVector, ...]

    @property
    def is_point(self) -> bool:
        return len(self.vertices) == 1

    @property
    def is_segment(self) -> bool:
        return len(self.vertices) == 2

    def twice_area(self) -> int:
        n = len(self.vertices)
        if n < 3:
            return 0
        return sum(
            self.vertices[k].i * self.vertices[(k + 1) % n].j - self.vertices[(k + 1) % n].i * self.vertices[k].j
            for k in range(n)
        )

    def edges(self) -> List[Tuple[ExponentVector, ExponentVector]]:
        """Directed edges; a segment has two opposite edges, a point none."""
        n = len(self.vertices)
        if n == 1:
            return []
        if n == 2:
            a, b = self.vertices
            return [(a, b), (b, a)]
        return [(self.vertices[k], self.vertices[(k + 1) % n]) for k in range(n)]

    def contains(self, point: Tuple[int, int]) -> bool:
        """Whether a lattice point lies inside or on the polygon."""
        if self.is_point:
            return tuple(point) == tuple(self.vertices[0])
        if self.is_segment:
            a, b = self.vertices
            if _cross(a, b, point) != 0:
                return False
            return min(a.i, b.i) <= point[0] <= max(a.i, b.i) and min(a.j, b.j) <= point[1] <= max(a.j, b.j)
        return all(_cross(a, b, point) >= 0 for a, b in self.edges())


def convex_hull(support: Iterable[Tuple[int, int]]) -> NewtonPolygon:
    """
    Exact convex hull of a set of lattice points (monotone chain).

    Collinear boundary points are dropped, so only extreme points remain.
    Degenerate inputs give a segment or a single point.
    """
    points = sorted({ExponentVector(int(p[0]), int(p[1])) for p in support})
    if not points:
        raise ValueError("convex hull of an empty support")
    if len(points) == 1:
        return NewtonPolygon(tuple(points))

    lower: List[ExponentVector] = []
    for p in points:
        while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: List[ExponentVector] = []
    for p in reversed(points):
        while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return NewtonPolygon(tuple(lower[:-1] + upper[:-1]))


def newton_polygon(p: SparsePoly) -> NewtonPolygon:
    return convex_hull(p.support)


def edge_normal(start: Tuple[int, int], end: Tuple[int, int]) -> Tropism:
    """Primitive inner normal of a counterclockwise edge."""
    return Tropism.normalized(-(end[1] - start[1]), end[0] - start[0])


@dataclass(frozen=True)
class Tropicalization:
    """Primitive inner edge normals of a Newton polygon, sorted by angle."""

    normals: Tuple[Tropism, ...]

    def __iter__(self) -> Iterator[Tropism]:
        return iter(self.normals)

    def __len__(self) -> int:
        return len(self.normals)

    def __contains__(self, d) -> bool:
        return tuple(d) in {n.pair() for n in self.normals}


def inner_normals(polygon: NewtonPolygon) -> Tropicalization:
    """One primitive inner normal per edge; empty for a point polygon."""
    normals = {edge_normal(a, b) for a, b in polygon.edges()}
    return Tropicalization(tuple(sorted(normals, key=angle_key)))


def tropicalization(p: SparsePoly) -> Tropicalization:
    polygon = newton_polygon(p)
    normals = inner_normals(polygon)
    logger.debug("%d terms, %d vertices, %d normals", len(p), len(polygon.vertices), len(normals))
    return normals


def tropism_intersection(tf: Tropicalization, tg: Tropicalization) -> List[Tropism]:
    """Common normals of two angle-sorted lists, by a linear merge."""
    a: Sequence[Tropism] = tf.normals
    b: Sequence[Tropism] = tg.normals
    common: List[Tropism] = []
    i = j = 0
    while i < len(a) and j < len(b):
        order = compare_angle(a[i], b[j])
        if order == 0:
            common.append(a[i])
            i += 1
            j += 1
        elif order < 0:
            i += 1
        else:
            j += 1
    return common


def tentacle_degree(p: SparsePoly, t: DirectionLike) -> int:
    """
    Number of roots in C* of the initial form of p along t, after the
    unimodular transform makes it univariate.

    That count is the lattice length of the edge of the Newton polygon
    picked out by t; a vertex gives 0.
    """
    edge = initial_form(p, t).support
    first, last = edge[0], edge[-1]
    return gcd(last.i - first.i, last.j - first.j)


def tentacle_degrees(p: SparsePoly) -> Dict[Tropism, int]:
    """Degree of every tentacle of p, keyed by its tropism."""
    return {t: tentacle_degree(p, t) for t in tropicalization(p)}
