"""Polygons, boundary coordinates and rational-angle analysis."""
from __future__ import annotations

import json
import logging
import math
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from pathlib import Path
from typing import Callable, Iterable, Iterator, Sequence

from .config import DEFAULT_BACKEND, EPSILON, MAX_DENOMINATOR
from .errors import DegeneratePolygon, IoFailure, MalformedInput
from .scalars import (
    EXACT,
    Backend,
    Number,
    Vec,
    angle_of,
    cross,
    dot,
    format_scalar,
    get_backend,
    parse_scalar,
    sub,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BoundaryPoint:
    """A point of the counterclockwise boundary.

    ``t`` is the exact affine parameter along the side, ``offset`` the length from
    the side's first vertex. Corners are offset 0 of their outgoing side.
    """

    side_index: int
    t: Number
    offset: Number
    arclength: Number
    point: Vec
    at_corner: bool = False

    @property
    def parameter(self) -> Number:
        """``side_index + t``: an exact, order-preserving coordinate on the boundary."""

        return self.side_index + self.t


@dataclass(frozen=True)
class Polygon:
    vertices: tuple[Vec, ...]
    backend: Backend = EXACT
    name: str = "polygon"

    def __post_init__(self) -> None:
        _validate(self)

    @property
    def size(self) -> int:
        return len(self.vertices)

    @cached_property
    def edges(self) -> tuple[Vec, ...]:
        vs = self.vertices
        return tuple(sub(vs[(i + 1) % len(vs)], vs[i]) for i in range(len(vs)))

    @cached_property
    def side_lengths(self) -> tuple[Number, ...]:
        return tuple(self.backend.sqrt(dot(e, e)) for e in self.edges)

    @cached_property
    def exact_lengths(self) -> bool:
        """True when every side length is rational.

        Otherwise offsets and arclengths on the irrational sides are floats even in the
        exact backend; the parameter coordinate ``side_index + t`` of an orbit footpoint
        stays exact, so exact round trips should go through it.
        """

        return self.backend.exact and all(isinstance(x, Fraction) for x in self.side_lengths)

    @cached_property
    def cumulative(self) -> tuple[Number, ...]:
        """Arclength of each corner, starting from vertex 0."""

        out: list[Number] = []
        total: Number = 0
        for length in self.side_lengths:
            out.append(total)
            total = total + length
        return tuple(out)

    @cached_property
    def perimeter(self) -> Number:
        return self.cumulative[-1] + self.side_lengths[-1]

    @cached_property
    def signed_area(self) -> Number:
        return _signed_area(self.vertices)

    @cached_property
    def corner_angles(self) -> tuple[float, ...]:
        """Interior angle A(p_i) in radians at each vertex."""

        angles = []
        for i in range(self.size):
            out_edge = self.edges[i]
            prev_edge = self.edges[i - 1]
            back = (-prev_edge[0], -prev_edge[1])
            theta = math.atan2(float(cross(out_edge, back)), float(dot(out_edge, back)))
            angles.append(theta if theta > 0 else theta + 2 * math.pi)
        return tuple(angles)

    @cached_property
    def side_angles(self) -> tuple[float, ...]:
        return tuple(angle_of(e) for e in self.edges)

    def point_on_side(self, side_index: int, t: Number) -> BoundaryPoint:
        """Boundary point at affine parameter ``t`` of side ``side_index``."""

        side_index %= self.size
        bk = self.backend
        length = self.side_lengths[side_index]
        if bk.sign(t * length) <= 0:
            t = bk.coerce(0)
        elif not bk.lt(t * length, length):
            side_index = (side_index + 1) % self.size
            t = bk.coerce(0)
            length = self.side_lengths[side_index]
        a = self.vertices[side_index]
        e = self.edges[side_index]
        offset = t * length
        at_corner = t == 0
        point = a if at_corner else (a[0] + t * e[0], a[1] + t * e[1])
        return BoundaryPoint(
            side_index=side_index,
            t=t,
            offset=offset,
            arclength=self.cumulative[side_index] + offset,
            point=point,
            at_corner=at_corner,
        )

    def point_at_offset(self, side_index: int, offset: Number) -> BoundaryPoint:
        side_index %= self.size
        return self.point_on_side(side_index, self.backend.coerce(offset) / self.side_lengths[side_index])

    def locate(self, side_index: int, point: Vec) -> BoundaryPoint:
        """Boundary point for a planar point known to lie on ``side_index``."""

        a = self.vertices[side_index]
        e = self.edges[side_index]
        return self.point_on_side(side_index, dot(sub(point, a), e) / dot(e, e))

    def corner(self, index: int) -> BoundaryPoint:
        return self.point_on_side(index % self.size, self.backend.coerce(0))

    def mapped(self, fn: Callable[[Vec], Vec], name: str | None = None) -> "Polygon":
        """Image of the polygon under a point map (vertex order is kept when orientation is)."""

        return make_polygon([fn(v) for v in self.vertices], self.backend, name or self.name)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "backend": self.backend.name,
            "vertices": [[format_scalar(x), format_scalar(y)] for x, y in self.vertices],
            "corner_angles": list(self.corner_angles),
            "perimeter": format_scalar(self.perimeter),
        }


@dataclass(frozen=True)
class CornerRationality:
    index: int
    angle: float
    m: int | None
    n: int | None

    @property
    def suspect(self) -> bool:
        """True when no small rational multiple of π matched the angle."""

        return self.m is None

    def to_dict(self) -> dict:
        if self.suspect:
            return {"corner": self.index, "angle": self.angle, "status": "irrational-suspect"}
        return {"corner": self.index, "angle": self.angle, "m": self.m, "n": self.n}


@dataclass(frozen=True)
class RationalAngleData:
    corners: tuple[CornerRationality, ...]
    max_denominator: int

    @property
    def rational(self) -> bool:
        return not any(c.suspect for c in self.corners)

    @property
    def N(self) -> int | None:
        if not self.rational:
            return None
        return math.lcm(*(c.n for c in self.corners))

    def to_dict(self) -> dict:
        return {
            "rational": self.rational,
            "N": self.N,
            "max_denominator": self.max_denominator,
            "corners": [c.to_dict() for c in self.corners],
        }


def _signed_area(vertices: Sequence[Vec]) -> Number:
    total: Number = 0
    for i, a in enumerate(vertices):
        b = vertices[(i + 1) % len(vertices)]
        total = total + cross(a, b)
    return total / 2


def _segments_touch(p1: Vec, p2: Vec, q1: Vec, q2: Vec, bk: Backend) -> bool:
    d1 = bk.sign(cross(sub(p2, p1), sub(q1, p1)))
    d2 = bk.sign(cross(sub(p2, p1), sub(q2, p1)))
    d3 = bk.sign(cross(sub(q2, q1), sub(p1, q1)))
    d4 = bk.sign(cross(sub(q2, q1), sub(p2, q1)))
    if d1 * d2 < 0 and d3 * d4 < 0:
        return True

    def _on(a: Vec, b: Vec, c: Vec) -> bool:
        return (
            min(a[0], b[0]) - bk.eps <= c[0] <= max(a[0], b[0]) + bk.eps
            and min(a[1], b[1]) - bk.eps <= c[1] <= max(a[1], b[1]) + bk.eps
        )

    return (
        (d1 == 0 and _on(p1, p2, q1))
        or (d2 == 0 and _on(p1, p2, q2))
        or (d3 == 0 and _on(q1, q2, p1))
        or (d4 == 0 and _on(q1, q2, p2))
    )


def _validate(polygon: Polygon) -> None:
    vs = polygon.vertices
    bk = polygon.backend
    k = len(vs)
    if k < 3:
        raise DegeneratePolygon("a polygon needs at least 3 vertices", vertices=k)
    for i in range(k):
        a, b = vs[i], vs[(i + 1) % k]
        if bk.is_zero(a[0] - b[0]) and bk.is_zero(a[1] - b[1]):
            raise DegeneratePolygon("repeated consecutive vertex", index=i)
    edges = [sub(vs[(i + 1) % k], vs[i]) for i in range(k)]
    for i in range(k):
        if bk.is_zero(cross(edges[i - 1], edges[i])):
            raise DegeneratePolygon("straight or spiked corner", index=i)
    for i in range(k):
        for j in range(i + 2, k):
            if i == 0 and j == k - 1:
                continue
            if _segments_touch(vs[i], vs[(i + 1) % k], vs[j], vs[(j + 1) % k], bk):
                raise DegeneratePolygon("boundary is self-intersecting", sides=[i, j])
    if bk.sign(_signed_area(vs)) <= 0:
        raise DegeneratePolygon("polygon must be counterclockwise with positive area")
    total = sum(polygon.corner_angles)
    if abs(total - (k - 2) * math.pi) > max(EPSILON, 1e-12) * k:
        raise DegeneratePolygon("interior angles do not sum to (k-2)π", angle_sum=total)


def make_polygon(
    vertices: Iterable[Sequence[object]],
    backend: Backend | str = EXACT,
    name: str = "polygon",
) -> Polygon:
    """Coerce coordinates, normalize to counterclockwise order and validate."""

    bk = get_backend(backend)
    points: list[Vec] = []
    for raw in vertices:
        if len(raw) != 2:
            raise MalformedInput("each vertex must be a pair [x, y]", vertex=list(map(str, raw)))
        points.append((parse_scalar(raw[0], bk), parse_scalar(raw[1], bk)))
    if len(points) >= 3 and bk.sign(_signed_area(points)) < 0:
        logger.debug("Reversing clockwise vertex list of %s", name)
        points = [points[0], *reversed(points[1:])]
    return Polygon(tuple(points), bk, name)


def load_polygon(text: str, backend: Backend | str = DEFAULT_BACKEND, name: str | None = None) -> Polygon:
    """Parse the polygon JSON format ``{"vertices": [[x, y], ...]}``."""

    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"polygon is not valid JSON: {exc.msg}", line=exc.lineno) from None
    if not isinstance(payload, dict) or not isinstance(payload.get("vertices"), list):
        raise MalformedInput('polygon JSON must be an object with a "vertices" list')
    for vertex in payload["vertices"]:
        if not isinstance(vertex, list):
            raise MalformedInput("each vertex must be a JSON array [x, y]")
    return make_polygon(payload["vertices"], backend, name or str(payload.get("name") or "polygon"))


def read_polygon(path: str | Path, backend: Backend | str = DEFAULT_BACKEND) -> Polygon:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot read polygon file {path}: {exc.strerror}", path=str(path)) from None
    return load_polygon(text, backend, name=path.stem)


def boundary_point(polygon: Polygon, arclength: Number) -> BoundaryPoint:
    """Boundary point at counterclockwise arclength ``s`` (reduced modulo the perimeter).

    Exact only when ``polygon.exact_lengths``; on an irrational side the result is float-valued.
    """

    bk = polygon.backend
    s = bk.coerce(arclength) % polygon.perimeter
    side = max(bisect_right(polygon.cumulative, s) - 1, 0)
    offset = s - polygon.cumulative[side]
    length = polygon.side_lengths[side]
    bp = polygon.point_on_side(side, offset / length)
    if bp.side_index == side and not bp.at_corner:
        # keep the caller's value so arclength_of round-trips bit for bit
        return BoundaryPoint(bp.side_index, bp.t, offset, s, bp.point, False)
    return bp


def arclength_of(point: BoundaryPoint) -> Number:
    return point.arclength


def _convergents(x: Fraction) -> Iterator[Fraction]:
    h_prev, h = 0, 1
    k_prev, k = 1, 0
    while True:
        a = math.floor(x)
        h_prev, h = h, a * h + h_prev
        k_prev, k = k, a * k + k_prev
        yield Fraction(h, k)
        frac = x - a
        if frac == 0:
            return
        x = 1 / frac


def rational_angle_analysis(
    polygon: Polygon,
    max_denominator: int = MAX_DENOMINATOR,
    tolerance: float = EPSILON,
) -> RationalAngleData:
    """Classify each corner angle as π·m/n via continued-fraction convergents."""

    if max_denominator < 2:
        raise ValueError("max_denominator must be at least 2")
    corners = []
    for index, angle in enumerate(polygon.corner_angles):
        m = n = None
        for conv in _convergents(Fraction(angle / math.pi)):
            if conv.denominator > max_denominator:
                break
            if conv > 0 and abs(math.pi * conv.numerator / conv.denominator - angle) <= tolerance:
                m, n = conv.numerator, conv.denominator
                break
        corners.append(CornerRationality(index, angle, m, n))
    data = RationalAngleData(tuple(corners), max_denominator)
    if not data.rational:
        logger.info(
            "%s: corners %s are irrational-suspect",
            polygon.name,
            [c.index for c in data.corners if c.suspect],
        )
    return data


def direction_from_radians(radians: float, backend: Backend) -> Vec:
    """Direction vector for an angle in radians.

    In the exact backend the slope (or its reciprocal near vertical) is rationalized
    with denominator at most ``MAX_DENOMINATOR`` and returned as an integer vector, so
    ``atan(2)`` becomes exactly ``(1, 2)``.
    """

    c, s = math.cos(radians), math.sin(radians)
    if not backend.exact:
        return (c, s)
    if abs(c) >= abs(s):
        slope = Fraction(s / c).limit_denominator(MAX_DENOMINATOR)
        sign = 1 if c > 0 else -1
        vector = (Fraction(sign * slope.denominator), Fraction(sign * slope.numerator))
    else:
        cot = Fraction(c / s).limit_denominator(MAX_DENOMINATOR)
        sign = 1 if s > 0 else -1
        vector = (Fraction(sign * cot.numerator), Fraction(sign * cot.denominator))
    if abs(vector[0]) > 1 or abs(vector[1]) > 1:
        logger.warning(
            "Angle %.17g rad rationalized to direction (%s, %s)", radians, *map(format_scalar, vector)
        )
    return vector


def direction_from_degrees(degrees: float, backend: Backend) -> Vec:
    return direction_from_radians(math.radians(degrees), backend)


__all__ = [
    "BoundaryPoint",
    "CornerRationality",
    "Polygon",
    "RationalAngleData",
    "arclength_of",
    "boundary_point",
    "direction_from_degrees",
    "direction_from_radians",
    "load_polygon",
    "make_polygon",
    "rational_angle_analysis",
    "read_polygon",
]
