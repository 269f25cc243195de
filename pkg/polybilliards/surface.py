"""Dihedral direction orbits and the flat surface glued from 2N copies of a rational polygon."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DegenerateDirection, IrrationalPolygon, TangentDirection
from .geometry import Polygon, RationalAngleData
from .scalars import Number

logger = logging.getLogger(__name__)

ANGLE_TOLERANCE = 1e-9
TWO_PI = 2 * math.pi


def _reduce(angle: float) -> float:
    angle %= TWO_PI
    return 0.0 if math.isclose(angle, TWO_PI, abs_tol=ANGLE_TOLERANCE) else angle


def _angles_close(a: float, b: float) -> bool:
    gap = abs(a - b) % TWO_PI
    return min(gap, TWO_PI - gap) <= ANGLE_TOLERANCE


@dataclass(frozen=True)
class DirectionOrbit:
    """The 2N directions ``θ_j^+ = θ + 2jπ/N`` and ``θ_j^- = 2·axis − θ + 2jπ/N``.

    ``axis`` is the angle of one mirror line; the group is generated by the
    reflections in lines through the origin at angles ``axis + kπ/N``.
    """

    N: int
    base: float
    axis: float
    angles: tuple[float, ...]

    def __len__(self) -> int:
        return len(self.angles)

    def element(self, index: int) -> tuple[int, int]:
        """Group element ``(rotation, flip)`` carrying ``base`` to ``angles[index]``."""

        return (index // 2, index % 2)

    def index_of(self, angle: float) -> int:
        for i, candidate in enumerate(self.angles):
            if _angles_close(candidate, angle):
                return i
        raise KeyError(angle)

    def __contains__(self, angle: object) -> bool:
        try:
            self.index_of(float(angle))  # type: ignore[arg-type]
        except KeyError:
            return False
        return True

    def reflect(self, angle: float, mirror: float) -> float:
        """Image of ``angle`` under the reflection in the line at angle ``mirror``."""

        return _reduce(2 * mirror - angle)

    def mirrors(self) -> list[float]:
        return [_reduce(self.axis + k * math.pi / self.N) for k in range(self.N)]

    def to_dict(self) -> dict:
        return {
            "N": self.N,
            "base_deg": math.degrees(self.base),
            "angles_deg": [math.degrees(a) for a in self.angles],
        }


def dihedral_orbit(N: int, theta: float, axis: float = 0.0) -> DirectionOrbit:
    """Orbit of ``theta`` under D_N; angles interleave as ``θ_0^+, θ_0^-, θ_1^+, θ_1^-, ...``."""

    if N < 1:
        raise ValueError("N must be at least 1")
    offset = (theta - axis) * N / math.pi
    if abs(offset - round(offset)) <= ANGLE_TOLERANCE * N:
        raise DegenerateDirection(
            "direction lies on a mirror line", N=N, theta_deg=math.degrees(theta)
        )
    angles: list[float] = []
    for j in range(N):
        step = TWO_PI * j / N
        angles.append(_reduce(theta + step))
        angles.append(_reduce(2 * axis - theta + step))
    return DirectionOrbit(N, _reduce(theta), axis, tuple(angles))


def mu_length(side_length: Number, theta: float) -> float:
    """Invariant-measure length ``|e|·sin θ`` of a side crossed at angle ``theta``."""

    if not 0 <= theta <= math.pi:
        raise ValueError("theta must be measured in [0, π] against the oriented side")
    if theta <= ANGLE_TOLERANCE or math.pi - theta <= ANGLE_TOLERANCE:
        raise TangentDirection("direction is tangent to the side", theta=theta)
    return float(side_length) * math.sin(theta)


@dataclass(frozen=True)
class Copy:
    index: int
    rotation: int
    flip: int
    direction: float

    @property
    def label(self) -> int:
        return self.index + 1

    @property
    def orientation(self) -> str:
        return "clockwise" if self.flip else "counterclockwise"

    def to_dict(self) -> dict:
        return {
            "copy": self.index,
            "label": self.label,
            "rotation": self.rotation,
            "flip": self.flip,
            "orientation": self.orientation,
            "direction_deg": math.degrees(self.direction),
        }


@dataclass(frozen=True)
class ConePoint:
    corner: int
    copies: tuple[int, ...]
    m: int
    n: int

    @property
    def multiplicity(self) -> Fraction:
        """Cone angle in units of 2π."""

        return Fraction(len(self.copies) * self.m, 2 * self.n)

    @property
    def angle(self) -> float:
        return TWO_PI * float(self.multiplicity)

    def to_dict(self) -> dict:
        return {
            "corner": self.corner,
            "m": self.m,
            "n": self.n,
            "copies": list(self.copies),
            "cone_angle": self.angle,
            "cone_angle_over_2pi": str(self.multiplicity),
        }


@dataclass(frozen=True)
class SkeletonEdge:
    copy: int
    side: int
    partner: int
    length: float
    crossing_angle: float
    mu_length: float

    def to_dict(self) -> dict:
        return {
            "copy": self.copy,
            "side": self.side,
            "partner": self.partner,
            "length": self.length,
            "crossing_angle_deg": math.degrees(self.crossing_angle),
            "mu_length": self.mu_length,
        }


@dataclass(frozen=True)
class SurfaceGluing:
    polygon_name: str
    N: int
    test_angle: float
    copies: tuple[Copy, ...]
    pairings: dict[tuple[int, int], tuple[int, int]]
    cone_points: tuple[ConePoint, ...]
    skeleton: tuple[SkeletonEdge, ...]
    vertex_count: int
    edge_count: int
    face_count: int

    @property
    def euler_characteristic(self) -> int:
        return self.vertex_count - self.edge_count + self.face_count

    @property
    def genus(self) -> int:
        return (2 - self.euler_characteristic) // 2

    @property
    def gauss_bonnet_ok(self) -> bool:
        """Cone-angle excess ``Σ (1 − m)`` must equal χ for a closed flat surface."""

        return sum(1 - c.multiplicity for c in self.cone_points) == self.euler_characteristic

    def partner(self, copy: int, side: int) -> tuple[int, int]:
        return self.pairings[(copy, side)]

    def to_dict(self) -> dict:
        return {
            "polygon": self.polygon_name,
            "N": self.N,
            "test_angle_deg": math.degrees(self.test_angle),
            "copies": [c.to_dict() for c in self.copies],
            "pairings": [
                {"copy": c, "side": s, "glued_copy": c2, "glued_side": s2}
                for (c, s), (c2, s2) in sorted(self.pairings.items())
            ],
            "cone_points": [c.to_dict() for c in self.cone_points],
            "V": self.vertex_count,
            "E": self.edge_count,
            "F": self.face_count,
            "euler_characteristic": self.euler_characteristic,
            "genus": self.genus,
            "gauss_bonnet_ok": self.gauss_bonnet_ok,
            "skeleton": [e.to_dict() for e in self.skeleton],
        }


class _UnionFind:
    def __init__(self) -> None:
        self.parent: dict = {}

    def find(self, item):
        self.parent.setdefault(item, item)
        while self.parent[item] != item:
            self.parent[item] = self.parent[self.parent[item]]
            item = self.parent[item]
        return item

    def union(self, a, b) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def build_surface(
    polygon: Polygon, angles: RationalAngleData, test_angle: float | None = None
) -> SurfaceGluing:
    """Glue 2N copies of ``polygon`` along its sides, tracking a test direction through reflections."""

    if not angles.rational:
        raise IrrationalPolygon(
            "surface construction needs every corner angle rational",
            corners=[c.index for c in angles.corners if c.suspect],
        )
    N = angles.N
    k = polygon.size
    axis = polygon.side_angles[0]
    theta0 = math.pi / (4 * N) if test_angle is None else test_angle
    orbit = dihedral_orbit(N, axis + theta0, axis)
    if len(set(round(a, 9) for a in orbit.angles)) != 2 * N:
        raise DegenerateDirection("test angle orbit is smaller than 2N", N=N)

    copies = tuple(
        Copy(i, *orbit.element(i), direction=angle) for i, angle in enumerate(orbit.angles)
    )
    pairings: dict[tuple[int, int], tuple[int, int]] = {}
    for copy in copies:
        for side in range(k):
            image = orbit.reflect(copy.direction, polygon.side_angles[side])
            try:
                glued = orbit.index_of(image)
            except KeyError:
                raise IrrationalPolygon(
                    "side direction is not a mirror of the dihedral group", side=side, N=N
                ) from None
            pairings[(copy.index, side)] = (glued, side)

    corners = _UnionFind()
    for (c, side), (c2, _) in pairings.items():
        corners.union((c, side), (c2, side))
        corners.union((c, (side + 1) % k), (c2, (side + 1) % k))
    classes: dict = {}
    for copy in copies:
        for v in range(k):
            classes.setdefault(corners.find((copy.index, v)), []).append((copy.index, v))
    cone_points = []
    for members in sorted(classes.values()):
        corner = members[0][1]
        info = angles.corners[corner]
        cone_points.append(ConePoint(corner, tuple(c for c, _ in members), info.m, info.n))

    skeleton = []
    for (c, side), (c2, _) in sorted(pairings.items()):
        if c2 < c:
            continue
        crossing = (copies[c].direction - polygon.side_angles[side]) % math.pi
        skeleton.append(
            SkeletonEdge(
                c,
                side,
                c2,
                float(polygon.side_lengths[side]),
                crossing,
                mu_length(polygon.side_lengths[side], crossing),
            )
        )

    surface = SurfaceGluing(
        polygon_name=polygon.name,
        N=N,
        test_angle=theta0,
        copies=copies,
        pairings=pairings,
        cone_points=tuple(cone_points),
        skeleton=tuple(skeleton),
        vertex_count=len(cone_points),
        edge_count=len(pairings) // 2,
        face_count=len(copies),
    )
    if not surface.gauss_bonnet_ok:
        logger.warning("%s: cone angles disagree with the Euler characteristic", polygon.name)
    logger.info(
        "Surface for %s: %s copies, V=%s E=%s F=%s, genus %s",
        polygon.name,
        len(copies),
        surface.vertex_count,
        surface.edge_count,
        surface.face_count,
        surface.genus,
    )
    return surface


__all__ = [
    "ConePoint",
    "Copy",
    "DirectionOrbit",
    "SkeletonEdge",
    "SurfaceGluing",
    "build_surface",
    "dihedral_orbit",
    "mu_length",
]
