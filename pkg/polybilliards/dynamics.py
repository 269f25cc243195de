"""The billiard map on (footpoint, inward direction) pairs and what is built on it."""
from __future__ import annotations

import logging
import math
import re
from bisect import bisect_left, insort
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence, Union

import numpy as np

from .config import GAP_FACTOR, RAY_T_MIN
from .errors import CornerHit, InsufficientData, InvalidPhasePoint, MalformedInput, Tangency
from .geometry import (
    BoundaryPoint,
    Polygon,
    RationalAngleData,
    direction_from_radians,
    rational_angle_analysis,
)
from .scalars import Backend, Number, Vec, angle_of, cross, dot, format_scalar, reflect, sub

logger = logging.getLogger(__name__)

Direction = Union[Vec, float]


@dataclass(frozen=True, eq=False)
class PhasePoint:
    """Footpoint with an inward direction; vectors differing by a positive factor are the same direction."""

    foot: BoundaryPoint
    direction: Vec

    @property
    def theta(self) -> float:
        return angle_of(self.direction)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PhasePoint):
            return NotImplemented
        return self.foot == other.foot and _direction_key(self.direction) == _direction_key(other.direction)

    def __hash__(self) -> int:
        return hash((self.foot, _direction_key(self.direction)))


@dataclass(frozen=True)
class Termination:
    kind: str
    step: int

    def __str__(self) -> str:
        return f"{self.kind}({self.step})"

    @property
    def completed(self) -> bool:
        return self.kind == "Completed"

    @classmethod
    def parse(cls, text: str) -> "Termination":
        match = re.fullmatch(r"(Completed|CornerHit|Tangency)\((\d+)\)", text.strip())
        if not match:
            raise MalformedInput(f"bad termination value {text!r}")
        return cls(match.group(1), int(match.group(2)))


class DirectionSet:
    """Distinct directions; exact keys in the exact backend, ε-clustered angles otherwise."""

    def __init__(self, backend: Backend) -> None:
        self.backend = backend
        self._exact: dict[Vec, Vec] = {}
        self._angles: list[float] = []
        self._reps: list[Vec] = []

    def add(self, vector: Vec) -> bool:
        if self.backend.exact:
            key = _direction_key(vector)
            if key in self._exact:
                return False
            self._exact[key] = vector
            return True
        theta = angle_of(vector)
        eps = max(self.backend.eps, 1e-12)
        idx = bisect_left(self._angles, theta)
        neighbours = [self._angles[i % len(self._angles)] for i in (idx - 1, idx)] if self._angles else []
        for other in neighbours:
            gap = abs(other - theta) % (2 * math.pi)
            if min(gap, 2 * math.pi - gap) <= eps:
                return False
        insort(self._angles, theta)
        self._reps.append(vector)
        return True

    def __len__(self) -> int:
        return len(self._exact) if self.backend.exact else len(self._angles)

    def vectors(self) -> list[Vec]:
        return list(self._exact.values()) if self.backend.exact else list(self._reps)

    def angles(self) -> list[float]:
        return sorted(angle_of(v) for v in self.vectors())


def _direction_key(vector: Vec) -> Vec:
    scale = max(abs(vector[0]), abs(vector[1]))
    return (vector[0] / scale, vector[1] / scale)


@dataclass(frozen=True)
class OrbitRecord:
    polygon_name: str
    backend: Backend
    start: PhasePoint
    steps: tuple[PhasePoint, ...]
    termination: Termination
    stopped_at: BoundaryPoint | None = None  # corner or tangency point of an early stop

    @property
    def footprints(self) -> list[Number]:
        return [p.foot.arclength for p in self.steps]

    def phase_points(self) -> list[PhasePoint]:
        """Leader followed by its images, i.e. T^0 .. T^n."""

        return [self.start, *self.steps]

    @cached_property
    def directions_seen(self) -> DirectionSet:
        seen = DirectionSet(self.backend)
        for p in self.phase_points():
            seen.add(p.direction)
        return seen

    def directions_by_side(self) -> dict[int, DirectionSet]:
        """Distinct outgoing directions observed at footpoints interior to each side."""

        out: dict[int, DirectionSet] = {}
        for p in self.phase_points():
            if p.foot.at_corner:
                continue
            out.setdefault(p.foot.side_index, DirectionSet(self.backend)).add(p.direction)
        return out

    def within_direction_bound(self, angles: RationalAngleData) -> bool:
        if angles.N is None:
            return True
        ok = len(self.directions_seen) <= 2 * angles.N
        if not ok:
            logger.warning(
                "%s: %s directions exceed 2N=%s; angle analysis is suspect",
                self.polygon_name,
                len(self.directions_seen),
                2 * angles.N,
            )
        return ok


@dataclass(frozen=True)
class GeneralizedDiagonal:
    start_corner: int
    end_corner: int
    bounce_count: int  # number of chords
    segments: tuple[Vec, ...]
    direction: Vec

    def to_dict(self) -> dict:
        return {
            "start_corner": self.start_corner,
            "end_corner": self.end_corner,
            "bounce_count": self.bounce_count,
            "segments": [[format_scalar(x), format_scalar(y)] for x, y in self.segments],
            "direction": [format_scalar(c) for c in self.direction],
        }


@dataclass(frozen=True)
class OrbitClass:
    kind: str  # Periodic | FlatStripSuspect | SurfaceDense | Unknown
    period: int | None = None
    evidence: dict = field(default_factory=dict)
    heuristic: bool = True

    def __str__(self) -> str:
        return f"Periodic({self.period})" if self.kind == "Periodic" else self.kind

    def to_dict(self) -> dict:
        return {"class": str(self), "kind": self.kind, "period": self.period,
                "heuristic": self.heuristic, "evidence": self.evidence}


@dataclass(frozen=True)
class Isometry:
    """Planar isometry ``p -> L p + (tx, ty)`` with ``L = [[a, b], [c, d]]``."""

    a: Number
    b: Number
    c: Number
    d: Number
    tx: Number
    ty: Number

    @classmethod
    def identity(cls, backend: Backend) -> "Isometry":
        one, zero = backend.coerce(1), backend.coerce(0)
        return cls(one, zero, zero, one, zero, zero)

    @classmethod
    def reflection(cls, anchor: Vec, axis: Vec) -> "Isometry":
        n2 = dot(axis, axis)
        a = (axis[0] * axis[0] - axis[1] * axis[1]) / n2
        b = 2 * axis[0] * axis[1] / n2
        return cls(a, b, b, -a, anchor[0] - (a * anchor[0] + b * anchor[1]),
                   anchor[1] - (b * anchor[0] - a * anchor[1]))

    def apply(self, p: Vec) -> Vec:
        return (self.a * p[0] + self.b * p[1] + self.tx, self.c * p[0] + self.d * p[1] + self.ty)

    def linear(self, v: Vec) -> Vec:
        return (self.a * v[0] + self.b * v[1], self.c * v[0] + self.d * v[1])

    def compose(self, other: "Isometry") -> "Isometry":
        """``self ∘ other``."""

        tx, ty = self.apply((other.tx, other.ty))
        return Isometry(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
            tx,
            ty,
        )

    def inverse(self) -> "Isometry":
        # orthogonal linear part: inverse is the transpose
        a, b, c, d = self.a, self.c, self.b, self.d
        return Isometry(a, b, c, d, -(a * self.tx + b * self.ty), -(c * self.tx + d * self.ty))


@dataclass(frozen=True)
class UnfoldedOrbit:
    copies: tuple[Isometry, ...]
    polygons: tuple[tuple[Vec, ...], ...]
    points: tuple[Vec, ...]
    direction: Vec
    sides_hit: tuple[int, ...]

    @property
    def segment(self) -> tuple[Vec, Vec]:
        return self.points[0], self.points[-1]

    def collinearity_residual(self) -> Number:
        origin = self.points[0]
        return max((abs(cross(sub(p, origin), self.direction)) for p in self.points[1:]), default=0)

    def fold_back(self) -> list[Vec]:
        """Unfolded footpoints mapped back into the original table."""

        return [self.copies[k - 1].inverse().apply(p) for k, p in enumerate(self.points) if k > 0]


def leader(polygon: Polygon, side: int, offset: Number, direction: Direction) -> PhasePoint:
    """Phase point at ``offset`` along ``side`` heading in ``direction``."""

    foot = polygon.point_at_offset(side, offset)
    if foot.at_corner:
        raise InvalidPhasePoint("leader footpoint is a corner", side=side, offset=format_scalar(offset))
    return PhasePoint(foot, as_direction(polygon, direction))


def as_direction(polygon: Polygon, direction: Direction) -> Vec:
    """Coerce a direction vector, or an angle in radians, into the polygon's backend."""

    bk = polygon.backend
    if isinstance(direction, tuple) or isinstance(direction, list):
        dx, dy = direction
        return (bk.coerce(dx), bk.coerce(dy))
    return direction_from_radians(float(direction), bk)


def _first_hit(
    polygon: Polygon, origin: Vec, direction: Vec, skip: Iterable[int]
) -> tuple[int, Number, Number] | None:
    """Boundary intersection with the smallest ray parameter: (side, side parameter, ray parameter)."""

    bk = polygon.backend
    t_min = 0 if bk.exact else RAY_T_MIN
    skipped = set(skip)
    best: tuple[int, Number, Number] | None = None
    for j in range(polygon.size):
        if j in skipped:
            continue
        e = polygon.edges[j]
        denom = cross(direction, e)
        if bk.is_zero(denom):
            continue
        w = sub(polygon.vertices[j], origin)
        t = cross(w, e) / denom
        if t <= t_min:
            continue
        s = cross(w, direction) / denom
        length = polygon.side_lengths[j]
        if s * length < -bk.eps or (s - 1) * length > bk.eps:
            continue
        if best is None or t < best[2]:
            best = (j, s, t)
    return best


def _corner_at(polygon: Polygon, side: int, s: Number) -> int | None:
    bk = polygon.backend
    length = polygon.side_lengths[side]
    if bk.sign(s * length) <= 0:
        return side
    if bk.sign((1 - s) * length) <= 0:
        return (side + 1) % polygon.size
    return None


def _check_departure(polygon: Polygon, u: PhasePoint) -> None:
    if u.foot.at_corner:
        raise InvalidPhasePoint("the billiard map is undefined at a corner", side=u.foot.side_index)
    orientation = polygon.backend.sign(cross(polygon.edges[u.foot.side_index], u.direction))
    if orientation == 0:
        raise Tangency("direction is parallel to the carrying side", side=u.foot.side_index)
    if orientation < 0:
        raise InvalidPhasePoint("direction points out of the polygon", side=u.foot.side_index)


def billiard_step(polygon: Polygon, u: PhasePoint) -> PhasePoint:
    """Apply the billiard map T once."""

    _check_departure(polygon, u)
    hit = _first_hit(polygon, u.foot.point, u.direction, (u.foot.side_index,))
    if hit is None:
        raise InvalidPhasePoint("ray never meets the boundary", side=u.foot.side_index)
    side, s, _ = hit
    corner = _corner_at(polygon, side, s)
    if corner is not None:
        x, y = polygon.vertices[corner]
        raise CornerHit("trajectory runs into a corner", corner=corner,
                        point=[format_scalar(x), format_scalar(y)])
    return PhasePoint(polygon.point_on_side(side, s), reflect(u.direction, polygon.edges[side]))


def reverse_phase(polygon: Polygon, u: PhasePoint) -> PhasePoint:
    """Time reversal ``(x, θ) -> (x, -R_e θ)``; an involution mapping T to T^-1."""

    r = reflect(u.direction, polygon.edges[u.foot.side_index])
    return PhasePoint(u.foot, (-r[0], -r[1]))


def billiard_step_back(polygon: Polygon, u: PhasePoint) -> PhasePoint:
    """Apply T^-1 once."""

    _check_departure(polygon, u)
    return reverse_phase(polygon, billiard_step(polygon, reverse_phase(polygon, u)))


def generate_orbit(polygon: Polygon, u0: PhasePoint, n: int) -> OrbitRecord:
    if n < 1:
        raise ValueError("orbit length must be at least 1")
    steps: list[PhasePoint] = []
    current = u0
    termination = Termination("Completed", n)
    stopped_at = None
    for i in range(1, n + 1):
        try:
            current = billiard_step(polygon, current)
        except CornerHit as exc:
            termination = Termination("CornerHit", i)
            stopped_at = polygon.corner(exc.details["corner"])
            break
        except Tangency:
            termination = Termination("Tangency", i)
            stopped_at = current.foot
            break
        steps.append(current)
    if not termination.completed:
        logger.warning("%s: orbit stopped early with %s", polygon.name, termination)
    else:
        logger.debug("%s: orbit of %s steps completed", polygon.name, n)
    return OrbitRecord(polygon.name, polygon.backend, u0, tuple(steps), termination, stopped_at)


def unfold_orbit(polygon: Polygon, u0: PhasePoint, n: int) -> UnfoldedOrbit:
    """Unfold ``n`` chords of the orbit into a straight segment through reflected copies."""

    if n < 1:
        raise ValueError("orbit length must be at least 1")
    bk = polygon.backend
    copy = Isometry.identity(bk)
    copies = [copy]
    points = [u0.foot.point]
    sides: list[int] = []
    current = u0
    for i in range(1, n + 1):
        try:
            current = billiard_step(polygon, current)
        except (CornerHit, Tangency) as exc:
            raise exc.at_step(i)
        side = current.foot.side_index
        sides.append(side)
        points.append(copy.apply(current.foot.point))
        if i < n:
            copy = copy.compose(Isometry.reflection(polygon.vertices[side], polygon.edges[side]))
            copies.append(copy)
    polygons = tuple(tuple(c.apply(v) for v in polygon.vertices) for c in copies)
    return UnfoldedOrbit(tuple(copies), polygons, tuple(points), u0.direction, tuple(sides))


def _same_direction(a: Vec, b: Vec, bk: Backend) -> bool:
    return bk.is_zero(cross(a, b)) and dot(a, b) > 0


def direction_orbit_vectors(polygon: Polygon, direction: Vec, limit: int | None = None) -> list[Vec]:
    """Orbit of a direction vector under the reflections in the sides of the polygon."""

    bk = polygon.backend
    found = [direction]
    queue = deque([direction])
    while queue and (limit is None or len(found) < limit):
        v = queue.popleft()
        for e in polygon.edges:
            r = reflect(v, e)
            if not any(_same_direction(r, f, bk) for f in found):
                found.append(r)
                queue.append(r)
                if limit is not None and len(found) >= limit:
                    break
    return found


def _inside_corner(polygon: Polygon, index: int, direction: Vec) -> bool:
    bk = polygon.backend
    out_edge = polygon.edges[index]
    prev = polygon.edges[index - 1]
    back = (-prev[0], -prev[1])
    left_of_out = bk.sign(cross(out_edge, direction)) > 0
    right_of_back = bk.sign(cross(direction, back)) > 0
    if bk.sign(cross(out_edge, back)) > 0:
        return left_of_out and right_of_back
    return left_of_out or right_of_back


def _point_key(p: Vec, bk: Backend) -> tuple:
    if bk.exact:
        return (p[0], p[1])
    return (round(float(p[0]), 7), round(float(p[1]), 7))


def find_generalized_diagonals(
    polygon: Polygon,
    theta: Direction,
    depth: int,
    angles: RationalAngleData | None = None,
) -> list[GeneralizedDiagonal]:
    """Corner-to-corner trajectories with at most ``depth`` chords in the directions of ``theta``."""

    if depth < 1:
        raise ValueError("depth must be at least 1")
    bk = polygon.backend
    base = as_direction(polygon, theta)
    angles = angles or rational_angle_analysis(polygon)
    if angles.rational:
        directions = direction_orbit_vectors(polygon, base, limit=2 * angles.N)
    else:
        directions = []
        for v in (base, (-base[0], -base[1])):
            for w in [v, *(reflect(v, e) for e in polygon.edges)]:
                if not any(_same_direction(w, f, bk) for f in directions):
                    directions.append(w)

    found: dict[tuple, GeneralizedDiagonal] = {}
    for corner in range(polygon.size):
        for d0 in directions:
            if not _inside_corner(polygon, corner, d0):
                continue
            origin = polygon.vertices[corner]
            skip = {corner, (corner - 1) % polygon.size}
            d = d0
            points = [origin]
            for chord in range(1, depth + 1):
                hit = _first_hit(polygon, origin, d, skip)
                if hit is None:
                    break
                side, s, _ = hit
                end = _corner_at(polygon, side, s)
                if end is not None:
                    points.append(polygon.vertices[end])
                    keys = tuple(_point_key(p, bk) for p in points)
                    key = min(keys, keys[::-1])
                    found.setdefault(key, GeneralizedDiagonal(corner, end, chord, tuple(points), d0))
                    break
                foot = polygon.point_on_side(side, s)
                points.append(foot.point)
                origin = foot.point
                d = reflect(d, polygon.edges[side])
                skip = {side}
    diagonals = sorted(found.values(), key=lambda g: (g.bounce_count, g.start_corner, g.end_corner))
    logger.debug("%s: %s generalized diagonals up to depth %s", polygon.name, len(diagonals), depth)
    return diagonals


def _same_phase(a: PhasePoint, b: PhasePoint, polygon_backend: Backend, lengths: Sequence[Number]) -> bool:
    if a.foot.side_index != b.foot.side_index:
        return False
    if polygon_backend.exact:
        return a.foot.t == b.foot.t and _direction_key(a.direction) == _direction_key(b.direction)
    eps = polygon_backend.eps
    length = float(lengths[a.foot.side_index])
    if abs(float(a.foot.t - b.foot.t)) * length > eps:
        return False
    gap = abs(a.theta - b.theta) % (2 * math.pi)
    return min(gap, 2 * math.pi - gap) <= eps


def direction_growth(record: OrbitRecord, checkpoints: Sequence[int] | None = None) -> list[tuple[int, int]]:
    """Number of distinct directions after each checkpoint (counted in steps)."""

    total = len(record.steps)
    if checkpoints is None:
        checkpoints = sorted({max(1, total // 4), max(1, total // 2), total})
    seen = DirectionSet(record.backend)
    seen.add(record.start.direction)
    out: list[tuple[int, int]] = []
    marks = iter(sorted(checkpoints))
    mark = next(marks, None)
    for i, p in enumerate(record.steps, start=1):
        seen.add(p.direction)
        while mark is not None and i >= mark:
            out.append((mark, len(seen)))
            mark = next(marks, None)
    return out


def _side_gaps(record: OrbitRecord, upto: int) -> dict[int, tuple[int, float]]:
    per_side: dict[int, list[float]] = {}
    for p in record.steps[:upto]:
        per_side.setdefault(p.foot.side_index, []).append(float(p.foot.t))
    out = {}
    for side, values in per_side.items():
        grid = np.concatenate(([0.0], np.sort(np.asarray(values, dtype=float)), [1.0]))
        out[side] = (len(values), float(np.max(np.diff(grid))))
    return out


def classify_orbit(
    record: OrbitRecord,
    angles: RationalAngleData,
    polygon: Polygon | None = None,
    gap_factor: float = GAP_FACTOR,
) -> OrbitClass:
    """Heuristic placement of an orbit segment in the periodic / flat strip / dense trichotomy."""

    N = angles.N
    minimum = 2 * N if N else 2
    if len(record.steps) < minimum:
        raise InsufficientData(
            "orbit too short to classify", steps=len(record.steps), required=minimum
        )
    lengths = polygon.side_lengths if polygon is not None else [1] * (len(angles.corners))
    for k, p in enumerate(record.steps, start=1):
        if _same_phase(p, record.start, record.backend, lengths):
            return OrbitClass("Periodic", k, {"direction_count": len(record.directions_seen)})

    growth = direction_growth(record)
    half = len(record.steps) // 2
    full_gaps = _side_gaps(record, len(record.steps))
    half_gaps = _side_gaps(record, half)
    sides = range(len(angles.corners))
    stats = {}
    dense = []
    persistent = []
    for side in sides:
        count, gap = full_gaps.get(side, (0, 1.0))
        _, gap_half = half_gaps.get(side, (0, 1.0))
        stats[side] = {"footpoints": count, "max_gap": gap, "max_gap_half": gap_half}
        is_dense = count > 0 and gap * count <= gap_factor
        dense.append(is_dense)
        persistent.append(not is_dense and gap >= 0.5 * gap_half)
    count = len(record.directions_seen)
    stabilized = len(growth) >= 2 and growth[-1][1] == growth[-2][1]
    evidence = {
        "direction_count": count,
        "expected_directions": 2 * N if N else None,
        "direction_growth": growth,
        "sides": stats,
    }
    if N and count == 2 * N and all(dense):
        return OrbitClass("SurfaceDense", None, evidence)
    if stabilized and any(persistent):
        return OrbitClass("FlatStripSuspect", None, evidence)
    return OrbitClass("Unknown", None, evidence)


def successor_pairs(record: OrbitRecord) -> list[tuple[Number, Number, bool]]:
    """Consecutive footpoint pairs ``(x_n, x_{n+1}, same_side)``."""

    points = record.phase_points()
    return [
        (a.foot.arclength, b.foot.arclength, a.foot.side_index == b.foot.side_index)
        for a, b in zip(points, points[1:])
    ]


def limit_pair_candidates(
    record: OrbitRecord, target: Number, radius: float, perimeter: Number
) -> list[tuple[Number, Number]]:
    """Pairs near ``target`` whose successor lies on a different side (finite-horizon limit points)."""

    out = []
    for x, nxt, same_side in successor_pairs(record):
        gap = abs(float(x) - float(target)) % float(perimeter)
        if min(gap, float(perimeter) - gap) <= radius and not same_side:
            out.append((x, nxt))
    return out


__all__ = [
    "DirectionSet",
    "GeneralizedDiagonal",
    "Isometry",
    "OrbitClass",
    "OrbitRecord",
    "PhasePoint",
    "Termination",
    "UnfoldedOrbit",
    "as_direction",
    "billiard_step",
    "billiard_step_back",
    "classify_orbit",
    "direction_growth",
    "direction_orbit_vectors",
    "find_generalized_diagonals",
    "generate_orbit",
    "leader",
    "limit_pair_candidates",
    "reverse_phase",
    "successor_pairs",
    "unfold_orbit",
]
