"""Fixed-direction billiard as an interval exchange, the ghost map and a saddle-connection probe.

A direction θ of a rational polygon only ever turns into the 2N directions of its
dihedral orbit. Each pair (side, inward direction) is a *floor*; laid end to end
the floors form an interval I and the billiard map becomes a piecewise
translation of I. Floor coordinates are scaled by ``|d|``, so a floor on side
``e`` has exact length ``cross(e, d)`` and all floors compare exactly.
"""
from __future__ import annotations

import logging
import math
from bisect import bisect_right
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .config import IET_EPSILON, PROBE_DEPTH, PROBE_EPSILON
from .dynamics import Direction, PhasePoint, _first_hit, _same_direction, as_direction, find_generalized_diagonals
from .errors import (
    DegenerateDirection,
    ExceptionalDirection,
    InvalidPhasePoint,
    IrrationalPolygon,
    UnbalancedMap,
)
from .geometry import Polygon, RationalAngleData
from .scalars import Number, Vec, angle_of, cross, dot, format_scalar, reflect, sub

logger = logging.getLogger(__name__)


def _is_exact(*values: Number) -> bool:
    return all(isinstance(v, (Fraction, int)) for v in values)


@dataclass(frozen=True)
class FloorLength:
    """μ-length ``|e|·sin θ`` of a floor.

    ``measure`` is the length times ``scale`` (= |d|), exact for rational vertices.
    ``factor`` tags the sine class: floors crossing their sides at the same angle
    share it, and their lengths then compare through ``base`` alone.
    """

    base: Number
    factor: str
    measure: Number
    scale: Number

    @property
    def value(self) -> float:
        return float(self.measure) / float(self.scale)

    def compare(self, other: "FloorLength") -> int:
        if self.scale == other.scale and _is_exact(self.measure, other.measure):
            diff = self.measure - other.measure
        elif self.factor == other.factor and _is_exact(self.base, other.base):
            diff = self.base - other.base
        else:
            diff = self.value - other.value
            if abs(diff) <= IET_EPSILON:
                return 0
        return (diff > 0) - (diff < 0)

    def equals(self, other: "FloorLength") -> bool:
        return self.compare(other) == 0

    def to_dict(self) -> dict:
        return {
            "base": format_scalar(self.base),
            "factor": self.factor,
            "measure": format_scalar(self.measure),
            "value": self.value,
        }


@dataclass(frozen=True)
class Floor:
    side: int
    direction: Vec
    orbit_index: int
    parity: int  # 1 when the direction is reached by an odd number of reflections
    start: Number
    length: Number
    mu: FloorLength

    @property
    def label(self) -> str:
        return f"e{self.side}/d{self.orbit_index}"

    @property
    def end(self) -> Number:
        return self.start + self.length

    def coordinate(self, t: Number) -> Number:
        """Position on the floor of the point with side parameter ``t``."""

        return (1 - t) * self.length if self.parity else t * self.length

    def side_parameter(self, xi: Number) -> Number:
        return 1 - xi / self.length if self.parity else xi / self.length

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "side": self.side,
            "direction": [format_scalar(c) for c in self.direction],
            "parity": self.parity,
            "start": format_scalar(self.start),
            "length": format_scalar(self.length),
            "mu_length": self.mu.to_dict(),
        }


@dataclass(frozen=True)
class Piece:
    """Translation of ``[domain_start, domain_start + length)`` onto ``[image_start, ...)``."""

    domain_start: Number
    length: Number
    image_start: Number
    label: str = ""
    target: str = ""

    @property
    def domain_end(self) -> Number:
        return self.domain_start + self.length

    @property
    def image_end(self) -> Number:
        return self.image_start + self.length

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "target": self.target,
            "domain": [format_scalar(self.domain_start), format_scalar(self.domain_end)],
            "image": [format_scalar(self.image_start), format_scalar(self.image_end)],
        }


def _gaps(intervals: Iterable[tuple[Number, Number]], total: Number) -> list[tuple[Number, Number]]:
    """Complement of half-open intervals inside ``[0, total)`` as (start, length) pairs."""

    out = []
    cursor: Number = 0
    for start, end in sorted(intervals):
        if start > cursor:
            out.append((cursor, start - cursor))
        cursor = max(cursor, end)
    if total > cursor:
        out.append((cursor, total - cursor))
    return out


@dataclass(frozen=True)
class PiecewiseIsometry:
    """A partially defined piecewise translation of ``[0, total)``."""

    total: Number
    pieces: tuple[Piece, ...]
    floors: tuple[Floor, ...] = ()
    _starts: tuple[Number, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        pieces = tuple(sorted(self.pieces, key=lambda p: p.domain_start))
        for p in pieces:
            if p.length <= 0:
                raise ValueError("pieces must have positive length")
            if p.domain_start < 0 or p.domain_end > self.total:
                raise ValueError(f"piece {p.label!r} leaves the domain")
        object.__setattr__(self, "pieces", pieces)
        object.__setattr__(self, "_starts", tuple(p.domain_start for p in pieces))

    def __call__(self, x: Number) -> Number | None:
        """Image of ``x``, or ``None`` where the map is undefined."""

        i = bisect_right(self._starts, x) - 1
        if i < 0:
            return None
        piece = self.pieces[i]
        if x >= piece.domain_end:
            return None
        return piece.image_start + (x - piece.domain_start)

    def domain_gaps(self) -> list[tuple[Number, Number]]:
        return _gaps(((p.domain_start, p.domain_end) for p in self.pieces), self.total)

    def range_gaps(self) -> list[tuple[Number, Number]]:
        return _gaps(((p.image_start, p.image_end) for p in self.pieces), self.total)

    def balance(self) -> tuple[Number, Number]:
        """Total undefined domain length and total undefined range length."""

        return (
            sum((length for _, length in self.domain_gaps()), 0),
            sum((length for _, length in self.range_gaps()), 0),
        )

    @property
    def is_total(self) -> bool:
        return not self.domain_gaps()

    def floor(self, label: str) -> Floor:
        for f in self.floors:
            if f.label == label:
                return f
        raise KeyError(label)

    def floor_at(self, x: Number) -> Floor:
        starts = [f.start for f in self.floors]
        i = bisect_right(starts, x) - 1
        if i < 0 or x >= self.floors[i].end:
            raise ValueError(f"{x} is outside the floors")
        return self.floors[i]

    def restrict(self, labels: Iterable[str]) -> "PiecewiseIsometry":
        """The map induced on the chosen floors: pieces leaving them become undefined."""

        keep = set(labels)
        unknown = keep - {f.label for f in self.floors}
        if unknown:
            raise KeyError(f"unknown floors: {sorted(unknown)}")
        shift: dict[str, Number] = {}
        floors = []
        cursor: Number = 0
        for f in self.floors:
            if f.label not in keep:
                continue
            shift[f.label] = cursor - f.start
            floors.append(Floor(f.side, f.direction, f.orbit_index, f.parity, cursor, f.length, f.mu))
            cursor = cursor + f.length
        pieces = [
            Piece(
                p.domain_start + shift[p.label.split("#")[0]],
                p.length,
                p.image_start + shift[p.target],
                p.label,
                p.target,
            )
            for p in self.pieces
            if p.label.split("#")[0] in keep and p.target in keep
        ]
        ghost = PiecewiseIsometry(cursor, tuple(pieces), tuple(floors))
        logger.debug("Restricted to %s floors: %s pieces, gaps %s", len(floors), len(pieces), ghost.balance())
        return ghost

    def to_dict(self) -> dict:
        domain_gap, range_gap = self.balance()
        return {
            "total": format_scalar(self.total),
            "floors": [f.to_dict() for f in self.floors],
            "pieces": [p.to_dict() for p in self.pieces],
            "undefined_domain": format_scalar(domain_gap),
            "undefined_range": format_scalar(range_gap),
        }


@dataclass(frozen=True)
class IntervalExchange:
    """``lengths[i]`` is the i-th interval from the left; it lands in position ``permutation[i]``."""

    lengths: tuple[Number, ...]
    permutation: tuple[int, ...]
    labels: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if sorted(self.permutation) != list(range(len(self.lengths))):
            raise ValueError("permutation must be a bijection on the intervals")
        if any(length <= 0 for length in self.lengths):
            raise ValueError("interval lengths must be positive")
        if not self.labels:
            object.__setattr__(self, "labels", tuple(str(i) for i in range(len(self.lengths))))

    @property
    def exact(self) -> bool:
        return _is_exact(*self.lengths)

    @property
    def total(self) -> Number:
        return sum(self.lengths, 0)

    @property
    def starts(self) -> tuple[Number, ...]:
        out, cursor = [], 0
        for length in self.lengths:
            out.append(cursor)
            cursor = cursor + length
        return tuple(out)

    @property
    def image_starts(self) -> tuple[Number, ...]:
        by_position = sorted(range(len(self.lengths)), key=lambda i: self.permutation[i])
        out: list[Number] = [0] * len(self.lengths)
        cursor: Number = 0
        for i in by_position:
            out[i] = cursor
            cursor = cursor + self.lengths[i]
        return tuple(out)

    @property
    def discontinuities(self) -> tuple[Number, ...]:
        return self.starts[1:]

    def __call__(self, x: Number) -> Number:
        total = self.total
        if not self.exact:
            x = x % total
        elif not 0 <= x < total:
            raise ValueError(f"{x} is outside [0, {total})")
        starts = self.starts
        i = min(max(bisect_right(starts, x) - 1, 0), len(starts) - 1)
        y = self.image_starts[i] + (x - starts[i])
        return y if self.exact else y % total

    def to_dict(self) -> dict:
        return {
            "labels": list(self.labels),
            "lengths": [format_scalar(v) for v in self.lengths],
            "permutation": list(self.permutation),
        }


@dataclass(frozen=True)
class SaddleConnection:
    start: int
    end: int
    steps: int
    residual: float = 0.0

    def to_dict(self) -> dict:
        return {"from": self.start, "to": self.end, "steps": self.steps, "residual": self.residual}


def _direction_orbit_with_parity(polygon: Polygon, base: Vec, limit: int) -> list[tuple[Vec, int]]:
    bk = polygon.backend
    found = [(base, 0)]
    queue = deque(found)
    while queue and len(found) < limit:
        v, parity = queue.popleft()
        for e in polygon.edges:
            r = reflect(v, e)
            if not any(_same_direction(r, f, bk) for f, _ in found):
                found.append((r, 1 - parity))
                queue.append((r, 1 - parity))
    return found


def _factor_tag(edge: Vec, direction: Vec) -> str:
    crossing = (angle_of(direction) - angle_of(edge)) % math.pi
    return f"sin({math.degrees(crossing):.9f})"


def _build_floors(polygon: Polygon, orbit: Sequence[tuple[Vec, int]]) -> list[Floor]:
    bk = polygon.backend
    scale = bk.sqrt(dot(orbit[0][0], orbit[0][0]))
    floors: list[Floor] = []
    cursor: Number = bk.coerce(0)
    for side, edge in enumerate(polygon.edges):
        for index, (d, parity) in enumerate(orbit):
            lam = cross(edge, d)
            if bk.sign(lam) <= 0:
                continue
            mu = FloorLength(polygon.side_lengths[side], _factor_tag(edge, d), lam, scale)
            floors.append(Floor(side, d, index, parity, cursor, lam, mu))
            cursor = cursor + lam
    return floors


def _floor_for(floors: Sequence[Floor], side: int, direction: Vec, polygon: Polygon) -> Floor:
    for f in floors:
        if f.side == side and _same_direction(f.direction, direction, polygon.backend):
            return f
    raise InvalidPhasePoint("direction is not in the dihedral orbit", side=side,
                            direction=[format_scalar(c) for c in direction])


def _cells(polygon: Polygon, floor: Floor, floors: Sequence[Floor]) -> list[Piece]:
    """Partition a floor by the preimages of corners and map each cell onto its target floor."""

    bk = polygon.backend
    i, d = floor.side, floor.direction
    a_i, e_i = polygon.vertices[i], polygon.edges[i]
    lam = floor.length
    cuts = {bk.coerce(0), bk.coerce(1)}
    for v in polygon.vertices:
        t = cross(sub(v, a_i), d) / lam
        if not (bk.sign(t) > 0 and bk.sign(1 - t) > 0):
            continue
        foot = (a_i[0] + t * e_i[0], a_i[1] + t * e_i[1])
        if bk.sign(dot(sub(v, foot), d)) > 0:
            cuts.add(t)
    ordered = sorted(cuts)

    cells: list[tuple[Number, Number, int]] = []
    for lo, hi in zip(ordered, ordered[1:]):
        mid = (lo + hi) / 2
        origin = (a_i[0] + mid * e_i[0], a_i[1] + mid * e_i[1])
        hit = _first_hit(polygon, origin, d, (i,))
        if hit is None:
            raise InvalidPhasePoint("ray never meets the boundary", side=i)
        j = hit[0]
        if cells and cells[-1][2] == j and cells[-1][1] == lo:
            cells[-1] = (cells[-1][0], hi, j)
        else:
            cells.append((lo, hi, j))

    pieces = []
    for n, (lo, hi, j) in enumerate(cells):
        a_j, e_j = polygon.vertices[j], polygon.edges[j]
        denom = cross(e_j, d)
        target = _floor_for(floors, j, reflect(d, e_j), polygon)
        ends = []
        for t in (lo, hi):
            s = cross(sub((a_i[0] + t * e_i[0], a_i[1] + t * e_i[1]), a_j), d) / denom
            ends.append((floor.coordinate(t), target.coordinate(s)))
        (x0, y0), (x1, y1) = ends
        start, image = (x0, y0) if x0 < x1 else (x1, y1)
        pieces.append(
            Piece(floor.start + start, abs(x1 - x0), target.start + image,
                  f"{floor.label}#{n}", target.label)
        )
    return pieces


def reduce_to_iet(
    polygon: Polygon,
    theta: Direction,
    angles: RationalAngleData,
    probe_depth: int = PROBE_DEPTH,
) -> PiecewiseIsometry:
    """The billiard map in the directions of ``theta``'s orbit as a piecewise translation of I."""

    if not angles.rational:
        raise IrrationalPolygon(
            "interval exchange reduction needs a rational polygon",
            corners=[c.index for c in angles.corners if c.suspect],
        )
    base = as_direction(polygon, theta)
    N = angles.N
    orbit = _direction_orbit_with_parity(polygon, base, 2 * N + 1)
    if len(orbit) != 2 * N:
        raise DegenerateDirection("direction orbit does not have 2N elements", N=N, size=len(orbit))
    for side, edge in enumerate(polygon.edges):
        for d, _ in orbit:
            if polygon.backend.is_zero(cross(edge, d)):
                raise DegenerateDirection("an orbit direction is parallel to a side", side=side)
    diagonals = find_generalized_diagonals(polygon, base, probe_depth, angles)
    if diagonals:
        raise ExceptionalDirection(
            "a generalized diagonal runs in this direction",
            depth=probe_depth,
            diagonal=diagonals[0],
        )

    floors = _build_floors(polygon, orbit)
    total = floors[-1].end
    pieces = [piece for floor in floors for piece in _cells(polygon, floor, floors)]
    reduction = PiecewiseIsometry(total, tuple(pieces), tuple(floors))
    domain_gap, range_gap = reduction.balance()
    if polygon.backend.exact and (domain_gap or range_gap):
        raise UnbalancedMap("reduction does not cover I", undefined_domain=format_scalar(domain_gap),
                            undefined_range=format_scalar(range_gap))
    logger.info("%s: reduced to %s floors and %s pieces", polygon.name, len(floors), len(pieces))
    return reduction


def phase_to_interval(reduction: PiecewiseIsometry, polygon: Polygon, u: PhasePoint) -> Number:
    """Position in I of a phase point whose direction lies in the reduction's orbit."""

    floor = _floor_for(reduction.floors, u.foot.side_index, u.direction, polygon)
    return floor.start + floor.coordinate(u.foot.t)


def interval_to_phase(reduction: PiecewiseIsometry, polygon: Polygon, x: Number) -> PhasePoint:
    floor = reduction.floor_at(x)
    t = floor.side_parameter(x - floor.start)
    return PhasePoint(polygon.point_on_side(floor.side, t), floor.direction)


def _close(a: Number, b: Number, exact: bool) -> bool:
    return a == b if exact else abs(a - b) <= IET_EPSILON


def complete_to_iet(partial: PiecewiseIsometry) -> IntervalExchange:
    """Fill the undefined part left to right: the k-th domain gap onto the k-th range gap, split as needed."""

    domain_gaps = partial.domain_gaps()
    range_gaps = partial.range_gaps()
    exact = _is_exact(partial.total, *(p.length for p in partial.pieces))
    domain_total, range_total = partial.balance()
    if not _close(domain_total, range_total, exact):
        raise UnbalancedMap(
            "undefined domain and range have different lengths",
            undefined_domain=format_scalar(domain_total),
            undefined_range=format_scalar(range_total),
        )

    fillers: list[Piece] = []
    di = ri = 0
    d_start, d_left = domain_gaps[0] if domain_gaps else (0, 0)
    r_start, r_left = range_gaps[0] if range_gaps else (0, 0)
    while di < len(domain_gaps) and ri < len(range_gaps):
        take = min(d_left, r_left)
        if take > (0 if exact else IET_EPSILON):
            fillers.append(Piece(d_start, take, r_start, f"gap{len(fillers)}", "gap"))
        d_start, d_left = d_start + take, d_left - take
        r_start, r_left = r_start + take, r_left - take
        if d_left <= (0 if exact else IET_EPSILON):
            di += 1
            if di < len(domain_gaps):
                d_start, d_left = domain_gaps[di]
        if r_left <= (0 if exact else IET_EPSILON):
            ri += 1
            if ri < len(range_gaps):
                r_start, r_left = range_gaps[ri]

    pieces = sorted([*partial.pieces, *fillers], key=lambda p: p.domain_start)
    by_image = sorted(range(len(pieces)), key=lambda i: pieces[i].image_start)
    permutation = [0] * len(pieces)
    for position, i in enumerate(by_image):
        permutation[i] = position
    iet = IntervalExchange(
        tuple(p.length for p in pieces),
        tuple(permutation),
        tuple(p.label or str(i) for i, p in enumerate(pieces)),
    )
    logger.debug("Completed %s pieces with %s fillers", len(partial.pieces), len(fillers))
    return iet


def saddle_connection_probe(iet: IntervalExchange, depth: int) -> list[SaddleConnection]:
    """Follow every discontinuity forward for up to ``depth`` steps; report the first return onto one."""

    if depth < 1:
        raise ValueError("depth must be at least 1")
    breaks = iet.discontinuities
    exact = iet.exact
    found = []
    for start, point in enumerate(breaks):
        x = point
        for step in range(1, depth + 1):
            x = iet(x)
            hit = None
            for end, target in enumerate(breaks):
                residual = 0.0 if exact else abs(float(x) - float(target))
                if (exact and x == target) or (not exact and residual <= PROBE_EPSILON):
                    hit = SaddleConnection(start, end, step, residual)
                    break
            if hit is not None:
                found.append(hit)
                break
    logger.debug("Saddle probe at depth %s: %s connections", depth, len(found))
    return found


__all__ = [
    "Floor",
    "FloorLength",
    "IntervalExchange",
    "Piece",
    "PiecewiseIsometry",
    "SaddleConnection",
    "complete_to_iet",
    "interval_to_phase",
    "phase_to_interval",
    "reduce_to_iet",
    "saddle_connection_probe",
]
