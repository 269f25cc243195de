"""Cyclic order of boundary footpoints and the finite correspondence between two boundaries."""
from __future__ import annotations

import logging
import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Sequence

from .config import DEFAULT_HORIZON
from .dynamics import OrbitRecord
from .errors import DuplicateAmbiguity, LowCoverage, OrderMismatch
from .geometry import Polygon
from .scalars import Number, format_scalar

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FootprintSequence:
    perimeter: Number
    points: tuple[Number, ...]
    source: str = ""
    tolerance: float = 0.0

    def __len__(self) -> int:
        return len(self.points)

    @classmethod
    def from_record(
        cls, record: OrbitRecord, polygon: Polygon, coordinate: str = "arclength"
    ) -> "FootprintSequence":
        """Footpoints x_0, x_1, ... of an orbit.

        ``coordinate="parameter"`` uses ``side_index + t`` on a boundary of length
        ``k``; it is exact for every polygon and orders points like arclength does.
        """

        feet = [p.foot for p in record.phase_points()]
        if coordinate == "parameter":
            return cls(polygon.size, tuple(f.parameter for f in feet), polygon.name, record.backend.eps)
        if coordinate != "arclength":
            raise ValueError(f"unknown coordinate {coordinate!r}")
        return cls(polygon.perimeter, tuple(f.arclength for f in feet), polygon.name, record.backend.eps)


@dataclass(frozen=True)
class OrderWitness:
    """Index triple (k, l, m) where ``x_k ∈ [x_l, x_m]`` and ``y_k ∈ [y_l, y_m]`` disagree."""

    k: int
    l: int
    m: int
    in_p: bool
    in_q: bool

    def __bool__(self) -> bool:
        return False

    @property
    def triple(self) -> tuple[int, int, int]:
        return (self.k, self.l, self.m)

    def to_dict(self) -> dict:
        return {"triple": list(self.triple), "in_p": self.in_p, "in_q": self.in_q}


def _circ_eq(u: Number, v: Number, perimeter: Number, tol: float) -> bool:
    if tol == 0:
        return u == v
    gap = abs(u - v) % perimeter
    return min(gap, perimeter - gap) <= tol


def in_arc(x: Number, a: Number, b: Number, perimeter: Number, tol: float = 0.0) -> bool:
    """Whether ``x`` lies on the closed counterclockwise arc from ``a`` to ``b``; ``[a, a] = {a}``."""

    if _circ_eq(a, b, perimeter, tol):
        return _circ_eq(x, a, perimeter, tol)
    if _circ_eq(x, a, perimeter, tol) or _circ_eq(x, b, perimeter, tol):
        return True
    if a < b:
        return a < x < b
    return x > a or x < b


def _group_ids(values: Sequence[Number], perimeter: Number, tol: float) -> list[int]:
    """For each index, the first index holding the same boundary point."""

    if tol == 0:
        first: dict[Number, int] = {}
        return [first.setdefault(v, i) for i, v in enumerate(values)]
    order = sorted(range(len(values)), key=lambda i: values[i])
    clusters: list[list[int]] = []
    for i in order:
        if clusters and values[i] - values[clusters[-1][-1]] <= tol:
            clusters[-1].append(i)
        else:
            clusters.append([i])
    if len(clusters) > 1:
        head, tail = clusters[0], clusters[-1]
        if values[head[0]] + perimeter - values[tail[-1]] <= tol:
            clusters[0] = tail + head
            clusters.pop()
    ids = [0] * len(values)
    for cluster in clusters:
        rep = min(cluster)
        for i in cluster:
            ids[i] = rep
    return ids


def _witness(a: FootprintSequence, b: FootprintSequence, k: int, l: int, m: int) -> OrderWitness:
    return OrderWitness(
        k,
        l,
        m,
        in_arc(a.points[k], a.points[l], a.points[m], a.perimeter, a.tolerance),
        in_arc(b.points[k], b.points[l], b.points[m], b.perimeter, b.tolerance),
    )


def _check_horizon(a: FootprintSequence, b: FootprintSequence, horizon: int) -> None:
    if horizon < 3:
        raise ValueError("horizon must be at least 3")
    if len(a) < horizon or len(b) < horizon:
        raise ValueError(f"sequences have {len(a)} and {len(b)} points, fewer than horizon {horizon}")


def same_combinatorial_order(
    a: FootprintSequence, b: FootprintSequence, horizon: int = DEFAULT_HORIZON
) -> bool | OrderWitness:
    """``True`` when the first ``horizon`` footpoints are in the same cyclic order, else a witness.

    Compares circular rank orders in O(n log n); coincident footpoints are ranked by
    first occurrence so both sides dedupe identically.
    """

    _check_horizon(a, b, horizon)
    xa, xb = a.points[:horizon], b.points[:horizon]
    ga = _group_ids(xa, a.perimeter, a.tolerance)
    gb = _group_ids(xb, b.perimeter, b.tolerance)
    for i in range(horizon):
        if ga[i] == gb[i]:
            continue
        j = ga[i] if ga[i] != i else gb[i]
        if a.tolerance or b.tolerance:
            raise DuplicateAmbiguity(
                "footpoints coincide in one sequence only", indices=[j, i],
                p=[format_scalar(xa[j]), format_scalar(xa[i])],
                q=[format_scalar(xb[j]), format_scalar(xb[i])],
            )
        return _witness(a, b, i, j, j)

    reps = sorted(set(ga))
    order_a = sorted(reps, key=lambda r: xa[r])
    order_b = sorted(reps, key=lambda r: xb[r])
    shift = order_b.index(order_a[0])
    rotated = order_b[shift:] + order_b[:shift]
    for j, (ra, rb) in enumerate(zip(order_a, rotated)):
        if ra != rb:
            # a: order_a[0] .. ra .. rb   b: order_a[0] .. rb .. ra
            return _witness(a, b, ra, order_a[0], rb)
    return True


def same_combinatorial_order_exhaustive(
    a: FootprintSequence, b: FootprintSequence, horizon: int
) -> bool | OrderWitness:
    """O(n³) check of every index triple; the slow path used to cross-validate the comparator."""

    _check_horizon(a, b, horizon)
    for k in range(horizon):
        for l in range(horizon):
            for m in range(horizon):
                w = _witness(a, b, k, l, m)
                if w.in_p != w.in_q:
                    return w
    return True


def agreement_horizon(a: FootprintSequence, b: FootprintSequence, limit: int | None = None) -> int:
    """Largest n such that the first n footpoints are in the same combinatorial order.

    Agreement at n implies agreement below n, so a binary search suffices.
    """

    hi = min(len(a), len(b)) if limit is None else min(limit, len(a), len(b))
    if hi < 3:
        return hi
    if _agrees(a, b, hi):
        return hi
    lo = 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _agrees(a, b, mid):
            lo = mid
        else:
            hi = mid
    return lo


def _agrees(a: FootprintSequence, b: FootprintSequence, n: int) -> bool:
    try:
        return bool(same_combinatorial_order(a, b, n))
    except DuplicateAmbiguity:
        return False


def largest_gap(values: Sequence[Number], perimeter: Number) -> Number:
    """Largest circular gap between consecutive values."""

    if not values:
        return perimeter
    ordered = sorted(set(values))
    gaps = [y - x for x, y in zip(ordered, ordered[1:])]
    gaps.append(ordered[0] + perimeter - ordered[-1])
    return max(gaps)


@dataclass(frozen=True)
class Correspondence:
    """Circularly monotone samples (s_i, t_i) of φ with piecewise-linear interpolation."""

    perimeter_p: Number
    perimeter_q: Number
    pairs: tuple[tuple[Number, Number], ...]

    def __call__(self, x: Number) -> Number:
        pairs = self.pairs
        n = len(pairs)
        x = x % self.perimeter_p
        i = bisect_right([s for s, _ in pairs], x) - 1
        s0, t0 = pairs[i]
        s1, t1 = pairs[(i + 1) % n]
        if i < 0:
            s0 = s0 - self.perimeter_p
        if i == n - 1:
            s1 = s1 + self.perimeter_p
        dt = (t1 - t0) % self.perimeter_q
        if n == 1:
            dt = self.perimeter_q
        if x == s0:
            return t0
        return (t0 + (x - s0) / (s1 - s0) * dt) % self.perimeter_q

    def coverage(self) -> tuple[Number, Number]:
        """Largest footpoint gap on each boundary."""

        return (
            largest_gap([s for s, _ in self.pairs], self.perimeter_p),
            largest_gap([t for _, t in self.pairs], self.perimeter_q),
        )


def build_correspondence(a: FootprintSequence, b: FootprintSequence) -> Correspondence:
    """Finite approximation of the boundary homeomorphism matching x_n to y_n."""

    n = min(len(a), len(b))
    if n >= 3:
        result = same_combinatorial_order(a, b, n)
        if not result:
            raise OrderMismatch("sequences are not in the same combinatorial order", witness=result)
    ga = _group_ids(a.points[:n], a.perimeter, a.tolerance)
    reps = sorted(set(ga), key=lambda r: a.points[r])
    pairs = tuple((a.points[r], b.points[r]) for r in reps)
    return Correspondence(a.perimeter, b.perimeter, pairs)


@dataclass(frozen=True)
class CornerMatch:
    corner: int
    image: float
    nearest: int
    distance: float
    angle_difference: float

    def to_dict(self) -> dict:
        return {
            "corner": self.corner,
            "image": self.image,
            "nearest_corner": self.nearest,
            "distance": self.distance,
            "angle_difference": self.angle_difference,
        }


@dataclass(frozen=True)
class QuasisimilarityReport:
    corners: tuple[CornerMatch, ...]
    side_ratios: tuple[tuple[int, int | None, float | None], ...]
    affine_ratios: dict
    coverage: tuple[float, float]
    similar: bool
    affinely_similar: bool

    @property
    def corners_preserved(self) -> bool:
        return len({c.nearest for c in self.corners}) == len(self.corners)

    def to_dict(self) -> dict:
        return {
            "corners": [c.to_dict() for c in self.corners],
            "corners_preserved": self.corners_preserved,
            "side_ratios": [
                {"side_p": i, "side_q": j, "ratio": r} for i, j, r in self.side_ratios
            ],
            "affine_ratios": self.affine_ratios,
            "coverage": {"max_gap_p": self.coverage[0], "max_gap_q": self.coverage[1]},
            "similar": self.similar,
            "affinely_similar": self.affinely_similar,
        }


def _all_close(values: Sequence[float], rel: float = 1e-6) -> bool:
    return all(math.isclose(v, values[0], rel_tol=rel) for v in values)


def check_quasisimilarity(corr: Correspondence, p: Polygon, q: Polygon, tol: float) -> QuasisimilarityReport:
    """Compare the images of P's corners under φ with the corners of Q."""

    gap_p, gap_q = (float(g) for g in corr.coverage())
    if max(gap_p, gap_q) > tol:
        raise LowCoverage("orbit footpoints leave gaps larger than the tolerance",
                          max_gap_p=gap_p, max_gap_q=gap_q, tol=tol)
    perim_q = float(q.perimeter)
    q_corners = [float(c) for c in q.cumulative]
    matches = []
    for i, s in enumerate(p.cumulative):
        y = float(corr(s))
        best_j, best_d = 0, math.inf
        for j, c in enumerate(q_corners):
            gap = abs(y - c) % perim_q
            d = min(gap, perim_q - gap)
            if d < best_d:
                best_j, best_d = j, d
        matches.append(CornerMatch(i, y, best_j, best_d, p.corner_angles[i] - q.corner_angles[best_j]))

    ratios = []
    for i in range(p.size):
        j, j_next = matches[i].nearest, matches[(i + 1) % p.size].nearest
        if j_next == (j + 1) % q.size:
            ratios.append((i, j, float(q.side_lengths[j]) / float(p.side_lengths[i])))
        else:
            ratios.append((i, None, None))

    classes: dict[str, list[float]] = {}
    for i, _, r in ratios:
        if r is not None:
            key = format(round(p.side_angles[i] % math.pi, 6) % round(math.pi, 6), ".6f")
            classes.setdefault(key, []).append(r)
    known = [r for _, _, r in ratios if r is not None]
    complete = len(known) == p.size
    report = QuasisimilarityReport(
        corners=tuple(matches),
        side_ratios=tuple(ratios),
        affine_ratios={k: v[0] if _all_close(v) else v for k, v in classes.items()},
        coverage=(gap_p, gap_q),
        similar=complete and _all_close(known),
        affinely_similar=complete and all(_all_close(v) for v in classes.values()),
    )
    logger.info("Quasisimilarity %s -> %s: similar=%s affine=%s", p.name, q.name,
                report.similar, report.affinely_similar)
    return report


__all__ = [
    "Correspondence",
    "CornerMatch",
    "FootprintSequence",
    "OrderWitness",
    "QuasisimilarityReport",
    "agreement_horizon",
    "build_correspondence",
    "check_quasisimilarity",
    "in_arc",
    "largest_gap",
    "same_combinatorial_order",
    "same_combinatorial_order_exhaustive",
]
