"""Orbit CSV files: one row per footpoint x_1 .. x_n of the orbit.

An orbit that stops early gets one extra row at the failing step holding the
corner (or tangency point) with an empty ``theta``. Directions are not stored;
the reader rebuilds them from the chords between consecutive footpoints and
recovers the leader by stepping back from the first row.
"""
from __future__ import annotations

import csv
import logging
from pathlib import Path

from .dynamics import OrbitRecord, PhasePoint, Termination, billiard_step_back
from .errors import IoFailure, MalformedInput, OrbitTerminated
from .geometry import BoundaryPoint, Polygon
from .order import FootprintSequence
from .scalars import EXACT, FLOAT, format_scalar, parse_scalar, reflect, sub

logger = logging.getLogger(__name__)

COLUMNS = ["index", "side", "offset", "arclength", "theta", "x", "y", "termination"]


def _row(index: int, foot: BoundaryPoint, theta: float | None, termination: str) -> dict[str, str]:
    return {
        "index": str(index),
        "side": str(foot.side_index),
        "offset": format_scalar(foot.offset),
        "arclength": format_scalar(foot.arclength),
        "theta": "" if theta is None else format(theta, ".17g"),
        "x": format_scalar(foot.point[0]),
        "y": format_scalar(foot.point[1]),
        "termination": termination,
    }


def write_orbit_csv(record: OrbitRecord, path: str | Path) -> Path:
    path = Path(path)
    steps = record.steps
    rows = [_row(i, p.foot, p.theta, "") for i, p in enumerate(steps, start=1)]
    if record.termination.completed or record.stopped_at is None:
        if rows:
            rows[-1]["termination"] = str(record.termination)
    else:
        rows.append(_row(record.termination.step, record.stopped_at, None, str(record.termination)))
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.DictWriter(fh, fieldnames=COLUMNS, lineterminator="\n")
            writer.writeheader()
            writer.writerows(rows)
    except OSError as exc:
        raise IoFailure(f"cannot write orbit CSV {path}: {exc.strerror}", path=str(path)) from None
    logger.info("Wrote %s rows to %s", len(rows), path)
    return path


def _read_rows(path: str | Path) -> list[dict[str, str]]:
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            missing = set(COLUMNS) - set(reader.fieldnames or [])
            if missing:
                raise MalformedInput(f"orbit CSV {path} lacks columns {sorted(missing)}")
            rows = list(reader)
    except OSError as exc:
        raise IoFailure(f"cannot read orbit CSV {path}: {exc.strerror}", path=str(path)) from None
    except csv.Error as exc:
        raise MalformedInput(f"orbit CSV {path} is not valid CSV: {exc}") from None
    if not rows:
        raise MalformedInput(f"orbit CSV {path} has no rows")
    return rows


def _split_stop(rows: list[dict[str, str]]) -> tuple[list[dict[str, str]], dict[str, str] | None, Termination]:
    """Footpoint rows, the early-stop row if any, and the termination."""

    termination = Termination.parse(rows[-1].get("termination") or "")
    if not termination.completed and not rows[-1].get("theta"):
        return rows[:-1], rows[-1], termination
    return rows, None, termination


def _foot(row: dict[str, str], polygon: Polygon, path: str | Path) -> BoundaryPoint:
    bk = polygon.backend
    try:
        side = int(row["side"])
        xy = (parse_scalar(row["x"], bk), parse_scalar(row["y"], bk))
    except (KeyError, TypeError, ValueError):
        raise MalformedInput(f"bad orbit row {row.get('index')!r} in {path}") from None
    if not 0 <= side < polygon.size:
        raise MalformedInput(f"side {side} out of range in {path}", row=row.get("index"))
    return polygon.locate(side, xy)


def read_orbit_csv(path: str | Path, polygon: Polygon) -> OrbitRecord:
    """Rebuild the OrbitRecord written by ``write_orbit_csv`` for the same polygon.

    Footpoints come back exactly; directions come back as chord vectors, i.e. up to a
    positive factor.
    """

    rows, stop_row, termination = _split_stop(_read_rows(path))
    feet = [_foot(row, polygon, path) for row in rows]
    if not feet:
        raise MalformedInput(f"orbit CSV {path} stops before its first footpoint; the leader is lost")
    stopped_at = _foot(stop_row, polygon, path) if stop_row is not None else None
    targets = [f.point for f in feet[1:]]
    if termination.kind == "CornerHit" and stopped_at is not None:
        targets.append(stopped_at.point)
    directions = [sub(target, foot.point) for foot, target in zip(feet, targets)]
    if len(directions) < len(feet):
        if len(feet) < 2:
            raise MalformedInput(f"orbit CSV {path} needs two footpoints to rebuild directions")
        incoming = sub(feet[-1].point, feet[-2].point)
        directions.append(reflect(incoming, polygon.edges[feet[-1].side_index]))
    points = [PhasePoint(foot, d) for foot, d in zip(feet, directions)]
    try:
        start = billiard_step_back(polygon, points[0])
    except OrbitTerminated as exc:
        raise MalformedInput(f"orbit CSV {path} does not fit polygon {polygon.name}: {exc.message}") from None
    return OrbitRecord(polygon.name, polygon.backend, start, tuple(points), termination, stopped_at)


def read_footprints(
    path: str | Path, polygon: Polygon | None = None, exact: bool = True
) -> FootprintSequence:
    """Arclength column of an orbit CSV.

    Without a polygon the perimeter is unknown; any bound above the largest value
    orders the points the same way, so twice the maximum is used.
    """

    rows, _, _ = _split_stop(_read_rows(path))
    bk = EXACT if exact else FLOAT
    values = [parse_scalar(row["arclength"], bk) for row in rows]
    if polygon is not None:
        return FootprintSequence(polygon.perimeter, tuple(values), polygon.name, polygon.backend.eps)
    if not exact:
        logger.warning(
            "%s: no polygon given, so points near 0 and near the perimeter are not matched within epsilon",
            Path(path).name,
        )
    bound = 2 * max(values, default=0) or 1
    return FootprintSequence(bound, tuple(values), Path(path).stem, bk.eps)


__all__ = ["COLUMNS", "read_footprints", "read_orbit_csv", "write_orbit_csv"]
