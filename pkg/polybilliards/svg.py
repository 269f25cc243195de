from __future__ import annotations

import logging
from pathlib import Path

from jinja2 import Environment, FileSystemLoader, StrictUndefined

from .dynamics import OrbitRecord
from .errors import IoFailure
from .geometry import Polygon

logger = logging.getLogger(__name__)

TEMPLATES_DIR = Path(__file__).resolve().parent / "templates"
CANVAS = 600


def _num(value: float) -> str:
    text = f"{float(value):.6f}".rstrip("0").rstrip(".")
    return "0" if text in ("", "-0") else text


templates = Environment(
    loader=FileSystemLoader(str(TEMPLATES_DIR)),
    undefined=StrictUndefined,
    keep_trailing_newline=True,
    autoescape=True,
)
templates.filters["num"] = _num


def render_svg(polygon: Polygon, record: OrbitRecord, max_chords: int | None = None) -> str:
    """SVG text with the polygon outline and the orbit's chords (y axis pointing up)."""

    points = record.phase_points()
    if len(points) < 2:
        raise ValueError("orbit record has no chords to draw")
    xs = [float(x) for x, _ in polygon.vertices]
    ys = [float(y) for _, y in polygon.vertices]
    span = max(max(xs) - min(xs), max(ys) - min(ys))
    pad = span * 0.05
    feet = [tuple(float(c) for c in p.foot.point) for p in points]
    chords = list(zip(feet, feet[1:]))
    if max_chords is not None:
        chords = chords[:max_chords]
    context = {
        "title": f"{polygon.name}: {len(chords)} chords, {record.termination}",
        "width": CANVAS,
        "height": CANVAS,
        "view_box": " ".join(
            _num(v) for v in (min(xs) - pad, -(max(ys) + pad), span + 2 * pad, span + 2 * pad)
        ),
        "outline": [f"{_num(x)},{_num(y)}" for x, y in zip(xs, ys)],
        "chords": chords,
        "start": feet[0],
        "stroke": span / 200,
        "chord_color": "#1f5fa8",
        "opacity": 1.0 if len(chords) <= 200 else max(0.05, 200 / len(chords)),
    }
    return templates.get_template("orbit.svg.j2").render(**context)


def emit_svg(polygon: Polygon, record: OrbitRecord, path: str | Path) -> Path:
    path = Path(path)
    text = render_svg(polygon, record)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"cannot write SVG {path}: {exc.strerror}", path=str(path)) from None
    logger.info("Wrote SVG plot to %s", path)
    return path


__all__ = ["emit_svg", "render_svg"]
