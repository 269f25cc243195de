from __future__ import annotations

import json
import logging
from fractions import Fraction
from pathlib import Path

import pytest

from polybilliards.geometry import Polygon, make_polygon
from polybilliards.scalars import EXACT, FLOAT

SQUARE = [[0, 0], [1, 0], [1, 1], [0, 1]]
RECTANGLE = [[0, 0], [2, 0], [2, 1], [0, 1]]
RIGHT_ISOCELES = [[0, 0], [1, 0], [0, 1]]


@pytest.fixture
def square() -> Polygon:
    return make_polygon(SQUARE, EXACT, "square")


@pytest.fixture
def float_square() -> Polygon:
    return make_polygon(SQUARE, FLOAT, "square")


@pytest.fixture
def rectangle() -> Polygon:
    return make_polygon(RECTANGLE, EXACT, "rectangle")


@pytest.fixture
def float_rectangle() -> Polygon:
    return make_polygon(RECTANGLE, FLOAT, "rectangle")


@pytest.fixture
def right_isoceles() -> Polygon:
    return make_polygon(RIGHT_ISOCELES, EXACT, "right-isoceles")


@pytest.fixture
def thirty_sixty() -> Polygon:
    return make_polygon([[0, 0], [1, 0], [0, 3 ** 0.5]], FLOAT, "30-60-90")


@pytest.fixture
def irrational_triangle() -> Polygon:
    return make_polygon([[0, 0], [3, 0], [0, 1]], EXACT, "arctan-third")


@pytest.fixture
def polygon_file(tmp_path: Path):
    """Write a polygon JSON file and return its path."""

    def _write(vertices, name: str = "polygon") -> Path:
        path = tmp_path / f"{name}.json"
        payload = [[str(Fraction(x)) if isinstance(x, Fraction) else x for x in v] for v in vertices]
        path.write_text(json.dumps({"vertices": payload}), encoding="utf-8")
        return path

    return _write


@pytest.fixture(autouse=True, scope="session")
def _quiet_root_logger():
    """Keep run_command from binding a stderr handler to a capture stream."""

    root = logging.getLogger()
    root._polybilliards_configured = True
    yield
    root._polybilliards_configured = False
