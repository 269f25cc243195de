"""Shared argument handling for the subcommands."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from ..config import DEFAULT_BACKEND, DEFAULT_SEED, EPSILON
from ..dynamics import PhasePoint, leader
from ..errors import IoFailure, MalformedInput, UsageError
from ..geometry import Polygon, direction_from_degrees, read_polygon
from ..scalars import Vec, get_backend, parse_scalar

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LeaderSpec:
    side: int
    offset: str
    angle_deg: float | None = None
    direction: str | None = None

    def resolve(self, polygon: Polygon) -> PhasePoint:
        bk = polygon.backend
        if not 0 <= self.side < polygon.size:
            raise MalformedInput(f"side {self.side} out of range for a {polygon.size}-gon")
        offset = parse_scalar(self.offset, bk)
        if not 0 < offset < polygon.side_lengths[self.side]:
            raise MalformedInput("offset must lie strictly inside the side", offset=self.offset)
        return leader(polygon, self.side, offset, self.vector(polygon))

    def vector(self, polygon: Polygon) -> Vec:
        if self.direction is not None:
            return parse_direction(self.direction, polygon)
        return direction_from_degrees(float(self.angle_deg), polygon.backend)

    def to_dict(self) -> dict:
        return {"side": self.side, "offset": self.offset, "angle_deg": self.angle_deg,
                "direction": self.direction}


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a subcommand needs, validated before it runs."""

    command: str
    polygons: tuple[Path, ...] = ()
    leaders: tuple[LeaderSpec, ...] = ()
    steps: int = 1
    backend: str = DEFAULT_BACKEND
    outputs: dict[str, Path] = field(default_factory=dict)
    tolerance: float = EPSILON
    seed: int = DEFAULT_SEED

    def __post_init__(self) -> None:
        if self.steps < 1:
            raise UsageError("step count must be at least 1", steps=self.steps)
        if not self.tolerance > 0:
            raise UsageError("tolerances must be positive", tolerance=self.tolerance)
        get_backend(self.backend)
        for path in self.polygons:
            if not path.is_file():
                raise IoFailure(f"input file {path} does not exist", path=str(path))
        for name, path in self.outputs.items():
            if path.exists() and path.is_dir():
                raise IoFailure(f"output {name} points at a directory", path=str(path))

    def load_polygons(self) -> list[Polygon]:
        return [read_polygon(path, self.backend) for path in self.polygons]

    @classmethod
    def from_args(cls, args: argparse.Namespace, polygons: tuple[str, ...] = (),
                  leaders: tuple[str, ...] = (), outputs: tuple[str, ...] = ()) -> "ExperimentConfig":
        return cls(
            command=args.command,
            polygons=tuple(Path(getattr(args, name)) for name in polygons),
            leaders=tuple(leader_spec(args, prefix) for prefix in leaders),
            steps=getattr(args, "steps", 1),
            backend=args.backend,
            outputs={name: Path(getattr(args, name)) for name in outputs if getattr(args, name, None)},
            tolerance=getattr(args, "tol", EPSILON),
            seed=getattr(args, "seed", DEFAULT_SEED),
        )


def parse_direction(text: str, polygon: Polygon) -> Vec:
    parts = text.split(",")
    if len(parts) != 2:
        raise MalformedInput(f"direction must be 'dx,dy', got {text!r}")
    dx, dy = (parse_scalar(p, polygon.backend) for p in parts)
    if dx == 0 and dy == 0:
        raise MalformedInput("direction must be nonzero")
    return (dx, dy)


def add_backend(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--backend", choices=["exact", "float"], default=DEFAULT_BACKEND,
                        help="scalar arithmetic (default: %(default)s)")


def add_report(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--report", help="also write the JSON report to this file")


def add_direction(parser: argparse.ArgumentParser, prefix: str = "", required: bool = True) -> None:
    group = parser.add_mutually_exclusive_group(required=required)
    group.add_argument(f"--{prefix}angle-deg", type=float, help="direction angle in degrees")
    group.add_argument(f"--{prefix}direction", help="direction vector 'dx,dy' (exact rationals allowed)")


def add_leader(parser: argparse.ArgumentParser, prefix: str = "") -> None:
    parser.add_argument(f"--{prefix}side", type=int, required=True, help="side index of the leader footpoint")
    parser.add_argument(f"--{prefix}offset", required=True, help="offset along the side, e.g. 1/4")
    add_direction(parser, prefix)


def leader_spec(args: argparse.Namespace, prefix: str = "") -> LeaderSpec:
    key = prefix.replace("-", "_")
    return LeaderSpec(
        side=getattr(args, f"{key}side"),
        offset=getattr(args, f"{key}offset"),
        angle_deg=getattr(args, f"{key}angle_deg"),
        direction=getattr(args, f"{key}direction"),
    )


def direction_arg(args: argparse.Namespace, polygon: Polygon) -> Vec:
    if args.direction is not None:
        return parse_direction(args.direction, polygon)
    return direction_from_degrees(args.angle_deg, polygon.backend)


def emit_json(payload: dict[str, Any], report: str | Path | None = None) -> None:
    text = json.dumps(payload, indent=2, ensure_ascii=False, default=str)
    if report:
        path = Path(report)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text + "\n", encoding="utf-8")
        except OSError as exc:
            raise IoFailure(f"cannot write report {path}: {exc.strerror}", path=str(path)) from None
        logger.info("Report written to %s", path)
    sys.stdout.write(text + "\n")


__all__ = [
    "ExperimentConfig",
    "LeaderSpec",
    "add_backend",
    "add_direction",
    "add_leader",
    "add_report",
    "direction_arg",
    "emit_json",
    "leader_spec",
    "parse_direction",
]
