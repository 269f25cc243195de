from __future__ import annotations

import argparse

from ..errors import EXIT_NEGATIVE, EXIT_OK
from ..dynamics import find_generalized_diagonals
from . import registry
from .helpers import ExperimentConfig, add_backend, add_direction, add_report, direction_arg, emit_json


def configure(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--polygon", required=True, help="polygon JSON file")
    add_direction(parser)
    parser.add_argument("--depth", type=int, default=4, help="largest number of chords searched")
    add_backend(parser)
    add_report(parser)


@registry.command("diagonals", help="search corner-to-corner trajectories in the orbit of a direction",
                  configure=configure)
def diagonals(args: argparse.Namespace) -> int:
    config = ExperimentConfig.from_args(args, polygons=("polygon",))
    (polygon,) = config.load_polygons()
    found = find_generalized_diagonals(polygon, direction_arg(args, polygon), args.depth)
    emit_json({"polygon": polygon.name, "depth": args.depth, "exceptional": bool(found),
               "diagonals": [d.to_dict() for d in found]}, args.report)
    return EXIT_OK if found else EXIT_NEGATIVE
