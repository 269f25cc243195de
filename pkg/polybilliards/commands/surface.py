from __future__ import annotations

import argparse
import math

from ..errors import EXIT_OK
from ..geometry import rational_angle_analysis
from ..surface import build_surface
from . import registry
from .helpers import ExperimentConfig, add_backend, add_report, emit_json


def configure(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--polygon", required=True, help="polygon JSON file")
    parser.add_argument("--test-angle-deg", type=float, help="test direction relative to side 0 (default: 180/(4N))")
    add_backend(parser)
    add_report(parser)


@registry.command("surface", help="glue 2N copies of a rational polygon and report genus and cone points",
                  configure=configure)
def surface(args: argparse.Namespace) -> int:
    config = ExperimentConfig.from_args(args, polygons=("polygon",))
    (polygon,) = config.load_polygons()
    angles = rational_angle_analysis(polygon)
    test_angle = None if args.test_angle_deg is None else math.radians(args.test_angle_deg)
    gluing = build_surface(polygon, angles, test_angle)
    emit_json(gluing.to_dict(), args.report)
    return EXIT_OK
