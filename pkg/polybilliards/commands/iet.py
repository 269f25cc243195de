from __future__ import annotations

import argparse

from ..config import PROBE_DEPTH
from ..errors import EXIT_OK
from ..geometry import rational_angle_analysis
from ..iet import complete_to_iet, reduce_to_iet, saddle_connection_probe
from . import registry
from .helpers import ExperimentConfig, add_backend, add_direction, add_report, direction_arg, emit_json


def configure(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--polygon", required=True, help="polygon JSON file")
    add_direction(parser)
    parser.add_argument("--probe-depth", type=int, default=PROBE_DEPTH,
                        help="diagonal search depth that marks a direction exceptional")
    parser.add_argument("--saddle-depth", type=int, default=50, help="iterations for the saddle-connection probe")
    parser.add_argument("--floors", help="comma-separated floor labels to restrict to (the ghost map)")
    add_backend(parser)
    add_report(parser)


@registry.command("iet", help="reduce a fixed-direction billiard to an interval exchange", configure=configure)
def iet(args: argparse.Namespace) -> int:
    config = ExperimentConfig.from_args(args, polygons=("polygon",))
    (polygon,) = config.load_polygons()
    angles = rational_angle_analysis(polygon)
    reduction = reduce_to_iet(polygon, direction_arg(args, polygon), angles, args.probe_depth)
    partial = reduction.restrict(args.floors.split(",")) if args.floors else reduction
    exchange = complete_to_iet(partial)
    probe = saddle_connection_probe(exchange, args.saddle_depth)
    emit_json(
        {
            "polygon": polygon.name,
            "reduction": partial.to_dict(),
            "iet": exchange.to_dict(),
            "probe": {"depth": args.saddle_depth, "connections": [c.to_dict() for c in probe]},
        },
        args.report,
    )
    return EXIT_OK
