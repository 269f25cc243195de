from __future__ import annotations

import argparse

from ..config import DEFAULT_HORIZON, GAP_FACTOR
from ..dynamics import classify_orbit, generate_orbit
from ..errors import EXIT_OK, EXIT_ORBIT_TERMINATED
from ..geometry import rational_angle_analysis
from . import registry
from .helpers import ExperimentConfig, add_backend, add_leader, add_report, emit_json


def configure(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--polygon", required=True, help="polygon JSON file")
    add_leader(parser)
    parser.add_argument("--steps", type=int, default=DEFAULT_HORIZON, help="orbit length to inspect")
    parser.add_argument("--gap-factor", type=float, default=GAP_FACTOR,
                        help="a side counts as covered when max gap x footpoints stays below this")
    add_backend(parser)
    add_report(parser)


@registry.command("classify", help="heuristic periodic / flat strip / dense classification of an orbit",
                  configure=configure)
def classify(args: argparse.Namespace) -> int:
    config = ExperimentConfig.from_args(args, polygons=("polygon",), leaders=("",))
    (polygon,) = config.load_polygons()
    angles = rational_angle_analysis(polygon)
    record = generate_orbit(polygon, config.leaders[0].resolve(polygon), config.steps)
    if not record.termination.completed:
        emit_json({"polygon": polygon.name, "termination": str(record.termination)}, args.report)
        return EXIT_ORBIT_TERMINATED
    result = classify_orbit(record, angles, polygon, args.gap_factor)
    emit_json({"polygon": polygon.name, "angles": angles.to_dict(), "result": result.to_dict(),
               "within_direction_bound": record.within_direction_bound(angles)}, args.report)
    return EXIT_OK
