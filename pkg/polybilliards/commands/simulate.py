from __future__ import annotations

import argparse
import logging

from ..config import DEFAULT_HORIZON
from ..dynamics import generate_orbit
from ..errors import EXIT_OK, EXIT_ORBIT_TERMINATED
from ..orbit_csv import write_orbit_csv
from ..svg import emit_svg
from . import registry
from .helpers import ExperimentConfig, add_backend, add_leader, add_report, emit_json

logger = logging.getLogger(__name__)


def configure(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--polygon", required=True, help="polygon JSON file")
    add_leader(parser)
    parser.add_argument("--steps", type=int, default=DEFAULT_HORIZON, help="number of billiard steps")
    parser.add_argument("--out", required=True, help="orbit CSV to write")
    parser.add_argument("--svg", help="optional SVG plot of the orbit")
    add_backend(parser)
    add_report(parser)


@registry.command("simulate", help="iterate the billiard map and write the orbit CSV", configure=configure)
def simulate(args: argparse.Namespace) -> int:
    config = ExperimentConfig.from_args(args, polygons=("polygon",), leaders=("",), outputs=("out", "svg"))
    (polygon,) = config.load_polygons()
    start = config.leaders[0].resolve(polygon)
    record = generate_orbit(polygon, start, config.steps)
    csv_path = write_orbit_csv(record, config.outputs["out"])
    payload = {
        "polygon": polygon.name,
        "leader": config.leaders[0].to_dict(),
        "steps": len(record.steps),
        "termination": str(record.termination),
        "directions_seen": len(record.directions_seen),
        "csv": str(csv_path),
    }
    if "svg" in config.outputs and record.steps:
        payload["svg"] = str(emit_svg(polygon, record, config.outputs["svg"]))
    emit_json(payload, args.report)
    return EXIT_OK if record.termination.completed else EXIT_ORBIT_TERMINATED
