from __future__ import annotations

import argparse
import logging

from ..config import MAX_DENOMINATOR
from ..errors import EXIT_OK
from ..geometry import rational_angle_analysis
from . import registry
from .helpers import ExperimentConfig, add_backend, add_report, emit_json

logger = logging.getLogger(__name__)


def configure(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--polygon", required=True, help="polygon JSON file")
    parser.add_argument("--max-denominator", type=int, default=MAX_DENOMINATOR,
                        help="largest n tried for angles πm/n (default: %(default)s)")
    add_backend(parser)
    add_report(parser)


@registry.command("analyze", help="report corner angles as rational multiples of π", configure=configure)
def analyze(args: argparse.Namespace) -> int:
    config = ExperimentConfig.from_args(args, polygons=("polygon",))
    (polygon,) = config.load_polygons()
    angles = rational_angle_analysis(polygon, args.max_denominator)
    if not angles.rational and not polygon.backend.exact:
        logger.warning("%s has irrational-suspect corners; float results depend on EPSILON", polygon.name)
    emit_json({"polygon": polygon.to_dict(), "angles": angles.to_dict(),
               "exact_lengths": polygon.exact_lengths}, args.report)
    return EXIT_OK
