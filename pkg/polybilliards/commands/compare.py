from __future__ import annotations

import argparse
import logging

from ..config import DEFAULT_HORIZON
from ..errors import EXIT_NEGATIVE, EXIT_OK, InsufficientData
from ..geometry import read_polygon
from ..order import same_combinatorial_order
from ..orbit_csv import read_footprints
from . import registry
from .helpers import ExperimentConfig, add_backend, add_report, emit_json

logger = logging.getLogger(__name__)


def configure(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--a", required=True, help="first orbit CSV")
    parser.add_argument("--b", required=True, help="second orbit CSV")
    parser.add_argument("--horizon", type=int, default=DEFAULT_HORIZON, help="number of footpoints to compare")
    parser.add_argument("--polygon-a", help="polygon of the first orbit (supplies the perimeter)")
    parser.add_argument("--polygon-b", help="polygon of the second orbit")
    add_backend(parser)
    add_report(parser)


@registry.command("compare", help="compare the combinatorial order of two orbit CSVs", configure=configure)
def compare(args: argparse.Namespace) -> int:
    config = ExperimentConfig.from_args(args, polygons=("a", "b"), outputs=("report",))
    exact = config.backend == "exact"
    polygon_a = read_polygon(args.polygon_a, config.backend) if args.polygon_a else None
    polygon_b = read_polygon(args.polygon_b, config.backend) if args.polygon_b else None
    a = read_footprints(args.a, polygon_a, exact)
    b = read_footprints(args.b, polygon_b, exact)
    horizon = min(args.horizon, len(a), len(b))
    if horizon < args.horizon:
        logger.warning("Orbit files hold only %s common points; horizon lowered from %s", horizon, args.horizon)
    if horizon < 3:
        raise InsufficientData("at least 3 footpoints are needed to compare orders", horizon=horizon)
    result = same_combinatorial_order(a, b, horizon)
    payload = {
        "equivalent": bool(result),
        "witness": None if result else list(result.triple),
        "horizon": horizon,
    }
    emit_json(payload, args.report)
    return EXIT_OK if result else EXIT_NEGATIVE
