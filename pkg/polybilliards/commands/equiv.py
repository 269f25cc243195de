from __future__ import annotations

import argparse
import logging

from ..config import DEFAULT_HORIZON
from ..dynamics import generate_orbit
from ..errors import EXIT_NEGATIVE, EXIT_OK, EXIT_ORBIT_TERMINATED, LowCoverage
from ..order import FootprintSequence, build_correspondence, check_quasisimilarity, same_combinatorial_order
from ..orbit_csv import write_orbit_csv
from . import registry
from .helpers import ExperimentConfig, add_backend, add_leader, add_report, emit_json

logger = logging.getLogger(__name__)


def configure(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--p", required=True, help="polygon P (JSON)")
    parser.add_argument("--q", required=True, help="polygon Q (JSON)")
    add_leader(parser, "p-")
    add_leader(parser, "q-")
    parser.add_argument("--steps", type=int, default=DEFAULT_HORIZON, help="orbit length in both polygons")
    parser.add_argument("--horizon", type=int, default=None, help="footpoints to compare (default: all)")
    parser.add_argument("--tol", type=float, default=0.05, help="largest footpoint gap accepted for the corner report")
    parser.add_argument("--coordinate", choices=["arclength", "parameter"], default="arclength",
                        help="boundary coordinate used for the order comparison")
    parser.add_argument("--out-p", help="write P's orbit CSV here")
    parser.add_argument("--out-q", help="write Q's orbit CSV here")
    add_backend(parser)
    add_report(parser)


@registry.command("equiv", help="simulate two leaders, compare orders and report corner correspondence",
                  configure=configure)
def equiv(args: argparse.Namespace) -> int:
    config = ExperimentConfig.from_args(args, polygons=("p", "q"), leaders=("p-", "q-"),
                                        outputs=("out_p", "out_q"))
    p, q = config.load_polygons()
    records = [generate_orbit(poly, spec.resolve(poly), config.steps)
               for poly, spec in zip((p, q), config.leaders)]
    for name, record in zip(("out_p", "out_q"), records):
        if name in config.outputs:
            write_orbit_csv(record, config.outputs[name])

    a = FootprintSequence.from_record(records[0], p, args.coordinate)
    b = FootprintSequence.from_record(records[1], q, args.coordinate)
    horizon = min(args.horizon or len(a), len(a), len(b))
    payload: dict = {
        "p": p.name,
        "q": q.name,
        "terminations": [str(r.termination) for r in records],
        "horizon": horizon,
    }
    truncated = not all(r.termination.completed for r in records)
    if horizon < 3:
        payload.update(equivalent=None, witness=None)
        emit_json(payload, args.report)
        return EXIT_ORBIT_TERMINATED

    result = same_combinatorial_order(a, b, horizon)
    payload["equivalent"] = bool(result)
    payload["witness"] = None if result else list(result.triple)
    if result and args.coordinate == "arclength":
        corr = build_correspondence(
            FootprintSequence(a.perimeter, a.points[:horizon], a.source, a.tolerance),
            FootprintSequence(b.perimeter, b.points[:horizon], b.source, b.tolerance),
        )
        try:
            payload["quasisimilarity"] = check_quasisimilarity(corr, p, q, config.tolerance).to_dict()
        except LowCoverage as exc:
            logger.warning("Skipping corner report: %s", exc.message)
            payload["quasisimilarity"] = exc.to_dict()
    emit_json(payload, args.report)
    if truncated:
        return EXIT_ORBIT_TERMINATED
    return EXIT_OK if result else EXIT_NEGATIVE
