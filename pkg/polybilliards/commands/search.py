from __future__ import annotations

import argparse
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ..config import DEFAULT_HORIZON, DEFAULT_SEED, SEARCH_WORKERS
from ..dynamics import PhasePoint, generate_orbit, leader
from ..errors import EXIT_NEGATIVE, EXIT_OK, BilliardsError
from ..geometry import Polygon, direction_from_degrees
from ..order import FootprintSequence, agreement_horizon
from ..scalars import Vec, format_scalar
from . import registry
from .helpers import ExperimentConfig, add_backend, add_leader, add_report, emit_json

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Candidate:
    side: int
    fraction: Fraction
    angle_deg: float

    def phase_point(self, polygon: Polygon) -> PhasePoint:
        bk = polygon.backend
        offset = bk.coerce(self.fraction) * polygon.side_lengths[self.side]
        return leader(polygon, self.side, offset, _rotated(polygon, self.side, self.angle_deg))


@dataclass(frozen=True)
class CandidateResult:
    candidate: Candidate
    horizon: int
    termination: str

    def to_dict(self) -> dict:
        return {
            "side": self.candidate.side,
            "offset_fraction": format_scalar(self.candidate.fraction),
            "angle_to_side_deg": self.candidate.angle_deg,
            "horizon": self.horizon,
            "termination": self.termination,
        }


def _rotated(polygon: Polygon, side: int, angle_deg: float) -> Vec:
    """Side vector turned counterclockwise by ``angle_deg``; rational in the exact backend."""

    e = polygon.edges[side]
    c, s = direction_from_degrees(angle_deg, polygon.backend)
    return (c * e[0] - s * e[1], s * e[0] + c * e[1])


def candidate_grid(polygon: Polygon, count: int, seed: int = DEFAULT_SEED) -> list[Candidate]:
    """``count`` leaders from a side × offset × angle grid, in a seeded random order."""

    if count < 1:
        raise ValueError("candidate count must be positive")
    per_side = math.ceil(count / polygon.size)
    m = max(1, math.ceil(math.sqrt(per_side)))
    grid = [
        Candidate(side, Fraction(i, m + 1), 180 * j / (m + 1))
        for side in range(polygon.size)
        for i in range(1, m + 1)
        for j in range(1, m + 1)
    ]
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(grid))
    return [grid[i] for i in order[:count]]


def evaluate_candidate(
    q: Polygon, candidate: Candidate, reference: FootprintSequence, steps: int
) -> CandidateResult:
    try:
        start = candidate.phase_point(q)
    except BilliardsError as exc:
        return CandidateResult(candidate, 0, type(exc).__name__)
    record = generate_orbit(q, start, steps)
    b = FootprintSequence.from_record(record, q)
    return CandidateResult(candidate, agreement_horizon(reference, b), str(record.termination))


def _evaluate(job: tuple[Polygon, Candidate, FootprintSequence, int]) -> CandidateResult:
    return evaluate_candidate(*job)


def search_leaders(
    p: Polygon,
    u0: PhasePoint,
    q: Polygon,
    candidates: list[Candidate],
    steps: int,
    workers: int = SEARCH_WORKERS,
) -> list[CandidateResult]:
    """Rank candidate leaders in Q by how long their orbit keeps the order of P's orbit."""

    reference = FootprintSequence.from_record(generate_orbit(p, u0, steps), p)
    jobs = [(q, c, reference, steps) for c in candidates]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_evaluate, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        results = [_evaluate(job) for job in jobs]
    results.sort(key=lambda r: -r.horizon)
    logger.info("Searched %s leaders in %s; best horizon %s", len(results), q.name,
                results[0].horizon if results else 0)
    return results


def configure(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--p", required=True, help="polygon P with the fixed leader")
    parser.add_argument("--q", required=True, help="polygon Q searched for a matching leader")
    add_leader(parser)
    parser.add_argument("--steps", type=int, default=DEFAULT_HORIZON, help="orbit length per candidate")
    parser.add_argument("--grid", type=int, default=100, help="number of candidate leaders in Q")
    parser.add_argument("--top", type=int, default=10, help="candidates listed in the report")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED)
    parser.add_argument("--workers", type=int, default=SEARCH_WORKERS, help="worker processes")
    add_backend(parser)
    add_report(parser)


@registry.command("search", help="grid search for leaders in Q that keep the order of a leader in P",
                  configure=configure)
def search(args: argparse.Namespace) -> int:
    config = ExperimentConfig.from_args(args, polygons=("p", "q"), leaders=("",))
    p, q = config.load_polygons()
    u0 = config.leaders[0].resolve(p)
    candidates = candidate_grid(q, args.grid, config.seed)
    results = search_leaders(p, u0, q, candidates, config.steps, args.workers)
    full = config.steps + 1
    agreeing = [r for r in results if r.horizon >= full]
    emit_json(
        {
            "p": p.name,
            "q": q.name,
            "seed": config.seed,
            "candidates": len(results),
            "full_horizon": full,
            "agreeing": len(agreeing),
            "best": [r.to_dict() for r in results[: args.top]],
        },
        args.report,
    )
    return EXIT_OK if agreeing else EXIT_NEGATIVE
