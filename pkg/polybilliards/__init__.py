"""Polygonal billiards: orbits, combinatorial order, glued surfaces and interval exchanges."""

from .dynamics import (
    OrbitRecord,
    PhasePoint,
    billiard_step,
    billiard_step_back,
    classify_orbit,
    find_generalized_diagonals,
    generate_orbit,
    leader,
    unfold_orbit,
)
from .geometry import Polygon, boundary_point, load_polygon, make_polygon, rational_angle_analysis
from .iet import complete_to_iet, reduce_to_iet, saddle_connection_probe
from .order import (
    FootprintSequence,
    build_correspondence,
    check_quasisimilarity,
    in_arc,
    same_combinatorial_order,
)
from .scalars import EXACT, FLOAT
from .surface import build_surface, dihedral_orbit, mu_length

__all__ = [
    "EXACT",
    "FLOAT",
    "FootprintSequence",
    "OrbitRecord",
    "PhasePoint",
    "Polygon",
    "billiard_step",
    "billiard_step_back",
    "boundary_point",
    "build_correspondence",
    "build_surface",
    "check_quasisimilarity",
    "classify_orbit",
    "complete_to_iet",
    "dihedral_orbit",
    "find_generalized_diagonals",
    "generate_orbit",
    "in_arc",
    "leader",
    "load_polygon",
    "make_polygon",
    "mu_length",
    "rational_angle_analysis",
    "reduce_to_iet",
    "saddle_connection_probe",
    "same_combinatorial_order",
    "unfold_orbit",
]
