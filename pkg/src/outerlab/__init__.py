"""outerlab: a numerical laboratory for outer (dual) billiards.

Orbit polygons and their cyclic invariants, the band-cyclic matrix C and
its integral elements, explicit variety equations for short periods, the
outer billiard map itself, and randomized verifiers that corroborate the
scarcity of convex integral elements.
"""

from .geometry import (
    OrbitPolygon,
    derive_orbit_polygon,
    det2,
    diameter,
    inner2,
    polygon_area,
    regular_star,
)
from .elements import (
    CurvatureProfile,
    CyclicMatrixC,
    IntegralElement,
    RankTolerance,
    SearchBudget,
    build_matrix_C,
    classify_paradoxical,
    convex_element_search,
    curvature_from_element,
    element_from_curvature,
    is_convex_element,
    is_integral_element,
    make_element,
    numerical_rank,
    paradox_margin,
    special_element_minus,
    special_element_plus,
    variety_equations_n4,
    variety_equations_n5,
    variety_equations_n6,
    variety_point_n5,
    variety_point_n6,
    variety_residual_rel,
)
from .dynamics import (
    ConvexCurve,
    OrbitRecord,
    iterate,
    orbit_polygon,
    outer_map,
    tangency_point,
)
from .lab import (
    DEFAULT_SEED,
    OrbitSampler,
    ParadoxicalFind,
    ParadoxicalScan,
    VerifierReport,
    sample_orbit_polygon,
    search_paradoxical,
    verify_theorem_n3,
    verify_theorem_n4,
    verify_theorem_n52,
    verify_theorem_n62,
)
from . import errors

__version__ = "0.1.0"

__all__ = [
    "OrbitPolygon", "derive_orbit_polygon", "det2", "inner2",
    "polygon_area", "regular_star", "diameter",
    "CyclicMatrixC", "IntegralElement", "CurvatureProfile",
    "RankTolerance", "SearchBudget",
    "build_matrix_C", "numerical_rank", "make_element",
    "special_element_minus", "special_element_plus",
    "is_integral_element", "is_convex_element",
    "variety_equations_n4", "variety_equations_n5", "variety_equations_n6",
    "variety_point_n5", "variety_point_n6", "variety_residual_rel",
    "curvature_from_element", "element_from_curvature",
    "convex_element_search", "classify_paradoxical", "paradox_margin",
    "ConvexCurve", "OrbitRecord",
    "tangency_point", "outer_map", "iterate", "orbit_polygon",
    "OrbitSampler", "VerifierReport", "ParadoxicalFind", "ParadoxicalScan",
    "sample_orbit_polygon", "search_paradoxical",
    "verify_theorem_n3", "verify_theorem_n4",
    "verify_theorem_n52", "verify_theorem_n62",
    "DEFAULT_SEED", "errors",
]
