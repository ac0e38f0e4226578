from .hull import HullDistanceResult, dual_distance_to_hull, min_norm_point, segment_dual_distances
from .lp import LpProblem, LpSolution, LpStatus, solve_lp
from .polyhedra import (SUBSET_CAP, TOL_RANK, TOL_STRICT, enumerate_independent_subsets,
                        enumerate_vertices, feasible_point, independent_subset_array,
                        project_l2_batch, project_to_polyhedron, rank_and_rowspace, strict_slack,
                        strict_system_witness)

__all__ = [
    "HullDistanceResult", "LpProblem", "LpSolution", "LpStatus", "SUBSET_CAP", "TOL_RANK",
    "TOL_STRICT", "dual_distance_to_hull", "enumerate_independent_subsets", "enumerate_vertices",
    "feasible_point", "independent_subset_array", "min_norm_point", "project_l2_batch",
    "project_to_polyhedron",
    "rank_and_rowspace", "segment_dual_distances", "solve_lp", "strict_slack",
    "strict_system_witness",
]
