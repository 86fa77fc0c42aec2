"""Exact rational polyhedral computation."""
from .lp import (INFEASIBLE, OPTIMAL, UNBOUNDED, LPResult, feasible_point,
                 is_feasible, solve_lp)
from .ops import (CapabilityError, UnboundedError, contains, enumerate_vertices,
                  equal_sets, find_violation, fme_eliminate, fme_project,
                  is_bounded, is_redundant, minimize)
from .polytope import (GeometryError, HPolytope, LinearInequality, as_fraction,
                       fraction_str, nonnegativity, vrep_from_json, vrep_to_json)

__all__ = [
    "INFEASIBLE", "OPTIMAL", "UNBOUNDED", "LPResult", "feasible_point",
    "is_feasible", "solve_lp", "CapabilityError", "UnboundedError", "contains",
    "enumerate_vertices", "equal_sets", "find_violation", "fme_eliminate",
    "fme_project", "is_bounded", "is_redundant", "minimize", "GeometryError",
    "HPolytope", "LinearInequality", "as_fraction", "fraction_str",
    "nonnegativity", "vrep_from_json", "vrep_to_json",
]
