"""Bakry-Émery curvature, resistance distance and curvature-dimension diameter
bounds on finite weighted graphs."""

__version__ = "0.1.0"

from .graph import (
    DisconnectedGraphError,
    DistanceMatrix,
    GraphError,
    WeightedGraph,
    combinatorial_distances,
    degree_ratio,
    laplacian_apply,
)
from .io import load_graph
from .generators import default_corpus, generate_family
from .curvature import (
    CurvatureResult,
    curvature,
    curvature_at,
    curvature_oracle,
    gamma,
    gamma2,
    local_forms,
    verify_cd,
)
from .heat import gradient_decay, heat_apply, semigroup_residual, spectral_decompose
from .resistance import (
    ResistanceSolverError,
    check_distance_comparison,
    resistance_diameter,
    resistance_distance,
)
from .bounds import (
    arcsin_integral_check,
    best_dimension_sweep,
    corollary_bound,
    limit_bound_infinite_n,
    theorem_bound,
    verify_graph,
)
