"""Exact Jaccard optimization over binary-partition-tree segmentations.

Build a hierarchy (or load one), annotate it with a ground-truth mask, and
compute the exact best Jaccard index achievable by segmentations assembled
from at most k tree nodes, for each of the three consistency types.
"""

__version__ = "0.1.0"

from .builders import (
    external_weight_tree,
    filter_small_areas,
    geometric_tree,
    l2_mst_tree,
)
from .consistency import (
    Attribute,
    BenefitPair,
    ConsistencyType,
    NodeSelection,
    Rational,
    benefit,
    benefit_pair,
    jaccard,
    jaccard_complement,
    make_selection,
    realize_segmentation,
    segment_dims,
)
from .cooptimal import (
    OptimizationResult,
    best_of_both,
    best_unlimited,
    curve,
    optimize_jaccard,
    optimize_jaccard_complement,
)
from .hierarchy import (
    LayerAssignment,
    NodeDims,
    Tree,
    annotate_dims,
    build_tree,
    coarsest_partition,
    dims_from_leaf_values,
    is_cut,
    layers,
)
from .oracle import EnumerationBudget, brute_force_best, enumerate_selections
from .solvers import (
    SolverResult,
    SolverTables,
    build_tables,
    minimal_best,
    solve_b,
    solve_c,
    solve_d,
    solve_unlimited,
)

__all__ = [
    "Attribute",
    "BenefitPair",
    "ConsistencyType",
    "EnumerationBudget",
    "LayerAssignment",
    "NodeDims",
    "NodeSelection",
    "OptimizationResult",
    "Rational",
    "SolverResult",
    "SolverTables",
    "Tree",
    "annotate_dims",
    "benefit",
    "benefit_pair",
    "best_of_both",
    "best_unlimited",
    "brute_force_best",
    "build_tables",
    "build_tree",
    "coarsest_partition",
    "curve",
    "dims_from_leaf_values",
    "enumerate_selections",
    "external_weight_tree",
    "filter_small_areas",
    "geometric_tree",
    "is_cut",
    "jaccard",
    "jaccard_complement",
    "l2_mst_tree",
    "layers",
    "make_selection",
    "minimal_best",
    "optimize_jaccard",
    "optimize_jaccard_complement",
    "realize_segmentation",
    "segment_dims",
    "solve_b",
    "solve_c",
    "solve_d",
    "solve_unlimited",
]
