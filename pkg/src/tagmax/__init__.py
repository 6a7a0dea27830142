"""Top-k product design over per-tag Naive Bayes models.

Train one classifier per tag from a boolean product catalog, then
search the 2^m configuration space for the k designs maximizing the
expected number of desirable tags: exhaustively (solve_naive), exactly
with early termination (solve_ett), with a polynomial-time
approximation guarantee (solve_pa), or fast without one (solve_hc).
"""
from .backend import BACKEND, which
from .bits import from_string, to_string
from .dataset import (Dataset, DatasetError, ProductRow, SyntheticSpec,
                      attribute_blocks, generate_synthetic, load_csv,
                      loads_csv, save_csv, slice_dataset)
from .ett import (AttributeGrouping, SubsystemExhausted, TagSubsystem,
                  TopKBuffer, contiguous_grouping, group_attributes,
                  grouping_for_size, solve_ett)
from .hc import ClimbResult, HCConfig, climb_from, solve_hc
from .nbc import (DESIRABLE, UNDESIRABLE, Model, ModelError, Query,
                  SmoothingSpec, TagModel, TagSelection, exact_score,
                  oriented_tag_score, per_tag_breakdown, score_bounds,
                  tag_score, train)
from .oracle import (NAIVE_ATTR_CAP, RankedProduct, SolverStats, TopK,
                     all_totals, rank_of, solve_naive)
from .pa import TagGrouping, frontier_size_bound, group_tags, ptas_group, solve_pa
from .runner import ALGORITHMS, build_query, run_solver

__version__ = "0.1.0"

__all__ = [
    "ALGORITHMS", "AttributeGrouping", "BACKEND", "ClimbResult", "DESIRABLE",
    "Dataset", "DatasetError", "HCConfig", "Model", "ModelError",
    "NAIVE_ATTR_CAP", "ProductRow", "Query", "RankedProduct", "SmoothingSpec",
    "SolverStats", "SubsystemExhausted", "SyntheticSpec", "TagGrouping",
    "TagModel", "TagSelection", "TagSubsystem", "TopK", "TopKBuffer",
    "UNDESIRABLE", "all_totals", "attribute_blocks", "build_query",
    "climb_from", "contiguous_grouping", "exact_score", "from_string",
    "frontier_size_bound", "generate_synthetic", "group_attributes",
    "group_tags", "grouping_for_size", "load_csv", "loads_csv",
    "oriented_tag_score", "per_tag_breakdown", "ptas_group", "rank_of",
    "run_solver", "save_csv", "score_bounds", "slice_dataset", "solve_ett",
    "solve_hc", "solve_naive", "solve_pa", "tag_score", "to_string", "train",
    "which",
]
