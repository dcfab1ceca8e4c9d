"""Influential-node selection with Modified Community Diversity (MCD)."""
from .baselines import cd_rank, degree_rank, h_index_rank, pagerank_rank
from .cascade import CascadeConfig, CascadeOutcome, estimate_spread, exact_spread, simulate_once
from .diversity import (
    ScoreTable,
    SeedSet,
    community_diversity,
    extended_community_diversity,
    mcd_scores,
    modified_community_diversity,
    select_top_k,
)
from .graph import UNREACHABLE, Graph, NodeLabelMap, bfs_distances, generate_ba, load_edge_list, read_edge_list
from .leiden import Partition, QualityConfig, leiden, quality

__version__ = "0.1.0"
