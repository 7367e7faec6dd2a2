"""Tau-strengthened (alpha, beta)-cores of bipartite graphs: online peeling,
decomposition, core indexes and a learned query router."""

from .analytics import CoreProfileRow, clustering_coefficient, density, profile_cores
from .butterfly import (
    BloomEdgeIndex,
    EdgeAlreadyDeleted,
    InvalidEdgeError,
    be_delete_edge,
    build_be_index,
    count_butterflies_total,
    count_caterpillars,
    edge_supports,
    enumerate_butterflies_containing,
)
from .decomposition import DecompResult, DecompTrace, decompose, decompose_optimized
from .graph import BipartiteGraph, EdgeListError, Subgraph, complete_bipartite, load_edge_list, write_edge_list
from .index import TotalIndex, TwoDIndex, build_2d_index, build_index, build_total_index, query_total, query_via_2d
from .peeling import PeelState, online_core, peel
from .router import (
    HyperParams,
    LabeledQuery,
    QueryRouter,
    cross_validate,
    generate_training_set,
    hybrid_query,
    predict,
    time_sensitive_error,
    train_classifier,
)
from .serialize import IndexFormatError, IndexMismatchError, deserialize_index, serialize_index
from .stats import GraphStats, degeneracy, stats

__version__ = "0.1.0"
