"""Sparsified and decomposed union-of-stars compilation of Max-Cut QAOA."""

from .compiler import (
    CompilationMetrics,
    Pulse,
    PulseSchedule,
    accumulated_coupling,
    compile_decomposition,
    compile_star,
    compile_unweighted,
    compile_weighted_edge_by_edge,
    merge_pulses,
    metrics,
)
from .decompose import (
    Decomposition,
    binary_decompose,
    cut_guarantee_check,
    exp_decompose,
    select_decomposition,
    sparse_union_of_stars,
)
from .graph import (
    Star,
    WeightedGraph,
    cut_value,
    load_graph,
    normalize_weights,
    save_graph,
    star_decompose,
    sum_graphs,
)
from .maxcut import CutResult, approximation_ratio, local_search_cut, max_cut_exact
from .noise import (
    CostLandscape,
    NoiseParams,
    edge_triangle_split,
    grid_search,
    qaoa_cost_dephased,
    statevector_qaoa_cost,
)
from .sparsify import effective_resistances, sample_count_for_epsilon, sparsify

__version__ = "0.1.0"
