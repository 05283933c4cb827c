"""Directed Token Sliding: polytree solver, brute-force oracle and generators."""
from .graph import (
    Arc,
    Digraph,
    DTSError,
    GraphError,
    Instance,
    InstanceError,
    classify,
    components,
    is_independent,
    tree_path,
    underlying_adjacent,
)
from .flow import (
    ArcFlowTable,
    blocking_arcs,
    check_nonnegative,
    compute_arc_flow,
    reduce_instance,
    rigid_exception,
    rigid_tokens,
)
from .solver import Answer, MappingPair, Reason, Verdict, decide, greedy_mappings, sequence_length
from .sequence import (
    DirectedPath,
    NotReconfigurable,
    ReconfigSequence,
    build_path_matching,
    build_sequence,
    check_sequence,
    component_schedule,
    compute_potential,
    extend_paths,
    path_schedule,
    verify_sequence,
)

__version__ = "0.1.0"
