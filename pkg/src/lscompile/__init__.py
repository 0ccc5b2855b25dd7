"""Lattice-surgery compilation of CNOT+T circuits on color-code and folded surface-code substrates."""

from __future__ import annotations

from .circuit import (
    CircuitError,
    Gate,
    IndexedGate,
    LayeredCircuit,
    LogicalCircuit,
    RandomCircuitSpec,
    generate_random_circuit,
    layer_circuit,
    parse_circuit,
    serialize,
)
from .codegen import color_instance, dump, merge_data, parse_dump, surface_instance, verify_merge, verify_merge_data
from .distance import DistanceResult, SearchBoundExceeded, verify_distance
from .mapper import HillClimbConfig, MappingResult, crossing_cost, depth_cost, hill_climb, improvement, neighbors
from .pauli import PauliOperator
from .router import (
    CompiledSchedule,
    NoFactories,
    RoutedOp,
    RoutingTask,
    UnroutableDemand,
    push_leftovers,
    route_circuit,
    shortest_valid_path,
    vdp_subroutine,
)
from .routing_graph import (
    FactoryConfig,
    Labeling,
    RoutingGraph,
    build_routing_graph,
    extent_for,
    is_valid_path,
    packing_ratio,
    random_labeling,
)
from .substrate import build_color_patch, build_substrate, build_surface_patch
from .surgery import MergeSpec, build_merged_stabilizers, build_split_stabilizers, build_subsystem_code, gauge_fix

__all__ = [
    "CircuitError",
    "CompiledSchedule",
    "DistanceResult",
    "FactoryConfig",
    "Gate",
    "HillClimbConfig",
    "IndexedGate",
    "Labeling",
    "LayeredCircuit",
    "LogicalCircuit",
    "MappingResult",
    "MergeSpec",
    "NoFactories",
    "PauliOperator",
    "RandomCircuitSpec",
    "RoutedOp",
    "RoutingGraph",
    "RoutingTask",
    "SearchBoundExceeded",
    "UnroutableDemand",
    "build_color_patch",
    "build_merged_stabilizers",
    "build_routing_graph",
    "build_split_stabilizers",
    "build_subsystem_code",
    "build_substrate",
    "build_surface_patch",
    "color_instance",
    "crossing_cost",
    "depth_cost",
    "dump",
    "extent_for",
    "gauge_fix",
    "generate_random_circuit",
    "hill_climb",
    "improvement",
    "is_valid_path",
    "layer_circuit",
    "merge_data",
    "neighbors",
    "packing_ratio",
    "parse_circuit",
    "parse_dump",
    "push_leftovers",
    "random_labeling",
    "route_circuit",
    "serialize",
    "shortest_valid_path",
    "surface_instance",
    "vdp_subroutine",
    "verify_distance",
    "verify_merge",
    "verify_merge_data",
]
