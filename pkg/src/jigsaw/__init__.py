"""Jigsaw percolation on double graphs: solvers, random models, experiments."""

from .graph import (ClusterGraph, DoubleGraph, EdgeListError, Graph, Partition,
                    connected_components, induce, is_connected, parse_edge_list,
                    read_edge_list, write_edge_list)
from .solver import (SolveResult, SpannedWitness, exhaustive_spanned,
                     is_internally_spanned, mutually_connected_clusters,
                     percolates, solve_fast, solve_reference,
                     spanned_witness_from_history)

__version__ = "0.1.0"
