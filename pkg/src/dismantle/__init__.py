"""Spanning-tree-skeleton dismantling of planar graphs under an edge budget."""

from .graph import Graph, components, is_connected, load_graph, save_graph
from .kernels import BACKEND
from .partition import balanced_partition, target_shares
from .planar import GenSpec, density_feature, generate
from .solver import CutSolution, SolveConfig, solve, solve_subproblem
from .ust import sample_ust

__all__ = [
    "BACKEND", "CutSolution", "GenSpec", "Graph", "SolveConfig", "balanced_partition",
    "components", "density_feature", "generate", "is_connected", "load_graph",
    "sample_ust", "save_graph", "solve", "solve_subproblem", "target_shares",
]
