from .generate import DEFAULT_MIX, InfeasibleGraph, generate_corpus, generate_random_cfg
from .model import Cfg, CfgError, Cyclicity, Node, Stmt, StmtKind, build_cfg
from .order import (
    classify_cyclicity,
    dfs_preorder,
    dominators,
    find_back_edges,
    natural_loops,
    post_order,
    predecessors_first_order,
    reverse_post_order,
    successors_first_order,
)
from .textfmt import format_cfg, parse_cfg

__all__ = [
    "Cfg",
    "CfgError",
    "Cyclicity",
    "InfeasibleGraph",
    "Node",
    "DEFAULT_MIX",
    "Stmt",
    "StmtKind",
    "build_cfg",
    "classify_cyclicity",
    "dfs_preorder",
    "dominators",
    "find_back_edges",
    "format_cfg",
    "generate_corpus",
    "generate_random_cfg",
    "natural_loops",
    "parse_cfg",
    "post_order",
    "predecessors_first_order",
    "reverse_post_order",
    "successors_first_order",
]
