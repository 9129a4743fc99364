"""Influence analysis for abstract matching, solved as a boolean equation system."""

from .analysis import (
    AnnotationMap,
    MatchingTable,
    export_blk,
    influence_analysis,
    matching_table,
    oracle_annotation,
    report,
)
from .frontend import build_cfg, cfg_to_lts, parse_program, source_to_lts
from .lts import TAU, Assert, Assign, Bool, Lts, Tau, read_aut, successors, var_universe, write_aut
from .pbes import IA1, IA2, IA3, IA4, TRUE, BesNodeKey, IaVariant, expand, global_solve
from .solver import Diagnostic, SolverStore, diagnostic, local_solve, reset, stats

__all__ = [
    "AnnotationMap", "Assert", "Assign", "BesNodeKey", "Bool", "Diagnostic", "IA1", "IA2",
    "IA3", "IA4", "IaVariant", "Lts", "MatchingTable", "SolverStore", "TAU", "TRUE", "Tau",
    "build_cfg", "cfg_to_lts", "diagnostic", "expand", "export_blk", "global_solve",
    "influence_analysis", "local_solve", "matching_table", "oracle_annotation",
    "parse_program", "read_aut", "report", "reset", "source_to_lts", "stats", "successors",
    "var_universe", "write_aut",
]
