from .ast import Direction, DslProgram, FixpointDecl, TraversalDecl, TraverseStmt, TypeRef
from .errors import DslError, DslNameError, DslRuntimeError, DslSyntaxError, DslTypeError
from .interp import (
    CompiledProgram,
    Session,
    eval_fixpoint,
    eval_traversal_body,
    structural_equal,
)
from .normalize import normalize_program, normalize_three_address
from .parser import parse_program
from .printer import format_expr, format_fixpoint, format_program, format_traversal

__all__ = [
    "CompiledProgram",
    "Direction",
    "DslError",
    "DslNameError",
    "DslProgram",
    "DslRuntimeError",
    "DslSyntaxError",
    "DslTypeError",
    "FixpointDecl",
    "Session",
    "TraversalDecl",
    "TraverseStmt",
    "TypeRef",
    "eval_fixpoint",
    "eval_traversal_body",
    "format_expr",
    "format_fixpoint",
    "format_program",
    "format_traversal",
    "normalize_program",
    "normalize_three_address",
    "parse_program",
    "structural_equal",
]
