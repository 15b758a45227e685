"""AST of the traversal DSL.

All nodes are frozen dataclasses built from tuples so programs are hashable
and comparable.  Source positions ride along but never take part in
equality.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Union


def _pos():
    return field(default=None, compare=False, repr=False, kw_only=True)


class Direction(enum.Enum):
    FORWARD = "FORWARD"
    BACKWARD = "BACKWARD"
    ITERATIVE = "ITERATIVE"

    @property
    def short(self) -> str:
        return {"FORWARD": "FWD", "BACKWARD": "BWD", "ITERATIVE": "ITER"}[self.value]


@dataclass(frozen=True)
class TypeRef:
    name: str  # int | bool | string | Node | Set | Seq
    elem: Optional["TypeRef"] = None

    @property
    def is_collection(self) -> bool:
        return self.name in ("Set", "Seq")

    def __str__(self):
        return f"{self.name}<{self.elem}>" if self.elem is not None else self.name


INT = TypeRef("int")
BOOL = TypeRef("bool")
STRING = TypeRef("string")
NODE = TypeRef("Node")


# -- expressions -------------------------------------------------------------

@dataclass(frozen=True)
class IntLit:
    value: int
    pos: tuple | None = _pos()


@dataclass(frozen=True)
class StrLit:
    value: str
    pos: tuple | None = _pos()


@dataclass(frozen=True)
class BoolLit:
    value: bool
    pos: tuple | None = _pos()


@dataclass(frozen=True)
class NullLit:
    pos: tuple | None = _pos()


@dataclass(frozen=True)
class Name:
    id: str
    pos: tuple | None = _pos()


@dataclass(frozen=True)
class Field:
    obj: "Expr"
    name: str
    pos: tuple | None = _pos()


@dataclass(frozen=True)
class Call:
    func: str
    args: tuple["Expr", ...]
    pos: tuple | None = _pos()


@dataclass(frozen=True)
class SetLit:
    items: tuple["Expr", ...]
    pos: tuple | None = _pos()


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"
    pos: tuple | None = _pos()


@dataclass(frozen=True)
class Unary:
    op: str
    operand: "Expr"
    pos: tuple | None = _pos()


Expr = Union[IntLit, StrLit, BoolLit, NullLit, Name, Field, Call, SetLit, Binary, Unary]


# -- statements --------------------------------------------------------------

@dataclass(frozen=True)
class VarDecl:
    name: str
    type: TypeRef
    init: Expr | None = None
    pos: tuple | None = _pos()


@dataclass(frozen=True)
class Assign:
    name: str
    value: Expr
    pos: tuple | None = _pos()


@dataclass(frozen=True)
class ExprStmt:
    expr: Expr
    pos: tuple | None = _pos()


@dataclass(frozen=True)
class If:
    cond: Expr
    then: "Stmt"
    orelse: "Stmt | None" = None
    pos: tuple | None = _pos()


@dataclass(frozen=True)
class Foreach:
    var: str
    iterable: Expr
    body: "Stmt"
    pos: tuple | None = _pos()


@dataclass(frozen=True)
class Return:
    value: Expr | None = None
    pos: tuple | None = _pos()


@dataclass(frozen=True)
class Block:
    stmts: tuple["Stmt", ...]
    pos: tuple | None = _pos()


Stmt = Union[VarDecl, Assign, ExprStmt, If, Foreach, Return, Block]


# -- top level ---------------------------------------------------------------

@dataclass(frozen=True)
class TraversalDecl:
    name: str
    param: str
    return_type: TypeRef | None
    body: tuple[Stmt, ...]
    pos: tuple | None = _pos()


@dataclass(frozen=True)
class FixpointDecl:
    name: str
    params: tuple[tuple[str, TypeRef], ...]
    return_type: TypeRef
    body: tuple[Stmt, ...]
    pos: tuple | None = _pos()


@dataclass(frozen=True)
class TraverseStmt:
    graph: str
    traversal: str
    direction: Direction
    fixpoint: str | None = None
    pos: tuple | None = _pos()


@dataclass(frozen=True)
class DslProgram:
    globals: tuple[VarDecl, ...] = ()
    traversals: tuple[TraversalDecl, ...] = ()
    fixpoints: tuple[FixpointDecl, ...] = ()
    invocations: tuple[TraverseStmt, ...] = ()

    def traversal(self, name: str) -> TraversalDecl:
        for t in self.traversals:
            if t.name == name:
                return t
        raise KeyError(name)

    def fixpoint(self, name: str) -> FixpointDecl:
        for f in self.fixpoints:
            if f.name == name:
                return f
        raise KeyError(name)


# -- generic walking ---------------------------------------------------------

def child_stmts(stmt: Stmt) -> tuple[Stmt, ...]:
    if isinstance(stmt, Block):
        return stmt.stmts
    if isinstance(stmt, If):
        return (stmt.then,) if stmt.orelse is None else (stmt.then, stmt.orelse)
    if isinstance(stmt, Foreach):
        return (stmt.body,)
    return ()


def walk_stmts(stmts) -> list[Stmt]:
    """All statements, pre-order, descending into blocks, ifs and loops."""
    out: list[Stmt] = []
    stack = list(reversed(tuple(stmts)))
    while stack:
        s = stack.pop()
        out.append(s)
        stack.extend(reversed(child_stmts(s)))
    return out


def stmt_exprs(stmt: Stmt) -> tuple[Expr, ...]:
    """Expressions owned directly by ``stmt`` (not by nested statements)."""
    if isinstance(stmt, VarDecl):
        return () if stmt.init is None else (stmt.init,)
    if isinstance(stmt, Assign):
        return (stmt.value,)
    if isinstance(stmt, ExprStmt):
        return (stmt.expr,)
    if isinstance(stmt, If):
        return (stmt.cond,)
    if isinstance(stmt, Foreach):
        return (stmt.iterable,)
    if isinstance(stmt, Return):
        return () if stmt.value is None else (stmt.value,)
    return ()


def sub_exprs(expr: Expr) -> tuple[Expr, ...]:
    if isinstance(expr, Field):
        return (expr.obj,)
    if isinstance(expr, (Call, SetLit)):
        return expr.args if isinstance(expr, Call) else expr.items
    if isinstance(expr, Binary):
        return (expr.left, expr.right)
    if isinstance(expr, Unary):
        return (expr.operand,)
    return ()


def walk_expr(expr: Expr):
    stack = [expr]
    while stack:
        e = stack.pop()
        yield e
        stack.extend(reversed(sub_exprs(e)))


def calls_in(stmts, func: str | None = None) -> list[Call]:
    """Every call expression in ``stmts``, in source order."""
    found = []
    for s in walk_stmts(stmts):
        for root in stmt_exprs(s):
            for e in walk_expr(root):
                if isinstance(e, Call) and (func is None or e.func == func):
                    found.append(e)
    return found
