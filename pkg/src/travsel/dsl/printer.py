"""Canonical source rendering; ``parse_program(format_program(p)) == p``."""

from __future__ import annotations

import json

from . import ast as A

_PREC = {"||": 1, "&&": 2, "==": 3, "!=": 3, "<": 4, ">": 4, "<=": 4, ">=": 4, "+": 5, "-": 5, "*": 6}


def format_expr(e: A.Expr, prec: int = 0) -> str:
    if isinstance(e, A.IntLit):
        return str(e.value)
    if isinstance(e, A.StrLit):
        return json.dumps(e.value)
    if isinstance(e, A.BoolLit):
        return "true" if e.value else "false"
    if isinstance(e, A.NullLit):
        return "null"
    if isinstance(e, A.Name):
        return e.id
    if isinstance(e, A.Field):
        return f"{format_expr(e.obj, 10)}.{e.name}"
    if isinstance(e, A.Call):
        return f"{e.func}({', '.join(format_expr(a) for a in e.args)})"
    if isinstance(e, A.SetLit):
        return "{" + ", ".join(format_expr(i) for i in e.items) + "}"
    if isinstance(e, A.Unary):
        return f"{e.op}{format_expr(e.operand, 9)}"
    if isinstance(e, A.Binary):
        p = _PREC[e.op]
        # left-associative: the right operand needs parens at equal precedence
        text = f"{format_expr(e.left, p)} {e.op} {format_expr(e.right, p + 1)}"
        return f"({text})" if p < prec else text
    raise AssertionError(e)


def _stmt_lines(s: A.Stmt, depth: int) -> list[str]:
    pad = "    " * depth
    if isinstance(s, A.VarDecl):
        init = "" if s.init is None else f" = {format_expr(s.init)}"
        return [f"{pad}{s.type} {s.name}{init};"]
    if isinstance(s, A.Assign):
        return [f"{pad}{s.name} = {format_expr(s.value)};"]
    if isinstance(s, A.ExprStmt):
        return [f"{pad}{format_expr(s.expr)};"]
    if isinstance(s, A.Return):
        return [f"{pad}return;" if s.value is None else f"{pad}return {format_expr(s.value)};"]
    if isinstance(s, A.Block):
        return [f"{pad}{{", *_body_lines(s.stmts, depth + 1), f"{pad}}}"]
    if isinstance(s, A.If):
        lines = [f"{pad}if ({format_expr(s.cond)})", *_nested(s.then, depth)]
        if s.orelse is not None:
            lines += [f"{pad}else", *_nested(s.orelse, depth)]
        return lines
    if isinstance(s, A.Foreach):
        return [f"{pad}foreach ({s.var} : {format_expr(s.iterable)})", *_nested(s.body, depth)]
    raise AssertionError(s)


def _nested(s: A.Stmt, depth: int) -> list[str]:
    # blocks stay at the parent's indentation, single statements get one more level
    return _stmt_lines(s, depth if isinstance(s, A.Block) else depth + 1)


def _body_lines(stmts, depth: int) -> list[str]:
    return [line for s in stmts for line in _stmt_lines(s, depth)]


def format_traversal(t: A.TraversalDecl) -> str:
    ret = f": {t.return_type}" if t.return_type is not None else ""
    head = f"{t.name} := traversal({t.param}: Node){ret} {{"
    return "\n".join([head, *_body_lines(t.body, 1), "}"])


def format_fixpoint(f: A.FixpointDecl) -> str:
    params = ", ".join(f"{ty} {name}" for name, ty in f.params)
    head = f"{f.name} := fixp({params}): {f.return_type} {{"
    return "\n".join([head, *_body_lines(f.body, 1), "}"])


def format_program(p: A.DslProgram) -> str:
    parts = []
    for g in p.globals:
        init = "" if g.init is None else f" = {format_expr(g.init)}"
        parts.append(f"{g.name}: {g.type}{init};")
    parts += [format_traversal(t) for t in p.traversals]
    parts += [format_fixpoint(f) for f in p.fixpoints]
    for inv in p.invocations:
        fp = f", {inv.fixpoint}" if inv.fixpoint else ""
        parts.append(f"traverse({inv.graph}, {inv.traversal}, {inv.direction.value}{fp});")
    return "\n".join(parts) + ("\n" if parts else "")
