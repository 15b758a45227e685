"""Hoist ``output(...)`` calls nested inside other calls into temporaries.

After the rewrite every ``output`` call that used to be a call argument is
the whole right-hand side of an assignment, which is the shape the
sensitivity detectors pattern-match on::

    dom = intersection(dom, output(s, domT));
    # becomes
    tmp0 = output(s, domT);
    dom = intersection(dom, tmp0);
"""

from __future__ import annotations

import dataclasses
import itertools

from . import ast as A


def _names_in(t: A.TraversalDecl) -> set[str]:
    names = {t.param}
    for s in A.walk_stmts(t.body):
        if isinstance(s, (A.VarDecl, A.Assign)):
            names.add(s.name)
        elif isinstance(s, A.Foreach):
            names.add(s.var)
        for root in A.stmt_exprs(s):
            names.update(e.id for e in A.walk_expr(root) if isinstance(e, A.Name))
    return names


class _Hoister:
    def __init__(self, taken: set[str]):
        self.fresh = (f"tmp{i}" for i in itertools.count() if f"tmp{i}" not in taken)

    def expr(self, e: A.Expr, hoisted: list[A.Stmt], in_call: bool = False) -> A.Expr:
        if isinstance(e, A.Call):
            args = tuple(self.expr(a, hoisted, in_call=True) for a in e.args)
            e = dataclasses.replace(e, args=args)
            if e.func == "output" and in_call:
                tmp = next(self.fresh)
                hoisted.append(A.Assign(tmp, e, pos=e.pos))
                return A.Name(tmp, pos=e.pos)
            return e
        if isinstance(e, A.Field):
            return dataclasses.replace(e, obj=self.expr(e.obj, hoisted))
        if isinstance(e, A.SetLit):
            return dataclasses.replace(e, items=tuple(self.expr(i, hoisted) for i in e.items))
        if isinstance(e, A.Binary):
            return dataclasses.replace(
                e, left=self.expr(e.left, hoisted), right=self.expr(e.right, hoisted)
            )
        if isinstance(e, A.Unary):
            return dataclasses.replace(e, operand=self.expr(e.operand, hoisted))
        return e

    def stmt(self, s: A.Stmt) -> list[A.Stmt]:
        hoisted: list[A.Stmt] = []
        if isinstance(s, A.VarDecl) and s.init is not None:
            s = dataclasses.replace(s, init=self.expr(s.init, hoisted))
        elif isinstance(s, A.Assign):
            s = dataclasses.replace(s, value=self.expr(s.value, hoisted))
        elif isinstance(s, A.ExprStmt):
            s = dataclasses.replace(s, expr=self.expr(s.expr, hoisted))
        elif isinstance(s, A.Return) and s.value is not None:
            s = dataclasses.replace(s, value=self.expr(s.value, hoisted))
        elif isinstance(s, A.If):
            cond = self.expr(s.cond, hoisted)
            orelse = None if s.orelse is None else self.nested(s.orelse)
            s = dataclasses.replace(s, cond=cond, then=self.nested(s.then), orelse=orelse)
        elif isinstance(s, A.Foreach):
            iterable = self.expr(s.iterable, hoisted)
            s = dataclasses.replace(s, iterable=iterable, body=self.nested(s.body))
        elif isinstance(s, A.Block):
            s = dataclasses.replace(s, stmts=self.body(s.stmts))
        return [*hoisted, s]

    def nested(self, s: A.Stmt) -> A.Stmt:
        out = self.stmt(s)
        return out[0] if len(out) == 1 else A.Block(tuple(out), pos=s.pos)

    def body(self, stmts) -> tuple[A.Stmt, ...]:
        return tuple(x for s in stmts for x in self.stmt(s))


def normalize_three_address(t: A.TraversalDecl) -> A.TraversalDecl:
    hoister = _Hoister(_names_in(t))
    body = hoister.body(t.body)
    return t if body == t.body else dataclasses.replace(t, body=body)


def normalize_program(p: A.DslProgram) -> A.DslProgram:
    return dataclasses.replace(p, traversals=tuple(normalize_three_address(t) for t in p.traversals))
