"""Name resolution and the small amount of static typing the DSL has.

Only collection element types and the fixpoint result type are checked;
everything else is left to the interpreter.
"""

from __future__ import annotations

from . import ast as A
from .errors import DslNameError, DslTypeError

BUILTINS = {
    "add": 2, "addAll": 2, "remove": 2, "removeAll": 2,
    "union": 2, "intersection": 2,
    "equals": 2, "contains": 2, "len": 1, "output": 2,
}
PREDEFINED = {"g", "node", "exitNodeId", "entryNodeId"}

_NODE_FIELDS = {
    "id": A.INT,
    "preds": A.TypeRef("Seq", A.NODE),
    "succs": A.TypeRef("Seq", A.NODE),
    "defs": A.TypeRef("Set", A.STRING),
    "uses": A.TypeRef("Set", A.STRING),
    "exprs": A.TypeRef("Set", A.STRING),
    "label": A.STRING,
    "kind": A.STRING,
}
_GRAPH_FIELDS = {"nodes": A.TypeRef("Seq", A.NODE), "entry": A.NODE}
GRAPH = A.TypeRef("Graph")


def check_program(p: A.DslProgram) -> None:
    seen: dict[str, str] = {}
    for kind, items in (("global", p.globals), ("traversal", p.traversals), ("fixpoint", p.fixpoints)):
        for item in items:
            if item.name in seen or item.name in PREDEFINED:
                raise DslNameError.at(f"duplicate name {item.name!r}", item.pos)
            seen[item.name] = kind

    globals_env = {d.name: d.type for d in p.globals}
    ret_types = {t.name: t.return_type for t in p.traversals}

    for f in p.fixpoints:
        if f.return_type != A.BOOL:
            raise DslTypeError.at(f"fixpoint {f.name!r} must return bool, not {f.return_type}", f.pos)
        if len(f.params) != 2:
            raise DslTypeError.at(
                f"fixpoint {f.name!r} takes {len(f.params)} parameters; exactly 2 (current, previous) are supported",
                f.pos,
            )
        env = dict(globals_env)
        env.update({name: ty for name, ty in f.params})
        _Checker(env, ret_types, A.BOOL, f.name).stmts(f.body)

    for t in p.traversals:
        env = dict(globals_env)
        env[t.param] = A.NODE
        _Checker(env, ret_types, t.return_type, t.name, traversal=True).stmts(t.body)

    for inv in p.invocations:
        if inv.graph != "g":
            raise DslNameError.at(f"unknown graph {inv.graph!r}; only 'g' is defined", inv.pos)
        if seen.get(inv.traversal) != "traversal":
            raise DslNameError.at(f"unknown traversal {inv.traversal!r}", inv.pos)
        if inv.fixpoint is not None and seen.get(inv.fixpoint) != "fixpoint":
            raise DslNameError.at(f"unknown fixpoint {inv.fixpoint!r}", inv.pos)

    for g in p.globals:
        if g.init is not None:
            _Checker(dict(globals_env), ret_types, None, "<global>").expect_assignable(g.type, g.init, g.pos)


def _elem_clash(a: A.TypeRef | None, b: A.TypeRef | None) -> bool:
    return (
        a is not None and b is not None
        and a.is_collection and b.is_collection
        and a.elem is not None and b.elem is not None
        and a.elem != b.elem
    )


class _Checker:
    def __init__(self, env, ret_types, return_type, owner, traversal=False):
        self.env = {
            "g": GRAPH, "node": A.NODE, "exitNodeId": A.INT, "entryNodeId": A.INT, **env,
        }
        self.ret_types = ret_types
        self.return_type = return_type
        self.owner = owner
        self.traversal = traversal

    def stmts(self, stmts):
        for s in stmts:
            self.stmt(s)

    def stmt(self, s):
        if isinstance(s, A.VarDecl):
            self.env[s.name] = s.type
            if s.init is not None:
                self.expect_assignable(s.type, s.init, s.pos)
        elif isinstance(s, A.Assign):
            if s.name in self.env:
                self.expect_assignable(self.env[s.name], s.value, s.pos)
            else:
                self.expr(s.value)
                self.env[s.name] = None
        elif isinstance(s, A.ExprStmt):
            self.expr(s.expr)
        elif isinstance(s, A.If):
            self.expr(s.cond)
            self.stmt(s.then)
            if s.orelse is not None:
                self.stmt(s.orelse)
        elif isinstance(s, A.Foreach):
            ty = self.expr(s.iterable)
            self.env[s.var] = ty.elem if ty is not None and ty.is_collection else None
            self.stmt(s.body)
        elif isinstance(s, A.Return):
            if self.traversal and self.return_type is None:
                raise DslTypeError.at(f"traversal {self.owner!r} declares no output type but returns", s.pos)
            if s.value is None:
                if self.return_type is not None:
                    raise DslTypeError.at(f"{self.owner!r} must return a {self.return_type}", s.pos)
            else:
                self.expect_assignable(self.return_type, s.value, s.pos)
        elif isinstance(s, A.Block):
            self.stmts(s.stmts)

    def expect_assignable(self, target, value, pos):
        ty = self.expr(value)
        if _elem_clash(target, ty):
            raise DslTypeError.at(f"cannot use {ty} where {target} is expected", pos)

    def expr(self, e) -> A.TypeRef | None:
        if isinstance(e, A.IntLit):
            return A.INT
        if isinstance(e, A.StrLit):
            return A.STRING
        if isinstance(e, A.BoolLit):
            return A.BOOL
        if isinstance(e, A.NullLit):
            return None
        if isinstance(e, A.Name):
            if e.id not in self.env:
                raise DslNameError.at(f"undefined name {e.id!r}", e.pos)
            return self.env[e.id]
        if isinstance(e, A.Field):
            obj = self.expr(e.obj)
            if obj == A.NODE:
                if e.name not in _NODE_FIELDS:
                    raise DslNameError.at(f"Node has no field {e.name!r}", e.pos)
                return _NODE_FIELDS[e.name]
            if obj == GRAPH:
                if e.name not in _GRAPH_FIELDS:
                    raise DslNameError.at(f"graph has no field {e.name!r}", e.pos)
                return _GRAPH_FIELDS[e.name]
            return None
        if isinstance(e, A.SetLit):
            types = {self.expr(i) for i in e.items} - {None}
            if len(types) > 1:
                raise DslTypeError.at("set literal mixes element types", e.pos)
            return A.TypeRef("Set", types.pop()) if types else None
        if isinstance(e, A.Unary):
            self.expr(e.operand)
            return A.BOOL if e.op == "!" else A.INT
        if isinstance(e, A.Binary):
            left = self.expr(e.left)
            self.expr(e.right)
            if e.op in ("+", "-", "*"):
                return left
            return A.BOOL
        if isinstance(e, A.Call):
            return self.call(e)
        raise AssertionError(e)

    def call(self, e: A.Call):
        if e.func not in BUILTINS:
            raise DslNameError.at(f"unknown function {e.func!r}", e.pos)
        if len(e.args) != BUILTINS[e.func]:
            raise DslTypeError.at(f"{e.func}() takes {BUILTINS[e.func]} arguments, got {len(e.args)}", e.pos)
        if e.func == "output":
            self.expr(e.args[0])
            ref = e.args[1]
            if not isinstance(ref, A.Name) or ref.id not in self.ret_types:
                raise DslNameError.at("output() needs a declared traversal as second argument", e.pos)
            return self.ret_types[ref.id]
        types = [self.expr(a) for a in e.args]
        if e.func in ("add", "remove"):
            coll, item = types
            if coll is not None and coll.is_collection and item is not None and coll.elem != item:
                raise DslTypeError.at(f"{e.func}() of {item} into {coll}", e.pos)
            return None
        if e.func in ("addAll", "removeAll", "union", "intersection"):
            if _elem_clash(*types):
                raise DslTypeError.at(f"{e.func}() of {types[1]} with {types[0]}", e.pos)
            return types[0] or types[1] if e.func in ("union", "intersection") else None
        if e.func == "len":
            return A.INT
        return A.BOOL
