"""Evaluator for traversal and fixpoint bodies.

Bodies are compiled once per program into nested Python closures; a
:class:`Session` then holds the mutable state for one graph (output maps and
global variables) and evaluates bodies node by node.

Runtime values map onto Python directly: ``int``, ``bool``, ``str``,
:class:`~travsel.cfg.Node`, ``set`` (Set), ``list`` (Seq) and ``None`` (Null).
"""

from __future__ import annotations

import operator

from ..cfg import Cfg, Node
from . import ast as A
from .check import BUILTINS
from .errors import DslNameError, DslRuntimeError

_NO_RETURN = object()

_DEFAULTS = {"int": 0, "bool": False, "string": "", "Node": None}


def default_value(ty: A.TypeRef | None):
    if ty is None:
        return None
    if ty.name == "Set":
        return set()
    if ty.name == "Seq":
        return []
    return _DEFAULTS[ty.name]


def _fresh(v):
    t = type(v)
    if t is set:
        return set(v)
    if t is list:
        return list(v)
    return v


def _order_key(v):
    # ascending element order; nodes sort by id
    return v.id if type(v) is Node else v


def _show(v) -> str:
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "bool"
    if isinstance(v, int):
        return "int"
    if isinstance(v, str):
        return "string"
    if isinstance(v, Node):
        return "Node"
    if isinstance(v, set):
        return "Set"
    if isinstance(v, list):
        return "Seq"
    return type(v).__name__


class GraphRef:
    """The value bound to ``g`` inside a body."""

    __slots__ = ("cfg",)

    def __init__(self, cfg: Cfg):
        self.cfg = cfg


def structural_equal(a, b) -> bool:
    """Default fixpoint: plain value equality, with Null equal only to Null."""
    if a is None or b is None:
        return a is b
    return a == b


# -- compilation ---------------------------------------------------------------


class _Scope:
    def __init__(self, locals_: set[str], globals_: set[str], param: str | None, traversals: set[str]):
        self.locals = locals_
        self.globals = globals_
        self.param = param
        self.traversals = traversals


def _local_names(params, body) -> set[str]:
    names = set(params)
    for s in A.walk_stmts(body):
        if isinstance(s, A.VarDecl):
            names.add(s.name)
        elif isinstance(s, A.Foreach):
            names.add(s.var)
    return names


def _err(msg, pos):
    return DslRuntimeError.at(msg, pos)


def _compile_expr(e, sc: _Scope):
    if isinstance(e, (A.IntLit, A.StrLit, A.BoolLit)):
        v = e.value
        return lambda s, fr: v
    if isinstance(e, A.NullLit):
        return lambda s, fr: None
    if isinstance(e, A.Name):
        return _compile_name(e, sc)
    if isinstance(e, A.Field):
        return _compile_field(e, sc)
    if isinstance(e, A.SetLit):
        items = [_compile_expr(i, sc) for i in e.items]
        return lambda s, fr: {f(s, fr) for f in items}
    if isinstance(e, A.Unary):
        return _compile_unary(e, sc)
    if isinstance(e, A.Binary):
        return _compile_binary(e, sc)
    if isinstance(e, A.Call):
        return _compile_call(e, sc)
    raise AssertionError(e)


def _compile_name(e: A.Name, sc: _Scope):
    name = e.id
    if name in sc.locals:
        return lambda s, fr: fr[name]
    if name in sc.globals:
        return lambda s, fr: s.globals[name]
    if name == "node" and sc.param is not None:
        param = sc.param
        return lambda s, fr: fr[param]
    if name == "g":
        return lambda s, fr: s.graph_ref
    if name == "entryNodeId":
        return lambda s, fr: s.cfg.entry
    if name == "exitNodeId":
        if sc.param is None:
            return lambda s, fr: s.first_exit
        param = sc.param

        def exit_id(s, fr):
            n = fr[param]
            return n.id if n.id in s.cfg.exits else s.first_exit

        return exit_id
    raise DslNameError.at(f"undefined name {name!r}", e.pos)


_NODE_FIELDS = {
    "id": lambda s, n: n.id,
    "preds": lambda s, n: [s.nodes[i] for i in n.preds],
    "succs": lambda s, n: [s.nodes[i] for i in n.succs],
    "defs": lambda s, n: set(n.stmt.defs),
    "uses": lambda s, n: set(n.stmt.uses),
    "exprs": lambda s, n: set(n.stmt.exprs),
    "label": lambda s, n: n.stmt.label,
    "kind": lambda s, n: n.stmt.kind.value,
}
_GRAPH_FIELDS = {
    "nodes": lambda s, gr: list(s.nodes),
    "entry": lambda s, gr: s.nodes[s.cfg.entry],
}


def _compile_field(e: A.Field, sc: _Scope):
    obj = _compile_expr(e.obj, sc)
    fname, pos = e.name, e.pos
    node_get = _NODE_FIELDS.get(fname)
    graph_get = _GRAPH_FIELDS.get(fname)

    if fname == "id":
        def node_id(s, fr):
            o = obj(s, fr)
            if type(o) is Node:
                return o.id
            return field(s, fr)
        return_fast = node_id
    else:
        return_fast = None

    def field(s, fr):
        o = obj(s, fr)
        if type(o) is Node:
            if node_get is None:
                raise _err(f"Node has no field {fname!r}", pos)
            return node_get(s, o)
        if type(o) is GraphRef:
            if graph_get is None:
                raise _err(f"graph has no field {fname!r}", pos)
            return graph_get(s, o)
        if o is None:
            raise _err(f"field {fname!r} of null", pos)
        raise _err(f"{_show(o)} has no field {fname!r}", pos)

    return return_fast or field


def _compile_unary(e: A.Unary, sc: _Scope):
    f = _compile_expr(e.operand, sc)
    pos = e.pos
    if e.op == "!":
        def not_(s, fr):
            v = f(s, fr)
            if type(v) is not bool:
                raise _err(f"'!' needs a bool, got {_show(v)}", pos)
            return not v
        return not_

    def neg(s, fr):
        v = f(s, fr)
        if type(v) is not int:
            raise _err(f"'-' needs an int, got {_show(v)}", pos)
        return -v
    return neg


def _compile_binary(e: A.Binary, sc: _Scope):
    lf = _compile_expr(e.left, sc)
    rf = _compile_expr(e.right, sc)
    op, pos = e.op, e.pos

    if op in ("&&", "||"):
        want = op == "||"

        def logic(s, fr):
            a = lf(s, fr)
            if type(a) is not bool:
                raise _err(f"'{op}' needs bools, got {_show(a)}", pos)
            if a is want:
                return a
            b = rf(s, fr)
            if type(b) is not bool:
                raise _err(f"'{op}' needs bools, got {_show(b)}", pos)
            return b
        return logic
    if op == "==":
        return lambda s, fr: structural_equal(lf(s, fr), rf(s, fr))
    if op == "!=":
        return lambda s, fr: not structural_equal(lf(s, fr), rf(s, fr))

    fn = {
        "<": operator.lt, ">": operator.gt, "<=": operator.le, ">=": operator.ge,
        "+": operator.add, "-": operator.sub, "*": operator.mul,
    }[op]
    strings_ok = op in ("+", "<", ">", "<=", ">=")

    def arith(s, fr):
        a = lf(s, fr)
        b = rf(s, fr)
        ta, tb = type(a), type(b)
        if ta is tb and (ta is int or (strings_ok and ta is str)):
            return fn(a, b)
        raise _err(f"'{op}' cannot combine {_show(a)} and {_show(b)}", pos)
    return arith


def _need_coll(v, func, pos):
    t = type(v)
    if t is set or t is list:
        return v
    if v is None:
        raise _err(f"{func}() on a null collection", pos)
    raise _err(f"{func}() needs a collection, got {_show(v)}", pos)


def _b_add(c, x, pos):
    _need_coll(c, "add", pos)
    if type(c) is set:
        c.add(x)
    else:
        c.append(x)


def _b_remove(c, x, pos):
    _need_coll(c, "remove", pos)
    if type(c) is set:
        c.discard(x)
    elif x in c:
        c.remove(x)


def _b_add_all(c, xs, pos):
    _need_coll(c, "addAll", pos)
    if xs is None:
        return
    _need_coll(xs, "addAll", pos)
    if type(c) is set:
        c.update(xs)
    else:
        c.extend(xs)


def _b_remove_all(c, xs, pos):
    _need_coll(c, "removeAll", pos)
    if xs is None:
        return
    _need_coll(xs, "removeAll", pos)
    if type(c) is set:
        c.difference_update(xs)
    else:
        drop = list(xs)
        c[:] = [x for x in c if x not in drop]


def _b_union(a, b, pos):
    # Null stands for "no information yet" and is the identity of both operations
    if a is None:
        return None if b is None else _fresh(_need_coll(b, "union", pos))
    if b is None:
        return _fresh(_need_coll(a, "union", pos))
    _need_coll(a, "union", pos)
    _need_coll(b, "union", pos)
    if type(a) is list:
        return a + [x for x in b if x not in a]
    return a.union(b)


def _b_intersection(a, b, pos):
    if a is None:
        return None if b is None else _fresh(_need_coll(b, "intersection", pos))
    if b is None:
        return _fresh(_need_coll(a, "intersection", pos))
    _need_coll(a, "intersection", pos)
    _need_coll(b, "intersection", pos)
    if type(a) is list:
        return [x for x in a if x in b]
    return a.intersection(b)


def _b_contains(c, x, pos):
    if c is None:
        return False
    _need_coll(c, "contains", pos)
    return x in c


def _b_len(c, pos):
    if c is None:
        raise _err("len() of null", pos)
    if type(c) is str:
        return len(c)
    return len(_need_coll(c, "len", pos))


_BUILTIN_FNS = {
    "add": _b_add,
    "remove": _b_remove,
    "addAll": _b_add_all,
    "removeAll": _b_remove_all,
    "union": _b_union,
    "intersection": _b_intersection,
    "contains": _b_contains,
    "equals": lambda a, b, pos: structural_equal(a, b),
    "len": _b_len,
}


def _compile_call(e: A.Call, sc: _Scope):
    func, pos = e.func, e.pos
    if func not in BUILTINS:
        raise DslNameError.at(f"unknown function {func!r}", pos)
    if func == "output":
        ref = e.args[1]
        if not isinstance(ref, A.Name) or ref.id not in sc.traversals:
            raise DslNameError.at("output() needs a declared traversal as second argument", pos)
        tname = ref.id
        nf = _compile_expr(e.args[0], sc)

        def output(s, fr):
            n = nf(s, fr)
            if type(n) is not Node:
                raise _err(f"output() needs a Node, got {_show(n)}", pos)
            if tname == s.current:
                s.reads.add(n.id)
            return _fresh(s.outputs[tname].get(n.id))

        return output

    fn = _BUILTIN_FNS[func]
    args = [_compile_expr(a, sc) for a in e.args]
    if len(args) == 1:
        (a0,) = args
        return lambda s, fr: fn(a0(s, fr), pos)
    a0, a1 = args
    return lambda s, fr: fn(a0(s, fr), a1(s, fr), pos)


def _compile_assign_target(name: str, sc: _Scope):
    if name in sc.locals:
        def set_local(s, fr, v):
            fr[name] = v
        return set_local

    def set_global(s, fr, v):
        s.globals[name] = v
    return set_global


def _compile_stmt(st, sc: _Scope):
    if isinstance(st, A.Block):
        return _compile_block(st.stmts, sc)
    if isinstance(st, A.VarDecl):
        name, ty = st.name, st.type
        if st.init is None:
            def decl(s, fr):
                fr[name] = default_value(ty)
                return _NO_RETURN
            return decl
        init = _compile_expr(st.init, sc)
        copy = isinstance(st.init, A.Name)

        def decl_init(s, fr):
            v = init(s, fr)
            fr[name] = _fresh(v) if copy else v
            return _NO_RETURN
        return decl_init
    if isinstance(st, A.Assign):
        value = _compile_expr(st.value, sc)
        target = _compile_assign_target(st.name, sc)
        copy = isinstance(st.value, A.Name)

        def assign(s, fr):
            v = value(s, fr)
            target(s, fr, _fresh(v) if copy else v)
            return _NO_RETURN
        return assign
    if isinstance(st, A.ExprStmt):
        f = _compile_expr(st.expr, sc)

        def expr_stmt(s, fr):
            f(s, fr)
            return _NO_RETURN
        return expr_stmt
    if isinstance(st, A.If):
        cond = _compile_expr(st.cond, sc)
        then = _compile_stmt(st.then, sc)
        orelse = _compile_stmt(st.orelse, sc) if st.orelse is not None else None
        pos = st.pos

        def if_(s, fr):
            c = cond(s, fr)
            if c is True:
                return then(s, fr)
            if c is not False:
                raise _err(f"if condition must be a bool, got {_show(c)}", pos)
            return orelse(s, fr) if orelse is not None else _NO_RETURN
        return if_
    if isinstance(st, A.Foreach):
        it = _compile_expr(st.iterable, sc)
        body = _compile_stmt(st.body, sc)
        var, pos = st.var, st.pos

        def foreach(s, fr):
            c = it(s, fr)
            t = type(c)
            if t is set:
                try:
                    items = sorted(c, key=_order_key)
                except TypeError:
                    raise _err("foreach over a set with mixed element types", pos) from None
            elif t is list:
                items = list(c)
            elif c is None:
                raise _err("foreach over null", pos)
            else:
                raise _err(f"foreach needs a collection, got {_show(c)}", pos)
            for x in items:
                fr[var] = x
                r = body(s, fr)
                if r is not _NO_RETURN:
                    return r
            return _NO_RETURN
        return foreach
    if isinstance(st, A.Return):
        if st.value is None:
            return lambda s, fr: None
        f = _compile_expr(st.value, sc)
        return lambda s, fr: _fresh(f(s, fr))
    raise AssertionError(st)


def _compile_block(stmts, sc: _Scope):
    fns = [_compile_stmt(s, sc) for s in stmts]
    if len(fns) == 1:
        return fns[0]

    def block(s, fr):
        for f in fns:
            r = f(s, fr)
            if r is not _NO_RETURN:
                return r
        return _NO_RETURN
    return block


class _CompiledBody:
    __slots__ = ("name", "run", "frame", "params", "returns")

    def __init__(self, name, params, body, sc_globals, traversals, param_for_node, returns):
        locals_ = _local_names(params, body)
        for s in A.walk_stmts(body):
            if isinstance(s, A.Assign) and s.name not in sc_globals:
                locals_.add(s.name)
        sc = _Scope(locals_, sc_globals - locals_, param_for_node, traversals)
        self.name = name
        self.run = _compile_block(body, sc)
        self.frame = dict.fromkeys(locals_)
        self.params = params
        self.returns = returns


class CompiledProgram:
    """A checked program with every body compiled; immutable and shareable."""

    def __init__(self, program: A.DslProgram):
        self.program = program
        global_names = {d.name for d in program.globals}
        trav_names = {t.name for t in program.traversals}
        self.traversals = {
            t.name: _CompiledBody(
                t.name, (t.param,), t.body, global_names, trav_names, t.param, t.return_type is not None
            )
            for t in program.traversals
        }
        self.fixpoints = {
            f.name: _CompiledBody(
                f.name, tuple(n for n, _ in f.params), f.body, global_names, trav_names, None, True
            )
            for f in program.fixpoints
        }
        init_scope = _Scope(set(), global_names, None, trav_names)
        self.global_inits = [
            (d.name, d.type, None if d.init is None else _compile_expr(d.init, init_scope))
            for d in program.globals
        ]


class Session:
    """Mutable evaluation state of one program on one graph."""

    def __init__(self, compiled: CompiledProgram, cfg: Cfg):
        self.compiled = compiled
        self.cfg = cfg
        self.nodes = cfg.nodes
        self.graph_ref = GraphRef(cfg)
        self.first_exit = min(cfg.exits)
        self.outputs: dict[str, dict[int, object]] = {name: {} for name in compiled.traversals}
        self.current: str | None = None
        self.reads: set[int] = set()
        self.globals: dict[str, object] = {}
        for name, ty, init in compiled.global_inits:
            self.globals[name] = default_value(ty) if init is None else _fresh(init(self, {}))

    def visit(self, traversal: str, node_id: int):
        """Evaluate ``traversal`` at one node and return the body's result.

        The caller decides whether to store it in :attr:`outputs`.  Ids of
        nodes whose output for the same traversal was read are left in
        :attr:`reads`.
        """
        body = self.compiled.traversals[traversal]
        fr = body.frame.copy()
        fr[body.params[0]] = self.nodes[node_id]
        self.current = traversal
        self.reads = set()
        r = body.run(self, fr)
        if r is _NO_RETURN:
            if body.returns:
                raise DslRuntimeError(f"traversal {traversal!r} ended without returning a value")
            return None
        return r

    def converged(self, fixpoint: str | None, current, previous) -> bool:
        if fixpoint is None:
            return structural_equal(current, previous)
        body = self.compiled.fixpoints[fixpoint]
        fr = body.frame.copy()
        fr[body.params[0]] = _fresh(current)
        fr[body.params[1]] = _fresh(previous)
        r = body.run(self, fr)
        if type(r) is not bool:
            shown = "no value" if r is _NO_RETURN else _show(r)
            raise DslRuntimeError(f"fixpoint {fixpoint!r} must return a bool, got {shown}")
        return r


def eval_traversal_body(t: A.TraversalDecl, n: Node, g: Cfg, outputs: dict, globals_: dict, program: A.DslProgram | None = None):
    """Evaluate one traversal body at one node.

    ``outputs`` maps traversal names to ``{node id: value}`` and ``globals_``
    maps global names to values; both are used in place, so global side
    effects are visible to the caller.
    """
    program = program or A.DslProgram(traversals=(t,))
    session = Session(CompiledProgram(program), g)
    session.outputs.update(outputs)
    session.outputs.setdefault(t.name, {})
    for name, value in session.globals.items():
        globals_.setdefault(name, value)
    session.globals = globals_
    return session.visit(t.name, n.id)


def eval_fixpoint(f: A.FixpointDecl | None, current, previous) -> bool:
    """``f(current, previous)``; ``None`` selects the default structural equality."""
    if f is None:
        return structural_equal(current, previous)
    if len(f.params) != 2:
        raise DslRuntimeError(f"fixpoint {f.name!r} takes {len(f.params)} parameters, expected 2")
    compiled = CompiledProgram(A.DslProgram(fixpoints=(f,)))
    body = compiled.fixpoints[f.name]
    fr = body.frame.copy()
    fr[body.params[0]] = _fresh(current)
    fr[body.params[1]] = _fresh(previous)
    r = body.run(None, fr)
    if type(r) is not bool:
        raise DslRuntimeError(f"fixpoint {f.name!r} must return a bool")
    return r
