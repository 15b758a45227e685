"""Lexer and recursive-descent parser for the traversal DSL.

A statement's trailing ``;`` may be left out when the next token starts a
new line or closes the block; everywhere else it is required.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

from . import ast as A
from .errors import DslNameError, DslSyntaxError, DslTypeError

KEYWORDS = {
    "traversal", "fixp", "traverse", "if", "else", "foreach", "return",
    "true", "false", "null",
}
TYPE_NAMES = {"int", "bool", "string", "Node", "Set", "Seq"}
DIRECTIONS = {d.value: d for d in A.Direction}

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<comment>//[^\n]*)
  | (?P<int>\d+)
  | (?P<str>"(?:[^"\\\n]|\\.)*")
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>:=|==|!=|<=|>=|&&|\|\||[(){}<>,;:.=!+\-*])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str  # ident | int | str | op | eof
    text: str
    line: int
    col: int
    newline_before: bool


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, line_start, pos = 1, 0, 0
    newline = True
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise DslSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        col = pos - line_start + 1
        if kind == "nl":
            line += 1
            line_start = m.end()
            newline = True
        elif kind in ("ws", "comment"):
            pass
        else:
            value = m.group()
            if kind == "str":
                try:
                    value = json.loads(value)
                except ValueError:
                    raise DslSyntaxError("bad string escape", line, col) from None
            tokens.append(Token(kind, value, line, col, newline))
            newline = False
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1, True))
    return tokens


class Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.i = 0

    # -- token helpers -------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text: str, kind: str | None = None) -> bool:
        t = self.tok
        return t.text == text and (kind is None or t.kind == kind) and t.kind != "str"

    def error(self, msg: str, tok: Token | None = None) -> DslSyntaxError:
        tok = tok or self.tok
        found = "end of input" if tok.kind == "eof" else repr(tok.text)
        return DslSyntaxError(f"{msg}, found {found}", tok.line, tok.col)

    def advance(self) -> Token:
        t = self.tok
        self.i += 1
        return t

    def expect(self, text: str) -> Token:
        if not self.at(text):
            raise self.error(f"expected {text!r}")
        return self.advance()

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.advance()
            return True
        return False

    def ident(self, what: str = "identifier") -> Token:
        t = self.tok
        if t.kind != "ident" or t.text in KEYWORDS:
            raise self.error(f"expected {what}")
        return self.advance()

    def end_stmt(self):
        if self.accept(";"):
            return
        t = self.tok
        if t.newline_before or t.kind == "eof" or self.at("}"):
            return
        raise self.error("expected ';'")

    @staticmethod
    def pos(t: Token) -> tuple[int, int]:
        return (t.line, t.col)

    # -- types ---------------------------------------------------------------

    def at_type(self) -> bool:
        t = self.tok
        if t.kind != "ident" or t.text not in TYPE_NAMES:
            return False
        if t.text in ("Set", "Seq"):
            return self.peek().text == "<"
        # `int x` style declaration, but not `Node` used as a value
        return self.peek().kind == "ident" and self.peek().text not in KEYWORDS

    def type_ref(self) -> A.TypeRef:
        t = self.tok
        if t.kind != "ident" or t.text not in TYPE_NAMES:
            raise self.error("expected a type")
        self.advance()
        if t.text in ("Set", "Seq"):
            self.expect("<")
            elem = self.type_ref()
            self.expect(">")
            return A.TypeRef(t.text, elem)
        return A.TypeRef(t.text)

    # -- program -------------------------------------------------------------

    def program(self) -> A.DslProgram:
        globals_, travs, fixps, invs = [], [], [], []
        while self.tok.kind != "eof":
            t = self.tok
            if self.at("traverse"):
                invs.append(self.traverse_stmt())
            elif t.kind == "ident" and self.peek().text == ":=":
                name = self.ident().text
                self.expect(":=")
                if self.at("traversal"):
                    travs.append(self.traversal(name, t))
                elif self.at("fixp"):
                    fixps.append(self.fixpoint(name, t))
                else:
                    raise self.error("expected 'traversal' or 'fixp'")
            elif t.kind == "ident" and self.peek().text == ":":
                globals_.append(self.colon_decl())
            else:
                raise self.error("expected a declaration or traverse statement")
        return A.DslProgram(tuple(globals_), tuple(travs), tuple(fixps), tuple(invs))

    def colon_decl(self) -> A.VarDecl:
        t = self.ident()
        self.expect(":")
        ty = self.type_ref()
        init = self.expr() if self.accept("=") else None
        self.end_stmt()
        return A.VarDecl(t.text, ty, init, pos=self.pos(t))

    def traversal(self, name: str, start: Token) -> A.TraversalDecl:
        self.expect("traversal")
        self.expect("(")
        param = self.ident("node parameter").text
        self.expect(":")
        if not self.at("Node"):
            raise self.error("traversal parameter must have type Node")
        self.advance()
        self.expect(")")
        ret = self.type_ref() if self.accept(":") else None
        body = self.block_body()
        return A.TraversalDecl(name, param, ret, body, pos=self.pos(start))

    def fixpoint(self, name: str, start: Token) -> A.FixpointDecl:
        self.expect("fixp")
        self.expect("(")
        params = []
        if not self.at(")"):
            while True:
                ty = self.type_ref()
                params.append((self.ident("parameter name").text, ty))
                if not self.accept(","):
                    break
        self.expect(")")
        self.expect(":")
        ret = self.type_ref()
        body = self.block_body()
        return A.FixpointDecl(name, tuple(params), ret, body, pos=self.pos(start))

    def traverse_stmt(self) -> A.TraverseStmt:
        start = self.expect("traverse")
        self.expect("(")
        graph = self.ident("graph").text
        self.expect(",")
        trav = self.ident("traversal name").text
        self.expect(",")
        d = self.tok
        if d.text not in DIRECTIONS or d.kind != "ident":
            raise self.error("expected FORWARD, BACKWARD or ITERATIVE")
        self.advance()
        fp = None
        if self.accept(","):
            fp = self.ident("fixpoint name").text
        self.expect(")")
        self.end_stmt()
        return A.TraverseStmt(graph, trav, DIRECTIONS[d.text], fp, pos=self.pos(start))

    # -- statements ----------------------------------------------------------

    def block_body(self) -> tuple[A.Stmt, ...]:
        self.expect("{")
        stmts = []
        while not self.at("}"):
            if self.tok.kind == "eof":
                raise self.error("expected '}'")
            stmts.append(self.statement())
        self.expect("}")
        return tuple(stmts)

    def statement(self) -> A.Stmt:
        t = self.tok
        p = self.pos(t)
        if self.at("{"):
            return A.Block(self.block_body(), pos=p)
        if self.at("if"):
            self.advance()
            self.expect("(")
            cond = self.expr()
            self.expect(")")
            then = self.statement()
            orelse = self.statement() if self.accept("else") else None
            return A.If(cond, then, orelse, pos=p)
        if self.at("foreach"):
            self.advance()
            self.expect("(")
            var = self.ident("loop variable").text
            self.expect(":")
            iterable = self.expr()
            self.expect(")")
            return A.Foreach(var, iterable, self.statement(), pos=p)
        if self.at("return"):
            self.advance()
            value = None
            if not (self.at(";") or self.at("}") or self.tok.newline_before):
                value = self.expr()
            self.end_stmt()
            return A.Return(value, pos=p)
        if self.at_type():
            ty = self.type_ref()
            name = self.ident("variable name").text
            init = self.expr() if self.accept("=") else None
            self.end_stmt()
            return A.VarDecl(name, ty, init, pos=p)
        if t.kind == "ident" and t.text not in KEYWORDS:
            nxt = self.peek().text
            if nxt == ":" and self.peek().kind == "op":
                return self.colon_decl()
            if nxt == "=" and self.peek().kind == "op":
                self.advance()
                self.advance()
                value = self.expr()
                self.end_stmt()
                return A.Assign(t.text, value, pos=p)
        e = self.expr()
        self.end_stmt()
        return A.ExprStmt(e, pos=p)

    # -- expressions ---------------------------------------------------------

    _BINARY = [("||",), ("&&",), ("==", "!="), ("<", ">", "<=", ">="), ("+", "-"), ("*",)]

    def expr(self, level: int = 0) -> A.Expr:
        if level == len(self._BINARY):
            return self.unary()
        left = self.expr(level + 1)
        while self.tok.kind == "op" and self.tok.text in self._BINARY[level]:
            op = self.advance()
            right = self.expr(level + 1)
            left = A.Binary(op.text, left, right, pos=self.pos(op))
        return left

    def unary(self) -> A.Expr:
        if self.tok.kind == "op" and self.tok.text in ("!", "-"):
            op = self.advance()
            return A.Unary(op.text, self.unary(), pos=self.pos(op))
        e = self.primary()
        while self.at("."):
            dot = self.advance()
            e = A.Field(e, self.ident("field name").text, pos=self.pos(dot))
        return e

    def primary(self) -> A.Expr:
        t = self.tok
        p = self.pos(t)
        if t.kind == "int":
            self.advance()
            return A.IntLit(int(t.text), pos=p)
        if t.kind == "str":
            self.advance()
            return A.StrLit(t.text, pos=p)
        if t.kind == "ident" and t.text in ("true", "false"):
            self.advance()
            return A.BoolLit(t.text == "true", pos=p)
        if t.kind == "ident" and t.text == "null":
            self.advance()
            return A.NullLit(pos=p)
        if self.at("("):
            self.advance()
            e = self.expr()
            self.expect(")")
            return e
        if self.at("{"):
            self.advance()
            items = []
            if not self.at("}"):
                while True:
                    items.append(self.expr())
                    if not self.accept(","):
                        break
            self.expect("}")
            return A.SetLit(tuple(items), pos=p)
        if t.kind == "ident" and (t.text not in KEYWORDS):
            self.advance()
            if self.at("("):
                self.advance()
                args = []
                if not self.at(")"):
                    while True:
                        args.append(self.expr())
                        if not self.accept(","):
                            break
                self.expect(")")
                return A.Call(t.text, tuple(args), pos=p)
            return A.Name(t.text, pos=p)
        raise self.error("expected an expression")


def parse_program(text: str) -> A.DslProgram:
    """Parse and check a DSL program."""
    from .check import check_program

    program = Parser(text).program()
    check_program(program)
    return program


__all__ = ["parse_program", "tokenize", "Parser", "DslNameError", "DslTypeError"]
