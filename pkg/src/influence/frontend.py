"""A small C-like language, its control flow graph and LTS extraction.

Grammar (see README for examples)::

    program    := decl* ( procedure+ | stmt* )
    decl       := ("int" | "bool") NAME ("," NAME)* ";"
    procedure  := "void" NAME "(" ")" "{" decl* stmt* "}"
    stmt       := NAME ":"                       label, names the next program point
                | NAME "=" expr ";"
                | "if" "(" expr ")" block ["else" (block | if)]
                | "while" "(" expr ")" block
                | "assert" "(" expr ")" ";"
                | "skip" ";"
                | block
    block      := "{" stmt* "}"

Expressions use C operators over integers and ``true``/``false``; only the
set of variables they read matters to the analysis.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from lark import Lark, Token, Transformer
from lark.exceptions import UnexpectedInput

from .lts import TAU, Assert, Assign, Bool, Lts

GRAMMAR = r"""
start: decl* (procedure+ | stmt*)

decl: TYPE NAME ("," NAME)* ";"
TYPE.2: /(int|bool)\b/

procedure: "void" NAME "(" ")" "{" decl* stmt* "}"

?stmt: label | assign | if_stmt | while_stmt | assert_stmt | skip_stmt | block
label: NAME ":"
assign: NAME "=" expr ";"
if_stmt: "if" "(" expr ")" block ("else" (block | if_stmt))?
while_stmt: "while" "(" expr ")" block
assert_stmt: "assert" "(" expr ")" ";"
skip_stmt: "skip" ";"
block: "{" stmt* "}"

?expr: or_expr
?or_expr: and_expr | or_expr "||" and_expr
?and_expr: cmp_expr | and_expr "&&" cmp_expr
?cmp_expr: add_expr | add_expr CMP_OP add_expr
?add_expr: mul_expr | add_expr ADD_OP mul_expr
?mul_expr: unary | mul_expr MUL_OP unary
?unary: atom | UN_OP unary
?atom: NAME -> var
     | INT -> const
     | "true" -> const
     | "false" -> const
     | "(" expr ")"

CMP_OP: "==" | "!=" | "<=" | ">=" | "<" | ">"
ADD_OP: "+" | "-"
MUL_OP: "*" | "/" | "%"
UN_OP: "!" | "-"

NAME: /[A-Za-z_][A-Za-z0-9_]*/
INT: /[0-9]+/

%import common.WS
COMMENT: "//" /[^\n]*/
BLOCK_COMMENT: "/*" /(.|\n)*?/ "*/"
%ignore WS
%ignore COMMENT
%ignore BLOCK_COMMENT
"""

_parser = Lark(GRAMMAR, parser="lalr", propagate_positions=True)


class FrontendError(ValueError):
    """Syntax or scoping error, with a 1-based source position when known."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line, self.column = line, column
        where = f"{line}:{column}: " if line is not None else ""
        super().__init__(where + message)


@dataclass(frozen=True)
class Expr:
    text: str
    used_vars: tuple[str, ...]
    positions: tuple = field(default=(), compare=False, repr=False)


@dataclass(frozen=True)
class AssignStmt:
    target: str
    expr: Expr


@dataclass(frozen=True)
class IfStmt:
    cond: Expr
    then: tuple
    orelse: tuple = ()


@dataclass(frozen=True)
class WhileStmt:
    cond: Expr
    body: tuple


@dataclass(frozen=True)
class AssertStmt:
    expr: Expr


@dataclass(frozen=True)
class SkipStmt:
    pass


@dataclass(frozen=True)
class LabelStmt:
    name: str


Statement = Union[AssignStmt, IfStmt, WhileStmt, AssertStmt, SkipStmt, LabelStmt]


@dataclass(frozen=True)
class Procedure:
    name: str
    body: tuple


@dataclass(frozen=True)
class Program:
    variables: tuple[str, ...]
    procedures: tuple[Procedure, ...]


class _Builder(Transformer):
    def __init__(self, source: str):
        super().__init__()
        self.source = source

    def _expr(self, tree) -> Expr:
        if isinstance(tree, Token):
            names = [tree] if tree.type == "NAME" else []
            text = str(tree)
        else:
            names = list(tree.scan_values(lambda v: isinstance(v, Token) and v.type == "NAME"))
            text = self.source[tree.meta.start_pos:tree.meta.end_pos]
        first = {}
        for tok in names:
            first.setdefault(str(tok), (tok.line, tok.column))
        return Expr(text, tuple(first), tuple((n, *pos) for n, pos in first.items()))

    # expression subtrees stay raw trees until a statement collapses them
    def var(self, children):
        return children[0]

    def const(self, children):
        return Token("INT", str(children[0]) if children else "true")

    def assign(self, children):
        name, expr = children
        return ("assign", name, self._expr(expr))

    def label(self, children):
        return ("label", children[0])

    def if_stmt(self, children):
        cond, then, *rest = children
        orelse = rest[0] if rest else ()
        if isinstance(orelse, tuple) and orelse and orelse[0] == "if":
            orelse = [orelse]
        return ("if", self._expr(cond), then, orelse)

    def while_stmt(self, children):
        cond, body = children
        return ("while", self._expr(cond), body)

    def assert_stmt(self, children):
        return ("assert", self._expr(children[0]))

    def skip_stmt(self, children):
        return ("skip",)

    def block(self, children):
        return list(children)

    def decl(self, children):
        return ("decl", children[1:])

    def procedure(self, children):
        return ("proc", children[0], children[1:])


def _convert(items, declared: dict, labels: set) -> tuple:
    out: list = []
    for item in items:
        if isinstance(item, list):
            out.extend(_convert(item, declared, labels))
            continue
        tag = item[0]
        if tag == "label":
            tok = item[1]
            if str(tok) in labels:
                raise FrontendError(f"duplicate label {tok}", *_pos(tok))
            labels.add(str(tok))
            out.append(LabelStmt(str(tok)))
        elif tag == "assign":
            tok, expr = item[1], item[2]
            _check_use(tok, declared)
            _check_expr(expr, declared)
            out.append(AssignStmt(str(tok), expr))
        elif tag == "if":
            _check_expr(item[1], declared)
            out.append(IfStmt(item[1], _convert(item[2], declared, labels),
                              _convert(item[3], declared, labels)))
        elif tag == "while":
            _check_expr(item[1], declared)
            out.append(WhileStmt(item[1], _convert(item[2], declared, labels)))
        elif tag == "assert":
            _check_expr(item[1], declared)
            out.append(AssertStmt(item[1]))
        elif tag == "skip":
            out.append(SkipStmt())
    return tuple(out)


def _pos(tok) -> tuple:
    return (getattr(tok, "line", None), getattr(tok, "column", None))


def _check_use(tok, declared: dict) -> None:
    if str(tok) not in declared:
        raise FrontendError(f"undeclared variable {tok}", *_pos(tok))


def _check_expr(expr: Expr, declared: dict) -> None:
    for name, line, column in expr.positions:
        if name not in declared:
            raise FrontendError(f"undeclared variable {name}", line, column)


RESERVED = frozenset({"int", "bool", "void", "if", "else", "while", "assert", "skip", "true", "false"})


def _declare(decl_items, declared: dict) -> None:
    for tok in decl_items:
        if str(tok) in RESERVED:
            raise FrontendError(f"reserved word {tok} used as a variable", *_pos(tok))
        if str(tok) in declared:
            raise FrontendError(f"duplicate declaration of {tok}", *_pos(tok))
        declared[str(tok)] = tok


def parse_program(source: str) -> Program:
    try:
        tree = _parser.parse(source)
    except UnexpectedInput as exc:
        raise FrontendError(f"syntax error: {_describe(exc)}", exc.line, exc.column) from None
    items = _Builder(source).transform(tree).children
    declared: dict = {}
    labels: set = set()
    procs: list[Procedure] = []
    top: list = []
    proc_items = []
    for item in items:
        if item[0] == "decl":
            _declare(item[1], declared)
        elif item[0] == "proc":
            proc_items.append(item)
        else:
            top.append(item)
    for _, name, body in proc_items:
        local = [b for b in body if isinstance(b, tuple) and b[0] == "decl"]
        for d in local:
            _declare(d[1], declared)
    seen_procs = set()
    for _, name, body in proc_items:
        if str(name) in seen_procs:
            raise FrontendError(f"duplicate procedure {name}", *_pos(name))
        seen_procs.add(str(name))
        stmts = [b for b in body if not (isinstance(b, tuple) and b[0] == "decl")]
        procs.append(Procedure(str(name), _convert(stmts, declared, labels)))
    if not proc_items:
        procs.append(Procedure("main", _convert(top, declared, labels)))
    return Program(tuple(declared), tuple(procs))


def _describe(exc: UnexpectedInput) -> str:
    token = getattr(exc, "token", None)
    if token is not None:
        return f"unexpected {token!r}" if str(token) else "unexpected end of input"
    char = getattr(exc, "char", None)
    return f"unexpected character {char!r}" if char else type(exc).__name__


@dataclass(frozen=True)
class RawAction:
    kind: str
    target: Optional[str] = None
    vars: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in ("TAU", "BOOL", "ASSIGN", "ASSERT"):
            raise ValueError(f"unknown action kind {self.kind}")
        if self.kind == "TAU" and (self.vars or self.target is not None):
            raise ValueError("TAU carries no variables")
        if self.kind == "ASSIGN" and self.target is None:
            raise ValueError("ASSIGN needs a target")
        if self.kind in ("BOOL", "ASSERT") and self.target is not None:
            raise ValueError(f"{self.kind} has no target")


@dataclass(frozen=True)
class Cfg:
    num_nodes: int
    edges: tuple[tuple[int, RawAction, int], ...]
    entry: int = 0
    labels: dict = field(default_factory=dict, compare=False)

    @property
    def nodes(self) -> range:
        return range(self.num_nodes)


def build_cfg(program: Program, procedure: Optional[str] = None) -> Cfg:
    """Control flow graph of one procedure (the first one by default).

    Every non-label statement owns the program point where it starts; one
    extra node is the procedure exit. Nodes are numbered in statement order
    so the entry is 0. Labels name the next program point.
    """
    if procedure is None:
        proc = program.procedures[0]
    else:
        matches = [p for p in program.procedures if p.name == procedure]
        if not matches:
            raise KeyError(f"no procedure named {procedure!r}")
        proc = matches[0]

    ids: dict[int, int] = {}

    def number(stmts) -> None:
        for st in stmts:
            if isinstance(st, LabelStmt):
                continue
            ids[id(st)] = len(ids)
            if isinstance(st, IfStmt):
                number(st.then)
                number(st.orelse)
            elif isinstance(st, WhileStmt):
                number(st.body)

    number(proc.body)
    exit_node = len(ids)
    edges: list = []
    labels: dict[str, int] = {}

    def link(stmts, follow: int) -> int:
        # walk backwards so every statement knows its successor point
        nxt = follow
        for st in reversed(stmts):
            if isinstance(st, LabelStmt):
                labels[st.name] = nxt
                continue
            node = ids[id(st)]
            if isinstance(st, AssignStmt):
                edges.append((node, RawAction("ASSIGN", st.target, st.expr.used_vars), nxt))
            elif isinstance(st, AssertStmt):
                edges.append((node, _cond_action("ASSERT", st.expr), nxt))
            elif isinstance(st, SkipStmt):
                edges.append((node, RawAction("TAU"), nxt))
            elif isinstance(st, IfStmt):
                act = _cond_action("BOOL", st.cond)
                edges.append((node, act, link(st.then, nxt)))
                edges.append((node, act, link(st.orelse, nxt)))
            elif isinstance(st, WhileStmt):
                act = _cond_action("BOOL", st.cond)
                edges.append((node, act, link(st.body, node)))
                edges.append((node, act, nxt))
            nxt = node
        return nxt

    entry = link(proc.body, exit_node)
    assert entry == (0 if ids else exit_node)
    edges.sort(key=lambda e: (e[0], e[2], e[1].kind, e[1].target or "", e[1].vars))
    return Cfg(exit_node + 1, tuple(edges), entry, labels)


def _cond_action(kind: str, expr: Expr) -> RawAction:
    return RawAction(kind, None, expr.used_vars) if expr.used_vars else RawAction("TAU")


def cfg_to_lts(cfg: Cfg) -> Lts:
    """Split CFG actions into unary BOOL/ASSERT and binary ASSIGN transitions."""
    transitions = []
    for src, act, dst in cfg.edges:
        if act.kind == "TAU" or (act.kind in ("BOOL", "ASSERT") and not act.vars):
            transitions.append((src, TAU, dst))
        elif act.kind == "BOOL":
            transitions.extend((src, Bool(v), dst) for v in act.vars)
        elif act.kind == "ASSERT":
            transitions.extend((src, Assert(v), dst) for v in act.vars)
        elif not act.vars:
            transitions.append((src, Assign(act.target), dst))
        else:
            transitions.extend((src, Assign(act.target, v), dst) for v in act.vars)
    return Lts(cfg.num_nodes, tuple(transitions), cfg.entry)


def source_to_lts(source: str) -> tuple[Lts, Cfg]:
    cfg = build_cfg(parse_program(source))
    return cfg_to_lts(cfg), cfg
