"""Typed AST for the synthesizable Verilog subset.

Every node records its source line/column for diagnostics. Structural
comparison (which ignores locations) goes through ast_equal(), not ==;
the dataclasses deliberately keep identity equality so nodes can live in
sets and dicts during analysis.

Widths are plain bit counts. All declaration ranges are [width-1:0] and
are resolved to integers during elaboration, so no parameter identifier
survives in any expression.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Optional, Union


@dataclass(eq=False)
class Node:
    line: int = field(default=0, kw_only=True, repr=False)
    col: int = field(default=0, kw_only=True, repr=False)
    # Set when an `(* assure_skip *)` attribute or `// assure: skip`
    # comment immediately precedes the construct.
    skip_pragma: bool = field(default=False, kw_only=True)


# ---- Expressions ----

@dataclass(eq=False)
class Literal(Node):
    """2-state numeric literal. Unsized literals carry width 32."""
    value: int = 0
    width: int = 32
    sized: bool = True


@dataclass(eq=False)
class MaskedLiteral(Node):
    """casez item label with `?` don't-care digits.

    `care` has a 1 for every bit that participates in the match.
    Only valid as a casez label; the parser rejects it elsewhere.
    """
    value: int = 0
    width: int = 1
    care: int = 0


@dataclass(eq=False)
class Ident(Node):
    name: str = ""


@dataclass(eq=False)
class BitSelect(Node):
    name: str = ""
    index: "Expr" = None


@dataclass(eq=False)
class PartSelect(Node):
    name: str = ""
    msb: int = 0
    lsb: int = 0


@dataclass(eq=False)
class Unary(Node):
    op: str = ""
    operand: "Expr" = None


@dataclass(eq=False)
class Binary(Node):
    op: str = ""
    left: "Expr" = None
    right: "Expr" = None


@dataclass(eq=False)
class Ternary(Node):
    cond: "Expr" = None
    then_val: "Expr" = None
    else_val: "Expr" = None


@dataclass(eq=False)
class Concat(Node):
    parts: list["Expr"] = field(default_factory=list)


@dataclass(eq=False)
class Repeat(Node):
    count: int = 1
    value: "Expr" = None


@dataclass(eq=False)
class KeySlice(Node):
    """Module-local abstract key bits [offset, offset+width).

    Produced by the obfuscation engine; the backend rewrites every
    KeySlice into a part-select of the module's key port. The emitter
    refuses to print one, so a leak is caught immediately.
    """
    offset: int = 0
    width: int = 1


Expr = Union[Literal, MaskedLiteral, Ident, BitSelect, PartSelect, Unary,
             Binary, Ternary, Concat, Repeat, KeySlice]


# ---- Statements ----

@dataclass(eq=False)
class BlockingAssign(Node):
    lhs: Expr = None
    rhs: Expr = None


@dataclass(eq=False)
class NonBlockingAssign(Node):
    lhs: Expr = None
    rhs: Expr = None


@dataclass(eq=False)
class IfStmt(Node):
    cond: Expr = None
    then_body: list["Stmt"] = field(default_factory=list)
    else_body: list["Stmt"] = field(default_factory=list)


@dataclass(eq=False)
class CaseItem(Node):
    labels: list[Expr] = field(default_factory=list)
    body: list["Stmt"] = field(default_factory=list)


@dataclass(eq=False)
class CaseStmt(Node):
    selector: Expr = None
    items: list[CaseItem] = field(default_factory=list)
    default_body: Optional[list["Stmt"]] = None
    casez: bool = False


@dataclass(eq=False)
class ForStmt(Node):
    """for (var = init; cond; var = step) — bounds constant after elaboration."""
    var: str = ""
    init: Expr = None
    cond: Expr = None
    step: Expr = None
    body: list["Stmt"] = field(default_factory=list)


Stmt = Union[BlockingAssign, NonBlockingAssign, IfStmt, CaseStmt, ForStmt]


# ---- Module items ----

@dataclass(eq=False)
class PortDecl(Node):
    name: str = ""
    direction: str = "input"          # input | output | inout
    width: int = 1
    signed: bool = False
    kind: str = "wire"                # wire | reg


@dataclass(eq=False)
class NetDecl(Node):
    name: str = ""
    kind: str = "wire"                # wire | reg | integer
    width: int = 1
    signed: bool = False


@dataclass(eq=False)
class ContAssign(Node):
    lhs: Expr = None
    rhs: Expr = None


@dataclass(eq=False)
class EdgeSpec(Node):
    polarity: str = "posedge"         # posedge | negedge
    signal: str = ""


@dataclass(eq=False)
class AlwaysBlock(Node):
    edges: Optional[list[EdgeSpec]] = None   # None = @(*)
    body: list[Stmt] = field(default_factory=list)

    @property
    def is_star(self) -> bool:
        return self.edges is None


@dataclass(eq=False)
class PortConn(Node):
    port: str = ""
    expr: Optional[Expr] = None       # None = unconnected


@dataclass(eq=False)
class Instance(Node):
    module_name: str = ""
    name: str = ""
    conns: list[PortConn] = field(default_factory=list)


Item = Union[NetDecl, ContAssign, AlwaysBlock, Instance]


@dataclass(eq=False)
class ModuleDecl(Node):
    name: str = ""
    ports: list[PortDecl] = field(default_factory=list)
    items: list[Item] = field(default_factory=list)

    def scope(self) -> dict[str, "Signal"]:
        """name -> Signal for every declared port and net."""
        out: dict[str, Signal] = {}
        for p in self.ports:
            out[p.name] = Signal(p.name, p.width, p.kind, p.direction, p.signed)
        for it in self.items:
            if isinstance(it, NetDecl):
                out[it.name] = Signal(it.name, it.width, it.kind, None, it.signed)
        return out

    def port(self, name: str) -> Optional[PortDecl]:
        for p in self.ports:
            if p.name == name:
                return p
        return None


@dataclass(frozen=True)
class Signal:
    name: str
    width: int
    kind: str                          # wire | reg | integer
    direction: Optional[str]           # None for internal nets
    signed: bool = False


@dataclass(eq=False)
class SourceUnit(Node):
    modules: list[ModuleDecl] = field(default_factory=list)
    top_name: str = ""

    def module(self, name: str) -> ModuleDecl:
        for m in self.modules:
            if m.name == name:
                return m
        raise KeyError(name)

    @property
    def top(self) -> ModuleDecl:
        return self.module(self.top_name)


# ---- Structural helpers ----

_IGNORED_FIELDS = {"line", "col"}


def ast_equal(a, b) -> bool:
    """Structural equality ignoring source locations."""
    if type(a) is not type(b):
        return False
    if dataclasses.is_dataclass(a):
        for f in dataclasses.fields(a):
            if f.name in _IGNORED_FIELDS:
                continue
            if not ast_equal(getattr(a, f.name), getattr(b, f.name)):
                return False
        return True
    if isinstance(a, list):
        return len(a) == len(b) and all(ast_equal(x, y) for x, y in zip(a, b))
    return a == b


def clone(node):
    """Deep copy of an AST fragment (locations preserved)."""
    if dataclasses.is_dataclass(node) and not isinstance(node, Signal):
        kwargs = {}
        for f in dataclasses.fields(node):
            kwargs[f.name] = clone(getattr(node, f.name))
        return type(node)(**kwargs)
    if isinstance(node, list):
        return [clone(x) for x in node]
    return node


def walk_exprs(e: Expr):
    """Pre-order traversal of an expression tree."""
    yield e
    if isinstance(e, Unary):
        yield from walk_exprs(e.operand)
    elif isinstance(e, Binary):
        yield from walk_exprs(e.left)
        yield from walk_exprs(e.right)
    elif isinstance(e, Ternary):
        yield from walk_exprs(e.cond)
        yield from walk_exprs(e.then_val)
        yield from walk_exprs(e.else_val)
    elif isinstance(e, Concat):
        for p in e.parts:
            yield from walk_exprs(p)
    elif isinstance(e, Repeat):
        yield from walk_exprs(e.value)
    elif isinstance(e, BitSelect):
        yield from walk_exprs(e.index)


def walk_stmts(stmts: list[Stmt]):
    """Pre-order traversal of a statement list."""
    for s in stmts:
        yield s
        if isinstance(s, IfStmt):
            yield from walk_stmts(s.then_body)
            yield from walk_stmts(s.else_body)
        elif isinstance(s, CaseStmt):
            for item in s.items:
                yield from walk_stmts(item.body)
            if s.default_body is not None:
                yield from walk_stmts(s.default_body)
        elif isinstance(s, ForStmt):
            yield from walk_stmts(s.body)
