"""Recursive-descent parser and elaborator for the Verilog subset.

Supported constructs:
  - module/endmodule with ANSI or non-ANSI port declarations
  - wire / reg / integer declarations, [W-1:0] packed ranges only
  - parameter / localparam, resolved to literals at parse time
  - assign (continuous assignment)
  - always @(posedge/negedge list) and always @(*) / @*
  - if/else, case/casez, for loops with constant bounds
  - module instances with named port connections (no param overrides)
  - generate/endgenerate holding for-loops over a genvar, unrolled here
  - expressions: + - * / % << >> & | ^ ~^ && || == != < <= > >=,
    unary ~ ! - & | ^, ternary, concat, replication, bit/part select

Out of subset (rejected with UnsupportedConstruct): tasks, functions,
initial blocks, memories/2-D regs, generate-if, casex, real/time types,
x/z literals, signed literals, delays, parameter overrides on instances.

Elaboration happens inline: after this module runs there are no
parameter identifiers, no generate blocks, and every range, repeat
count and part-select bound is a plain integer. Skip pragmas attach to
the module, item or statement that follows them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .ast_nodes import (AlwaysBlock, BitSelect, Binary, BlockingAssign,
                        CaseItem, CaseStmt, Concat, ContAssign, EdgeSpec,
                        Expr, ForStmt, Ident, IfStmt, Instance, Literal,
                        MaskedLiteral, ModuleDecl, NetDecl,
                        NonBlockingAssign, PartSelect, PortConn, PortDecl,
                        Repeat, Signal, SourceUnit, Stmt, Ternary, Unary,
                        clone, walk_exprs, walk_stmts)
from .errors import (ElaborationError, ParameterUnresolvable,
                     UnsupportedConstruct, VerilogSyntaxError)
from .lexer import T, Token, lex, resolve_number

_MAX_GENERATE_ITERATIONS = 4096

_BIN_FROM_TOKEN = {
    T.PLUS: "+", T.MINUS: "-", T.STAR: "*", T.SLASH: "/", T.PERCENT: "%",
    T.LSHIFT: "<<", T.RSHIFT: ">>", T.AMP: "&", T.PIPE: "|", T.CARET: "^",
    T.XNOR: "~^", T.LAND: "&&", T.LOR: "||", T.EQ: "==", T.NEQ: "!=",
    T.LT: "<", T.LE: "<=", T.GT: ">", T.GE: ">=",
}


# ---- raw (pre-elaboration) structures ----

@dataclass
class _RawRange:
    msb: Expr
    lsb: Expr


@dataclass
class _RawPort:
    name: str
    direction: str
    kind: str              # wire | reg
    signed: bool
    rng: Optional[_RawRange]
    line: int
    explicit: bool         # False for bare names awaiting a body decl


@dataclass
class _RawNet:
    name: str
    kind: str
    signed: bool
    rng: Optional[_RawRange]
    line: int
    skip_pragma: bool


@dataclass
class _RawParam:
    name: str
    value: Expr
    line: int


@dataclass
class _RawGenFor:
    var: str
    init: Expr
    cond: Expr
    step: Expr
    body: list
    line: int


@dataclass
class _RawModule:
    name: str
    line: int
    skip_pragma: bool
    ports: list[_RawPort] = field(default_factory=list)
    params: list[_RawParam] = field(default_factory=list)
    items: list = field(default_factory=list)   # _RawNet | _RawParam | _RawGenFor | Item
    genvars: set[str] = field(default_factory=set)


class Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    # ---- token plumbing ----

    def _cur(self) -> Token:
        return self.tokens[self.pos]

    def _peek(self, off: int = 0) -> Token:
        p = min(self.pos + off, len(self.tokens) - 1)
        return self.tokens[p]

    def _at(self, *types: T) -> bool:
        return self._cur().type in types

    def _eat(self, tt: T, what: str = "") -> Token:
        tok = self._cur()
        if tok.type != tt:
            expected = what or tt.name
            raise VerilogSyntaxError(
                f"expected {expected}, got {tok.value!r}", tok.line, tok.col)
        self.pos += 1
        return tok

    def _eat_if(self, tt: T) -> Optional[Token]:
        if self._cur().type == tt:
            return self._eat(tt)
        return None

    def _take_pragma(self) -> bool:
        hit = False
        while self._at(T.PRAGMA_SKIP):
            self._eat(T.PRAGMA_SKIP)
            hit = True
        return hit

    # ---- top level ----

    def parse_source(self) -> list[_RawModule]:
        mods = []
        while not self._at(T.EOF):
            mods.append(self._parse_module())
        return mods

    def _parse_module(self) -> _RawModule:
        pragma = self._take_pragma()
        tok = self._eat(T.MODULE)
        name = self._eat(T.IDENT, "module name").value
        mod = _RawModule(name=name, line=tok.line, skip_pragma=pragma)
        if self._at(T.HASH):
            self._parse_header_params(mod)
        if self._eat_if(T.LPAREN):
            if not self._at(T.RPAREN):
                self._parse_port_list(mod)
            self._eat(T.RPAREN)
        self._eat(T.SEMI)
        while not self._at(T.ENDMODULE):
            if self._at(T.EOF):
                raise VerilogSyntaxError("missing endmodule",
                                         self._cur().line, self._cur().col)
            self._parse_module_item(mod)
        self._eat(T.ENDMODULE)
        return mod

    def _parse_header_params(self, mod: _RawModule):
        self._eat(T.HASH)
        self._eat(T.LPAREN)
        while True:
            self._eat(T.PARAMETER)
            mod.params.append(self._parse_param_binding())
            if not self._eat_if(T.COMMA):
                break
        self._eat(T.RPAREN)

    def _parse_param_binding(self) -> _RawParam:
        if self._eat_if(T.INTEGER):
            pass
        tok = self._eat(T.IDENT, "parameter name")
        self._eat(T.ASSIGN_OP)
        value = self._parse_expr()
        return _RawParam(name=tok.value, value=value, line=tok.line)

    def _parse_port_list(self, mod: _RawModule):
        while True:
            if self._at(T.INPUT, T.OUTPUT, T.INOUT):
                mod.ports.append(self._parse_ansi_port())
            elif self._at(T.IDENT):
                tok = self._eat(T.IDENT)
                mod.ports.append(_RawPort(tok.value, "input", "wire", False,
                                          None, tok.line, explicit=False))
            else:
                tok = self._cur()
                raise VerilogSyntaxError("expected port declaration",
                                         tok.line, tok.col)
            if not self._eat_if(T.COMMA):
                break

    def _parse_ansi_port(self) -> _RawPort:
        tok = self._cur()
        direction = {T.INPUT: "input", T.OUTPUT: "output",
                     T.INOUT: "inout"}[tok.type]
        self._eat(tok.type)
        kind = "wire"
        if self._eat_if(T.REG):
            if direction != "output":
                raise VerilogSyntaxError("only outputs can be reg",
                                         tok.line, tok.col)
            kind = "reg"
        else:
            self._eat_if(T.WIRE)
        signed = bool(self._eat_if(T.SIGNED))
        rng = self._parse_range() if self._at(T.LBRACKET) else None
        name = self._eat(T.IDENT, "port name").value
        return _RawPort(name, direction, kind, signed, rng, tok.line,
                        explicit=True)

    def _parse_range(self) -> _RawRange:
        self._eat(T.LBRACKET)
        msb = self._parse_expr()
        self._eat(T.COLON)
        lsb = self._parse_expr()
        self._eat(T.RBRACKET)
        return _RawRange(msb, lsb)

    # ---- module items ----

    def _parse_module_item(self, mod: _RawModule):
        pragma = self._take_pragma()
        tok = self._cur()

        if self._at(T.INPUT, T.OUTPUT, T.INOUT):
            if pragma:
                raise VerilogSyntaxError("skip pragma not allowed on port "
                                         "declarations", tok.line, tok.col)
            self._parse_body_port_decl(mod)
            return
        if self._at(T.WIRE, T.REG, T.INTEGER):
            for net in self._parse_net_decl(pragma):
                mod.items.append(net)
            return
        if self._at(T.GENVAR):
            self._eat(T.GENVAR)
            while True:
                mod.genvars.add(self._eat(T.IDENT, "genvar name").value)
                if not self._eat_if(T.COMMA):
                    break
            self._eat(T.SEMI)
            return
        if self._at(T.PARAMETER, T.LOCALPARAM):
            self._eat(self._cur().type)
            while True:
                p = self._parse_param_binding()
                mod.params.append(p)
                mod.items.append(p)
                if not self._eat_if(T.COMMA):
                    break
            self._eat(T.SEMI)
            return
        if self._at(T.ASSIGN):
            mod.items.append(self._parse_cont_assign(pragma))
            return
        if self._at(T.ALWAYS):
            mod.items.append(self._parse_always(pragma))
            return
        if self._at(T.GENERATE):
            self._parse_generate(mod)
            return
        if self._at(T.IDENT):
            mod.items.append(self._parse_instance(pragma))
            return
        raise VerilogSyntaxError(f"unexpected {tok.value!r} in module body",
                                 tok.line, tok.col)

    def _parse_body_port_decl(self, mod: _RawModule):
        tok = self._cur()
        direction = {T.INPUT: "input", T.OUTPUT: "output",
                     T.INOUT: "inout"}[tok.type]
        self._eat(tok.type)
        kind = "wire"
        if self._eat_if(T.REG):
            if direction != "output":
                raise VerilogSyntaxError("only outputs can be reg",
                                         tok.line, tok.col)
            kind = "reg"
        else:
            self._eat_if(T.WIRE)
        signed = bool(self._eat_if(T.SIGNED))
        rng = self._parse_range() if self._at(T.LBRACKET) else None
        while True:
            nt = self._eat(T.IDENT, "port name")
            for p in mod.ports:
                if p.name == nt.value:
                    if p.explicit:
                        raise VerilogSyntaxError(
                            f"port {nt.value!r} declared twice", nt.line, nt.col)
                    p.direction = direction
                    p.kind = kind
                    p.signed = signed
                    p.rng = rng
                    p.explicit = True
                    break
            else:
                raise VerilogSyntaxError(
                    f"{nt.value!r} is not in the module port list",
                    nt.line, nt.col)
            if not self._eat_if(T.COMMA):
                break
        self._eat(T.SEMI)

    def _parse_net_decl(self, pragma: bool) -> list[_RawNet]:
        tok = self._cur()
        kind = {T.WIRE: "wire", T.REG: "reg", T.INTEGER: "integer"}[tok.type]
        self._eat(tok.type)
        signed = bool(self._eat_if(T.SIGNED))
        rng = None
        if self._at(T.LBRACKET):
            if kind == "integer":
                raise VerilogSyntaxError("integer takes no range",
                                         tok.line, tok.col)
            rng = self._parse_range()
        nets = []
        while True:
            nt = self._eat(T.IDENT, "net name")
            if self._at(T.LBRACKET):
                raise UnsupportedConstruct("memory (2-D reg)", nt.line)
            if self._at(T.ASSIGN_OP):
                raise UnsupportedConstruct("net declaration initializer",
                                           nt.line)
            nets.append(_RawNet(nt.value, kind, signed, rng, nt.line, pragma))
            if not self._eat_if(T.COMMA):
                break
        self._eat(T.SEMI)
        return nets

    def _parse_cont_assign(self, pragma: bool) -> ContAssign:
        tok = self._eat(T.ASSIGN)
        lhs = self._parse_lvalue()
        self._eat(T.ASSIGN_OP)
        rhs = self._parse_expr()
        self._eat(T.SEMI)
        return ContAssign(lhs=lhs, rhs=rhs, line=tok.line, col=tok.col,
                          skip_pragma=pragma)

    def _parse_always(self, pragma: bool) -> AlwaysBlock:
        tok = self._eat(T.ALWAYS)
        self._eat(T.AT)
        edges: Optional[list[EdgeSpec]] = None
        if self._eat_if(T.STAR):
            pass
        else:
            self._eat(T.LPAREN)
            if self._eat_if(T.STAR):
                self._eat(T.RPAREN)
            else:
                edges = []
                while True:
                    et = self._cur()
                    if self._at(T.POSEDGE, T.NEGEDGE):
                        pol = "posedge" if et.type == T.POSEDGE else "negedge"
                        self._eat(et.type)
                        sig = self._eat(T.IDENT, "edge signal").value
                        edges.append(EdgeSpec(polarity=pol, signal=sig,
                                              line=et.line, col=et.col))
                    else:
                        raise UnsupportedConstruct(
                            "level-sensitive sensitivity list (use @*)",
                            et.line)
                    if self._eat_if(T.COMMA) or self._eat_if(T.OR_KW):
                        continue
                    break
                self._eat(T.RPAREN)
        body = self._parse_stmt_or_block()
        return AlwaysBlock(edges=edges, body=body, line=tok.line,
                           col=tok.col, skip_pragma=pragma)

    def _parse_generate(self, mod: _RawModule):
        self._eat(T.GENERATE)
        while not self._at(T.ENDGENERATE):
            if self._at(T.GENVAR):
                self._eat(T.GENVAR)
                while True:
                    mod.genvars.add(self._eat(T.IDENT).value)
                    if not self._eat_if(T.COMMA):
                        break
                self._eat(T.SEMI)
            elif self._at(T.FOR):
                mod.items.append(self._parse_generate_for(mod))
            elif self._at(T.IF, T.CASE, T.CASEZ):
                raise UnsupportedConstruct("generate conditional",
                                           self._cur().line)
            else:
                tok = self._cur()
                raise VerilogSyntaxError("expected for inside generate",
                                         tok.line, tok.col)
        self._eat(T.ENDGENERATE)

    def _parse_generate_for(self, mod: _RawModule) -> _RawGenFor:
        tok = self._eat(T.FOR)
        self._eat(T.LPAREN)
        var = self._eat(T.IDENT, "genvar").value
        if var not in mod.genvars:
            raise ElaborationError(f"L{tok.line}: {var!r} is not a genvar")
        self._eat(T.ASSIGN_OP)
        init = self._parse_expr()
        self._eat(T.SEMI)
        cond = self._parse_expr()
        self._eat(T.SEMI)
        var2 = self._eat(T.IDENT, "genvar").value
        if var2 != var:
            raise VerilogSyntaxError("generate loop must step its own genvar",
                                     tok.line, tok.col)
        self._eat(T.ASSIGN_OP)
        step = self._parse_expr()
        self._eat(T.RPAREN)
        body: list = []
        if self._eat_if(T.BEGIN):
            if self._eat_if(T.COLON):
                self._eat(T.IDENT)   # block label, not retained
            while not self._at(T.END):
                self._parse_generate_body_item(body)
            self._eat(T.END)
        else:
            self._parse_generate_body_item(body)
        return _RawGenFor(var=var, init=init, cond=cond, step=step,
                          body=body, line=tok.line)

    def _parse_generate_body_item(self, out: list):
        pragma = self._take_pragma()
        if self._at(T.ASSIGN):
            out.append(self._parse_cont_assign(pragma))
        elif self._at(T.ALWAYS):
            out.append(self._parse_always(pragma))
        elif self._at(T.IDENT):
            out.append(self._parse_instance(pragma))
        else:
            tok = self._cur()
            raise UnsupportedConstruct(
                "generate body item (only assign/always/instance)", tok.line)

    def _parse_instance(self, pragma: bool) -> Instance:
        mt = self._eat(T.IDENT, "module name")
        if self._at(T.HASH):
            raise UnsupportedConstruct("instance parameter override", mt.line)
        it = self._eat(T.IDENT, "instance name")
        self._eat(T.LPAREN)
        conns: list[PortConn] = []
        if not self._at(T.RPAREN):
            while True:
                if not self._at(T.DOT):
                    tok = self._cur()
                    raise UnsupportedConstruct(
                        "positional port connection", tok.line)
                self._eat(T.DOT)
                pname = self._eat(T.IDENT, "port name").value
                self._eat(T.LPAREN)
                expr = None if self._at(T.RPAREN) else self._parse_expr()
                self._eat(T.RPAREN)
                conns.append(PortConn(port=pname, expr=expr,
                                      line=mt.line, col=mt.col))
                if not self._eat_if(T.COMMA):
                    break
        self._eat(T.RPAREN)
        self._eat(T.SEMI)
        return Instance(module_name=mt.value, name=it.value, conns=conns,
                        line=mt.line, col=mt.col, skip_pragma=pragma)

    # ---- statements ----

    def _parse_stmt_or_block(self) -> list[Stmt]:
        if self._at(T.BEGIN):
            self._eat(T.BEGIN)
            if self._eat_if(T.COLON):
                self._eat(T.IDENT)
            stmts = []
            while not self._at(T.END):
                stmts.append(self._parse_stmt())
            self._eat(T.END)
            return stmts
        return [self._parse_stmt()]

    def _parse_stmt(self) -> Stmt:
        pragma = self._take_pragma()
        tok = self._cur()
        if self._at(T.IF):
            return self._parse_if(pragma)
        if self._at(T.CASE, T.CASEZ):
            return self._parse_case(pragma)
        if self._at(T.FOR):
            return self._parse_for(pragma)
        if self._at(T.SEMI):
            raise VerilogSyntaxError("empty statement", tok.line, tok.col)
        if self._at(T.IDENT, T.LBRACE):
            lhs = self._parse_lvalue()
            if self._eat_if(T.ASSIGN_OP):
                rhs = self._parse_expr()
                self._eat(T.SEMI)
                return BlockingAssign(lhs=lhs, rhs=rhs, line=tok.line,
                                      col=tok.col, skip_pragma=pragma)
            if self._eat_if(T.LE):
                rhs = self._parse_expr()
                self._eat(T.SEMI)
                return NonBlockingAssign(lhs=lhs, rhs=rhs, line=tok.line,
                                         col=tok.col, skip_pragma=pragma)
            raise VerilogSyntaxError("expected = or <=", tok.line, tok.col)
        raise VerilogSyntaxError(f"expected statement, got {tok.value!r}",
                                 tok.line, tok.col)

    def _parse_if(self, pragma: bool) -> IfStmt:
        tok = self._eat(T.IF)
        self._eat(T.LPAREN)
        cond = self._parse_expr()
        self._eat(T.RPAREN)
        then_body = self._parse_stmt_or_block()
        else_body: list[Stmt] = []
        if self._eat_if(T.ELSE):
            else_body = self._parse_stmt_or_block()
        return IfStmt(cond=cond, then_body=then_body, else_body=else_body,
                      line=tok.line, col=tok.col, skip_pragma=pragma)

    def _parse_case(self, pragma: bool) -> CaseStmt:
        tok = self._cur()
        casez = tok.type == T.CASEZ
        self._eat(tok.type)
        self._eat(T.LPAREN)
        selector = self._parse_expr()
        self._eat(T.RPAREN)
        items: list[CaseItem] = []
        default_body: Optional[list[Stmt]] = None
        while not self._at(T.ENDCASE):
            if self._eat_if(T.DEFAULT):
                self._eat_if(T.COLON)
                if default_body is not None:
                    raise VerilogSyntaxError("second default label",
                                             tok.line, tok.col)
                default_body = self._parse_stmt_or_block()
                continue
            it = self._cur()
            labels = [self._parse_expr()]
            while self._eat_if(T.COMMA):
                labels.append(self._parse_expr())
            self._eat(T.COLON)
            body = self._parse_stmt_or_block()
            items.append(CaseItem(labels=labels, body=body,
                                  line=it.line, col=it.col))
        self._eat(T.ENDCASE)
        return CaseStmt(selector=selector, items=items,
                        default_body=default_body, casez=casez,
                        line=tok.line, col=tok.col, skip_pragma=pragma)

    def _parse_for(self, pragma: bool) -> ForStmt:
        tok = self._eat(T.FOR)
        self._eat(T.LPAREN)
        var = self._eat(T.IDENT, "loop variable").value
        self._eat(T.ASSIGN_OP)
        init = self._parse_expr()
        self._eat(T.SEMI)
        cond = self._parse_expr()
        self._eat(T.SEMI)
        var2 = self._eat(T.IDENT, "loop variable").value
        if var2 != var:
            raise VerilogSyntaxError("for loop must step its own variable",
                                     tok.line, tok.col)
        self._eat(T.ASSIGN_OP)
        step = self._parse_expr()
        self._eat(T.RPAREN)
        body = self._parse_stmt_or_block()
        return ForStmt(var=var, init=init, cond=cond, step=step, body=body,
                       line=tok.line, col=tok.col, skip_pragma=pragma)

    # ---- expressions ----

    def _parse_lvalue(self) -> Expr:
        tok = self._cur()
        if self._at(T.LBRACE):
            self._eat(T.LBRACE)
            parts = [self._parse_lvalue()]
            while self._eat_if(T.COMMA):
                parts.append(self._parse_lvalue())
            self._eat(T.RBRACE)
            return Concat(parts=parts, line=tok.line, col=tok.col)
        name = self._eat(T.IDENT, "assignment target").value
        if self._at(T.LBRACKET):
            return self._parse_select(name, tok)
        return Ident(name=name, line=tok.line, col=tok.col)

    def _parse_select(self, name: str, tok: Token) -> Expr:
        self._eat(T.LBRACKET)
        first = self._parse_expr()
        if self._eat_if(T.COLON):
            second = self._parse_expr()
            self._eat(T.RBRACKET)
            ps = PartSelect(name=name, line=tok.line, col=tok.col)
            ps.msb = first     # folded to int during elaboration
            ps.lsb = second
            return ps
        self._eat(T.RBRACKET)
        return BitSelect(name=name, index=first, line=tok.line, col=tok.col)

    def _parse_expr(self) -> Expr:
        return self._parse_ternary()

    def _parse_ternary(self) -> Expr:
        cond = self._parse_binary(0)
        if self._eat_if(T.QUESTION):
            then_val = self._parse_expr()
            self._eat(T.COLON)
            else_val = self._parse_ternary()
            return Ternary(cond=cond, then_val=then_val, else_val=else_val,
                           line=cond.line, col=cond.col)
        return cond

    # binary levels, loosest first
    _LEVELS = (
        (T.LOR,),
        (T.LAND,),
        (T.PIPE,),
        (T.CARET, T.XNOR),
        (T.AMP,),
        (T.EQ, T.NEQ),
        (T.LT, T.LE, T.GT, T.GE),
        (T.LSHIFT, T.RSHIFT),
        (T.PLUS, T.MINUS),
        (T.STAR, T.SLASH, T.PERCENT),
    )

    def _parse_binary(self, level: int) -> Expr:
        if level >= len(self._LEVELS):
            return self._parse_unary()
        left = self._parse_binary(level + 1)
        while self._at(*self._LEVELS[level]):
            tok = self._eat(self._cur().type)
            right = self._parse_binary(level + 1)
            left = Binary(op=_BIN_FROM_TOKEN[tok.type], left=left,
                          right=right, line=tok.line, col=tok.col)
        return left

    def _parse_unary(self) -> Expr:
        tok = self._cur()
        if self._at(T.TILDE, T.BANG, T.MINUS, T.AMP, T.PIPE, T.CARET):
            op = {T.TILDE: "~", T.BANG: "!", T.MINUS: "-", T.AMP: "&",
                  T.PIPE: "|", T.CARET: "^"}[tok.type]
            self._eat(tok.type)
            operand = self._parse_unary()
            return Unary(op=op, operand=operand, line=tok.line, col=tok.col)
        if self._eat_if(T.PLUS):
            return self._parse_unary()     # unary plus is a no-op
        return self._parse_primary()

    def _parse_primary(self) -> Expr:
        tok = self._cur()
        if self._at(T.NUMBER):
            self._eat(T.NUMBER)
            value, width, sized, care = resolve_number(tok.value, tok.line)
            full = (1 << width) - 1
            if care != full:
                return MaskedLiteral(value=value, width=width, care=care,
                                     line=tok.line, col=tok.col)
            return Literal(value=value, width=width, sized=sized,
                           line=tok.line, col=tok.col)
        if self._at(T.IDENT):
            name = self._eat(T.IDENT).value
            if self._at(T.LBRACKET):
                return self._parse_select(name, tok)
            if self._at(T.LPAREN):
                raise UnsupportedConstruct(f"function call {name}()", tok.line)
            return Ident(name=name, line=tok.line, col=tok.col)
        if self._eat_if(T.LPAREN):
            e = self._parse_expr()
            self._eat(T.RPAREN)
            return e
        if self._at(T.LBRACE):
            return self._parse_concat_or_repeat()
        raise VerilogSyntaxError(f"expected expression, got {tok.value!r}",
                                 tok.line, tok.col)

    def _parse_concat_or_repeat(self) -> Expr:
        tok = self._eat(T.LBRACE)
        first = self._parse_expr()
        if self._at(T.LBRACE):
            self._eat(T.LBRACE)
            value = self._parse_expr()
            self._eat(T.RBRACE)
            self._eat(T.RBRACE)
            rep = Repeat(value=value, line=tok.line, col=tok.col)
            rep.count = first    # folded to int during elaboration
            return rep
        parts = [first]
        while self._eat_if(T.COMMA):
            parts.append(self._parse_expr())
        self._eat(T.RBRACE)
        if len(parts) == 1:
            return parts[0]
        return Concat(parts=parts, line=tok.line, col=tok.col)


# ---- constant evaluation ----

def eval_const(e: Expr, env: dict[str, tuple[int, int, bool]],
               what: str = "expression") -> int:
    def ev(e: Expr) -> int:
        if isinstance(e, Literal):
            return e.value
        if isinstance(e, Ident):
            if e.name in env:
                return env[e.name][0]
            raise ParameterUnresolvable(e.name, e.line)
        if isinstance(e, Unary):
            v = ev(e.operand)
            if e.op == "~":
                return ~v & 0xFFFFFFFF
            if e.op == "-":
                return -v & 0xFFFFFFFF
            if e.op == "!":
                return 0 if v else 1
            raise ElaborationError(
                f"L{e.line}: {e.op!r} not allowed in constant {what}")
        if isinstance(e, Binary):
            a, b = ev(e.left), ev(e.right)
            m = 0xFFFFFFFF
            ops = {
                "+": lambda: (a + b) & m, "-": lambda: (a - b) & m,
                "*": lambda: (a * b) & m,
                "/": lambda: a // b if b else None,
                "%": lambda: a % b if b else None,
                "<<": lambda: (a << min(b, 64)) & m,
                ">>": lambda: a >> min(b, 64),
                "&": lambda: a & b, "|": lambda: a | b,
                "^": lambda: a ^ b, "~^": lambda: ~(a ^ b) & m,
                "==": lambda: int(a == b), "!=": lambda: int(a != b),
                "<": lambda: int(a < b), "<=": lambda: int(a <= b),
                ">": lambda: int(a > b), ">=": lambda: int(a >= b),
                "&&": lambda: int(bool(a) and bool(b)),
                "||": lambda: int(bool(a) or bool(b)),
            }
            if e.op not in ops:
                raise ElaborationError(
                    f"L{e.line}: {e.op!r} not allowed in constant {what}")
            v = ops[e.op]()
            if v is None:
                raise ElaborationError(f"L{e.line}: division by zero in {what}")
            return v
        if isinstance(e, Ternary):
            return ev(e.then_val) if ev(e.cond) else ev(e.else_val)
        raise ElaborationError(
            f"L{getattr(e, 'line', 0)}: {type(e).__name__} not allowed "
            f"in constant {what}")
    return ev(e)


# ---- elaboration ----

class _Elaborator:
    def __init__(self, raw: _RawModule):
        self.raw = raw
        self.env: dict[str, tuple[int, int, bool]] = {}

    def run(self) -> ModuleDecl:
        raw = self.raw
        for p in raw.params:
            if p.name in self.env:
                raise ElaborationError(
                    f"L{p.line}: parameter {p.name!r} declared twice")
            value = eval_const(p.value, self.env, f"parameter {p.name}")
            if isinstance(p.value, Literal) and p.value.sized:
                self.env[p.name] = (value, p.value.width, True)
            else:
                self.env[p.name] = (value, 32, False)

        mod = ModuleDecl(name=raw.name, line=raw.line,
                         skip_pragma=raw.skip_pragma)
        for rp in raw.ports:
            if not rp.explicit:
                raise ElaborationError(
                    f"L{rp.line}: port {rp.name!r} has no direction "
                    "declaration")
            mod.ports.append(PortDecl(
                name=rp.name, direction=rp.direction, kind=rp.kind,
                signed=rp.signed, width=self._fold_range(rp.rng, rp.name),
                line=rp.line))

        for item in raw.items:
            if isinstance(item, _RawParam):
                continue       # folded; no Parameter node survives
            if isinstance(item, _RawNet):
                mod.items.append(self._elab_net(item))
            elif isinstance(item, _RawGenFor):
                mod.items.extend(self._unroll(item))
            else:
                mod.items.append(self._fold_item(item, {}))
        self._validate(mod)
        return mod

    def _fold_range(self, rng: Optional[_RawRange], name: str) -> int:
        if rng is None:
            return 1
        msb = eval_const(rng.msb, self.env, f"range of {name}")
        lsb = eval_const(rng.lsb, self.env, f"range of {name}")
        if lsb != 0:
            raise UnsupportedConstruct(
                f"range [{msb}:{lsb}] of {name} (only [W-1:0] supported)",
                getattr(rng.msb, "line", 0))
        if msb >= (1 << 16):
            raise ElaborationError(f"range of {name} is implausibly wide")
        return msb + 1

    def _elab_net(self, rn: _RawNet) -> NetDecl:
        width = 32 if rn.kind == "integer" else self._fold_range(rn.rng, rn.name)
        return NetDecl(name=rn.name, kind=rn.kind, width=width,
                       signed=rn.signed, line=rn.line,
                       skip_pragma=rn.skip_pragma)

    # genvar substitution environment rides on top of the param env
    def _fold_item(self, item, extra: dict[str, tuple[int, int, bool]]):
        env = {**self.env, **extra}
        if isinstance(item, ContAssign):
            return ContAssign(lhs=self._fold_expr(item.lhs, env),
                              rhs=self._fold_expr(item.rhs, env),
                              line=item.line, col=item.col,
                              skip_pragma=item.skip_pragma)
        if isinstance(item, AlwaysBlock):
            edges = None
            if item.edges is not None:
                edges = [EdgeSpec(polarity=e.polarity, signal=e.signal,
                                  line=e.line, col=e.col)
                         for e in item.edges]
            return AlwaysBlock(edges=edges,
                               body=[self._fold_stmt(s, env)
                                     for s in item.body],
                               line=item.line, col=item.col,
                               skip_pragma=item.skip_pragma)
        if isinstance(item, Instance):
            return Instance(module_name=item.module_name, name=item.name,
                            conns=[PortConn(port=c.port,
                                            expr=None if c.expr is None
                                            else self._fold_expr(c.expr, env),
                                            line=c.line, col=c.col)
                                   for c in item.conns],
                            line=item.line, col=item.col,
                            skip_pragma=item.skip_pragma)
        raise ElaborationError(f"unexpected item {type(item).__name__}")

    def _unroll(self, gf: _RawGenFor):
        env = self.env
        value = eval_const(gf.init, env, "generate bound")
        out = []
        iterations = 0
        while True:
            cond_env = {**env, gf.var: (value, 32, False)}
            if not eval_const(gf.cond, cond_env, "generate bound"):
                break
            iterations += 1
            if iterations > _MAX_GENERATE_ITERATIONS:
                raise ElaborationError(
                    f"L{gf.line}: generate loop exceeds "
                    f"{_MAX_GENERATE_ITERATIONS} iterations")
            extra = {gf.var: (value, 32, False)}
            for item in gf.body:
                folded = self._fold_item(item, extra)
                if isinstance(folded, Instance):
                    folded.name = f"{folded.name}__g{iterations - 1}"
                out.append(folded)
            value = eval_const(gf.step, cond_env, "generate step") & 0xFFFFFFFF
        return out

    def _fold_stmt(self, s: Stmt, env) -> Stmt:
        fe = lambda e: self._fold_expr(e, env)
        if isinstance(s, BlockingAssign):
            return BlockingAssign(lhs=fe(s.lhs), rhs=fe(s.rhs), line=s.line,
                                  col=s.col, skip_pragma=s.skip_pragma)
        if isinstance(s, NonBlockingAssign):
            return NonBlockingAssign(lhs=fe(s.lhs), rhs=fe(s.rhs),
                                     line=s.line, col=s.col,
                                     skip_pragma=s.skip_pragma)
        if isinstance(s, IfStmt):
            return IfStmt(cond=fe(s.cond),
                          then_body=[self._fold_stmt(x, env)
                                     for x in s.then_body],
                          else_body=[self._fold_stmt(x, env)
                                     for x in s.else_body],
                          line=s.line, col=s.col, skip_pragma=s.skip_pragma)
        if isinstance(s, CaseStmt):
            return CaseStmt(
                selector=fe(s.selector),
                items=[CaseItem(labels=[fe(l) for l in it.labels],
                                body=[self._fold_stmt(x, env)
                                      for x in it.body],
                                line=it.line, col=it.col)
                       for it in s.items],
                default_body=None if s.default_body is None
                else [self._fold_stmt(x, env) for x in s.default_body],
                casez=s.casez, line=s.line, col=s.col,
                skip_pragma=s.skip_pragma)
        if isinstance(s, ForStmt):
            return ForStmt(var=s.var, init=fe(s.init), cond=fe(s.cond),
                           step=fe(s.step),
                           body=[self._fold_stmt(x, env) for x in s.body],
                           line=s.line, col=s.col, skip_pragma=s.skip_pragma)
        raise ElaborationError(f"unexpected statement {type(s).__name__}")

    def _fold_expr(self, e: Expr, env) -> Expr:
        if isinstance(e, Literal):
            return Literal(value=e.value, width=e.width, sized=e.sized,
                           line=e.line, col=e.col)
        if isinstance(e, MaskedLiteral):
            return MaskedLiteral(value=e.value, width=e.width, care=e.care,
                                 line=e.line, col=e.col)
        if isinstance(e, Ident):
            if e.name in env:
                value, width, sized = env[e.name]
                return Literal(value=value, width=width, sized=sized,
                               line=e.line, col=e.col)
            return Ident(name=e.name, line=e.line, col=e.col)
        if isinstance(e, BitSelect):
            if e.name in env:
                raise ElaborationError(
                    f"L{e.line}: cannot select bits of parameter {e.name!r}")
            return BitSelect(name=e.name, index=self._fold_expr(e.index, env),
                             line=e.line, col=e.col)
        if isinstance(e, PartSelect):
            msb = e.msb if isinstance(e.msb, int) else eval_const(
                e.msb, env, "part-select bound")
            lsb = e.lsb if isinstance(e.lsb, int) else eval_const(
                e.lsb, env, "part-select bound")
            if msb < lsb:
                raise ElaborationError(
                    f"L{e.line}: reversed part-select [{msb}:{lsb}]")
            return PartSelect(name=e.name, msb=msb, lsb=lsb,
                              line=e.line, col=e.col)
        if isinstance(e, Unary):
            return Unary(op=e.op, operand=self._fold_expr(e.operand, env),
                         line=e.line, col=e.col)
        if isinstance(e, Binary):
            return Binary(op=e.op, left=self._fold_expr(e.left, env),
                          right=self._fold_expr(e.right, env),
                          line=e.line, col=e.col)
        if isinstance(e, Ternary):
            return Ternary(cond=self._fold_expr(e.cond, env),
                           then_val=self._fold_expr(e.then_val, env),
                           else_val=self._fold_expr(e.else_val, env),
                           line=e.line, col=e.col)
        if isinstance(e, Concat):
            return Concat(parts=[self._fold_expr(p, env) for p in e.parts],
                          line=e.line, col=e.col)
        if isinstance(e, Repeat):
            count = e.count if isinstance(e.count, int) else eval_const(
                e.count, env, "replication count")
            if count < 1:
                raise ElaborationError(
                    f"L{e.line}: replication count must be >= 1")
            return Repeat(count=count, value=self._fold_expr(e.value, env),
                          line=e.line, col=e.col)
        raise ElaborationError(f"unexpected expression {type(e).__name__}")

    # ---- per-module validation ----

    def _validate(self, mod: ModuleDecl):
        names: dict[str, int] = {}
        for p in mod.ports:
            if p.name in names:
                raise ElaborationError(
                    f"L{p.line}: {p.name!r} declared twice in {mod.name}")
            names[p.name] = p.line
            if p.width < 1:
                raise ElaborationError(f"L{p.line}: zero-width port {p.name!r}")
        merged_items = []
        for it in mod.items:
            if isinstance(it, NetDecl):
                if it.name in names:
                    port = mod.port(it.name)
                    if port is not None and port.kind == "wire" \
                            and it.kind == "reg" and port.direction == "output":
                        if port.width != it.width:
                            raise ElaborationError(
                                f"L{it.line}: reg {it.name!r} width differs "
                                "from its port declaration")
                        port.kind = "reg"   # non-ANSI output reg pairing
                        continue
                    raise ElaborationError(
                        f"L{it.line}: {it.name!r} declared twice in {mod.name}")
                names[it.name] = it.line
            merged_items.append(it)
        mod.items[:] = merged_items

        scope = mod.scope()
        for it in mod.items:
            if isinstance(it, ContAssign):
                self._check_lvalue(it.lhs, scope, procedural=False)
                self._check_expr(it.rhs, scope)
            elif isinstance(it, AlwaysBlock):
                self._check_always(it, scope)
            elif isinstance(it, Instance):
                seen = set()
                for c in it.conns:
                    if c.port in seen:
                        raise ElaborationError(
                            f"L{it.line}: port {c.port!r} connected twice")
                    seen.add(c.port)
                    if c.expr is not None:
                        self._check_expr(c.expr, scope)

    def _check_always(self, blk: AlwaysBlock, scope):
        if blk.edges is not None:
            if not blk.edges:
                raise ElaborationError(f"L{blk.line}: empty sensitivity list")
            for e in blk.edges:
                if e.signal not in scope:
                    raise ElaborationError(
                        f"L{e.line}: undeclared edge signal {e.signal!r}")
                if scope[e.signal].width != 1:
                    raise ElaborationError(
                        f"L{e.line}: edge signal {e.signal!r} must be 1 bit")
        for s in walk_stmts(blk.body):
            if isinstance(s, (BlockingAssign, NonBlockingAssign)):
                self._check_lvalue(s.lhs, scope, procedural=True)
                self._check_expr(s.rhs, scope)
                target_kinds = {scope[n].kind
                                for n in _lvalue_names(s.lhs)}
                if blk.is_star and isinstance(s, NonBlockingAssign):
                    raise ElaborationError(
                        f"L{s.line}: nonblocking assignment in @(*) block")
                if not blk.is_star and isinstance(s, BlockingAssign) \
                        and target_kinds != {"integer"}:
                    raise ElaborationError(
                        f"L{s.line}: blocking assignment to state register "
                        "in edge-sensitive block")
            elif isinstance(s, IfStmt):
                self._check_expr(s.cond, scope)
            elif isinstance(s, CaseStmt):
                self._check_expr(s.selector, scope)
                for item in s.items:
                    for lab in item.labels:
                        if isinstance(lab, MaskedLiteral) and not s.casez:
                            raise ElaborationError(
                                f"L{lab.line}: ? digits only in casez labels")
                        if not isinstance(lab, (Literal, MaskedLiteral)):
                            raise UnsupportedConstruct(
                                "non-constant case label", s.line)
            elif isinstance(s, ForStmt):
                self._check_for(s, scope)

    def _check_for(self, s: ForStmt, scope):
        if s.var not in scope or scope[s.var].kind != "integer":
            raise ElaborationError(
                f"L{s.line}: loop variable {s.var!r} must be an integer")
        if not isinstance(s.init, Literal):
            raise ElaborationError(
                f"L{s.line}: loop start must be a constant")
        c = s.cond
        ok = (isinstance(c, Binary) and c.op in ("<", "<=", ">", ">=", "!=")
              and ((isinstance(c.left, Ident) and c.left.name == s.var
                    and isinstance(c.right, Literal))
                   or (isinstance(c.right, Ident) and c.right.name == s.var
                       and isinstance(c.left, Literal))))
        if not ok:
            raise ElaborationError(
                f"L{s.line}: loop bound must compare {s.var!r} with a constant")
        st = s.step
        ok = (isinstance(st, Binary) and st.op in ("+", "-")
              and isinstance(st.left, Ident) and st.left.name == s.var
              and isinstance(st.right, Literal) and st.right.value > 0)
        if not ok:
            raise ElaborationError(
                f"L{s.line}: loop step must be {s.var} +/- positive constant")

    def _check_expr(self, e: Expr, scope):
        for sub in walk_exprs(e):
            if isinstance(sub, Ident):
                if sub.name not in scope:
                    raise ElaborationError(
                        f"L{sub.line}: undeclared identifier {sub.name!r}")
            elif isinstance(sub, (BitSelect, PartSelect)):
                if sub.name not in scope:
                    raise ElaborationError(
                        f"L{sub.line}: undeclared identifier {sub.name!r}")
                w = scope[sub.name].width
                if isinstance(sub, PartSelect) and sub.msb >= w:
                    raise ElaborationError(
                        f"L{sub.line}: part-select [{sub.msb}:{sub.lsb}] "
                        f"exceeds width of {sub.name!r}")
                if isinstance(sub, BitSelect) and \
                        isinstance(sub.index, Literal) and \
                        sub.index.value >= w:
                    raise ElaborationError(
                        f"L{sub.line}: bit index {sub.index.value} exceeds "
                        f"width of {sub.name!r}")
            elif isinstance(sub, MaskedLiteral):
                raise ElaborationError(
                    f"L{sub.line}: ? digits only in casez labels")

    def _check_lvalue(self, lhs: Expr, scope, procedural: bool):
        if isinstance(lhs, Concat):
            for p in lhs.parts:
                self._check_lvalue(p, scope, procedural)
            return
        if isinstance(lhs, (Ident, BitSelect, PartSelect)):
            if lhs.name not in scope:
                raise ElaborationError(
                    f"L{lhs.line}: undeclared assignment target {lhs.name!r}")
            sig = scope[lhs.name]
            if sig.direction == "input":
                raise ElaborationError(
                    f"L{lhs.line}: cannot assign to input {lhs.name!r}")
            if procedural and sig.kind == "wire":
                raise ElaborationError(
                    f"L{lhs.line}: procedural assignment to wire {lhs.name!r}")
            if not procedural and sig.kind in ("reg", "integer"):
                raise ElaborationError(
                    f"L{lhs.line}: continuous assignment to reg {lhs.name!r}")
            if isinstance(lhs, BitSelect):
                if not procedural and not isinstance(lhs.index, Literal):
                    raise UnsupportedConstruct(
                        "dynamic bit-select in continuous assign target",
                        lhs.line)
                self._check_expr(lhs.index, scope)
            if isinstance(lhs, PartSelect) and lhs.msb >= sig.width:
                raise ElaborationError(
                    f"L{lhs.line}: part-select exceeds width of {lhs.name!r}")
            return
        raise ElaborationError(
            f"L{getattr(lhs, 'line', 0)}: invalid assignment target")


def _lvalue_names(lhs: Expr) -> list[str]:
    if isinstance(lhs, Concat):
        out = []
        for p in lhs.parts:
            out.extend(_lvalue_names(p))
        return out
    return [lhs.name]


# ---- design-level linking ----

def _link(modules: list[ModuleDecl], top: Optional[str]) -> SourceUnit:
    by_name: dict[str, ModuleDecl] = {}
    for m in modules:
        if m.name in by_name:
            raise ElaborationError(f"module {m.name!r} defined twice")
        by_name[m.name] = m

    instantiated: set[str] = set()
    for m in modules:
        for it in m.items:
            if not isinstance(it, Instance):
                continue
            child = by_name.get(it.module_name)
            if child is None:
                raise ElaborationError(
                    f"L{it.line}: unknown module {it.module_name!r}")
            instantiated.add(it.module_name)
            child_ports = {p.name: p for p in child.ports}
            for c in it.conns:
                if c.port not in child_ports:
                    raise ElaborationError(
                        f"L{it.line}: {it.module_name} has no port {c.port!r}")
                p = child_ports[c.port]
                if p.direction == "output" and c.expr is not None and \
                        not isinstance(c.expr, (Ident, BitSelect, PartSelect,
                                                Concat)):
                    raise ElaborationError(
                        f"L{it.line}: output port {c.port!r} needs a net "
                        "connection")
            connected = {c.port for c in it.conns if c.expr is not None}
            for p in child.ports:
                if p.direction == "input" and p.name not in connected:
                    raise ElaborationError(
                        f"L{it.line}: input port {p.name!r} of "
                        f"{it.module_name} left unconnected")

    if top is not None:
        if top not in by_name:
            raise ElaborationError(f"top module {top!r} not found")
        top_name = top
    else:
        roots = [m.name for m in modules if m.name not in instantiated]
        if len(roots) != 1:
            raise ElaborationError(
                "cannot infer top module (candidates: "
                f"{', '.join(sorted(roots)) or 'none'}); pass it explicitly")
        top_name = roots[0]

    # acyclicity via DFS from every module
    state: dict[str, int] = {}

    def visit(name: str, chain: list[str]):
        if state.get(name) == 1:
            cycle = " -> ".join(chain + [name])
            raise ElaborationError(f"instantiation cycle: {cycle}")
        if state.get(name) == 2:
            return
        state[name] = 1
        for it in by_name[name].items:
            if isinstance(it, Instance):
                visit(it.module_name, chain + [name])
        state[name] = 2

    for m in modules:
        visit(m.name, [])

    return SourceUnit(modules=modules, top_name=top_name)


def parse(text: str, top: Optional[str] = None) -> SourceUnit:
    """Parse and elaborate a translation unit into a SourceUnit."""
    tokens = lex(text)
    raw_modules = Parser(tokens).parse_source()
    if not raw_modules:
        raise ElaborationError("no modules in input")
    modules = [_Elaborator(raw).run() for raw in raw_modules]
    return _link(modules, top)
