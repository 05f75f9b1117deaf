"""Deterministic Verilog emission.

One canonical layout: two-space indent, one statement per line, begin/end
around every body, ANSI port headers. Parentheses are inserted where
precedence demands them, plus around arithmetic/comparison operands of
bitwise and logical operators so emitted locking constructs read like
`(a - b) & {8{k}} | (a + b) & {8{~k}}`. Literals print in a fixed base
per width, so two emissions of structurally equal trees are
byte-identical.
"""

from __future__ import annotations

from .ast_nodes import (AlwaysBlock, BitSelect, Binary, BlockingAssign,
                        CaseStmt, Concat, ContAssign, Expr, ForStmt, Ident,
                        IfStmt, Instance, KeySlice, Literal, MaskedLiteral,
                        ModuleDecl, NetDecl, NonBlockingAssign, PartSelect,
                        Repeat, SourceUnit, Stmt, Ternary, Unary)
from .errors import AssureError

_PREC = {
    "||": 2, "&&": 3, "|": 4, "^": 5, "~^": 5, "&": 6,
    "==": 7, "!=": 7, "<": 8, "<=": 8, ">": 8, ">=": 8,
    "<<": 9, ">>": 9, "+": 10, "-": 10, "*": 11, "/": 11, "%": 11,
}
_UNARY_PREC = 12
_PRIMARY_PREC = 13
_TERNARY_PREC = 1

# bitwise/logical parents parenthesize tighter binary children for
# readability even when precedence alone would disambiguate
_WRAPPING_PARENTS = {"&", "|", "^", "~^", "&&", "||"}


def _prec(e: Expr) -> int:
    if isinstance(e, Binary):
        return _PREC[e.op]
    if isinstance(e, Unary):
        return _UNARY_PREC
    if isinstance(e, Ternary):
        return _TERNARY_PREC
    return _PRIMARY_PREC


def literal_text(value: int, width: int, sized: bool) -> str:
    if not sized:
        return str(value)
    if width == 1:
        return f"1'b{value}"
    if width <= 4:
        return f"{width}'b{value:0{width}b}"
    digits = (width + 3) // 4
    return f"{width}'h{value:0{digits}x}"


def emit_expr(e: Expr) -> str:
    return _expr(e, 0, False, None)


def _expr(e: Expr, parent_prec: int, is_right: bool,
          parent_op: str | None) -> str:
    if isinstance(e, Literal):
        return literal_text(e.value, e.width, e.sized)
    if isinstance(e, MaskedLiteral):
        digits = []
        for i in range(e.width - 1, -1, -1):
            if (e.care >> i) & 1:
                digits.append(str((e.value >> i) & 1))
            else:
                digits.append("?")
        return f"{e.width}'b{''.join(digits)}"
    if isinstance(e, Ident):
        return e.name
    if isinstance(e, BitSelect):
        return f"{e.name}[{_expr(e.index, 0, False, None)}]"
    if isinstance(e, PartSelect):
        return f"{e.name}[{e.msb}:{e.lsb}]"
    if isinstance(e, KeySlice):
        raise AssureError(
            "abstract key bits reached the emitter; run insert_key_ports first")
    if isinstance(e, Concat):
        return "{" + ", ".join(_expr(p, 0, False, None) for p in e.parts) + "}"
    if isinstance(e, Repeat):
        return "{%d{%s}}" % (e.count, _expr(e.value, 0, False, None))
    if isinstance(e, Unary):
        inner = _expr(e.operand, _UNARY_PREC + 1, False, None)
        if _prec(e.operand) < _PRIMARY_PREC:
            inner = f"({inner})"
        return f"{e.op}{inner}"
    if isinstance(e, Ternary):
        text = (f"{_expr(e.cond, _TERNARY_PREC + 1, False, None)} ? "
                f"{_expr(e.then_val, _TERNARY_PREC, False, None)} : "
                f"{_expr(e.else_val, _TERNARY_PREC, True, None)}")
        if parent_prec > _TERNARY_PREC:
            return f"({text})"
        return text
    if isinstance(e, Binary):
        prec = _PREC[e.op]
        left = _expr(e.left, prec, False, e.op)
        right = _expr(e.right, prec + 1, True, e.op)
        text = f"{left} {e.op} {right}"
        if parent_prec > prec:
            return f"({text})"
        if parent_prec == prec and is_right:
            return f"({text})"
        if parent_op in _WRAPPING_PARENTS and prec >= 7:
            return f"({text})"
        return text
    raise AssureError(f"cannot emit {type(e).__name__}")


class _Writer:
    def __init__(self):
        self.lines: list[str] = []
        self.depth = 0

    def put(self, text: str):
        self.lines.append("  " * self.depth + text)

    def text(self) -> str:
        return "\n".join(self.lines) + "\n"


def _pragma_prefix(node) -> str:
    return "(* assure_skip *) " if node.skip_pragma else ""


def _emit_stmts(w: _Writer, stmts: list[Stmt]):
    for s in stmts:
        _emit_stmt(w, s)


def _emit_stmt(w: _Writer, s: Stmt):
    pre = _pragma_prefix(s)
    if isinstance(s, BlockingAssign):
        w.put(f"{pre}{emit_expr(s.lhs)} = {emit_expr(s.rhs)};")
    elif isinstance(s, NonBlockingAssign):
        w.put(f"{pre}{emit_expr(s.lhs)} <= {emit_expr(s.rhs)};")
    elif isinstance(s, IfStmt):
        w.put(f"{pre}if ({emit_expr(s.cond)}) begin")
        w.depth += 1
        _emit_stmts(w, s.then_body)
        w.depth -= 1
        _emit_else_tail(w, s)
    elif isinstance(s, CaseStmt):
        kw = "casez" if s.casez else "case"
        w.put(f"{pre}{kw} ({emit_expr(s.selector)})")
        w.depth += 1
        for item in s.items:
            labels = ", ".join(emit_expr(l) for l in item.labels)
            w.put(f"{labels}: begin")
            w.depth += 1
            _emit_stmts(w, item.body)
            w.depth -= 1
            w.put("end")
        if s.default_body is not None:
            w.put("default: begin")
            w.depth += 1
            _emit_stmts(w, s.default_body)
            w.depth -= 1
            w.put("end")
        w.depth -= 1
        w.put("endcase")
    elif isinstance(s, ForStmt):
        w.put(f"{pre}for ({s.var} = {emit_expr(s.init)}; "
              f"{emit_expr(s.cond)}; {s.var} = {emit_expr(s.step)}) begin")
        w.depth += 1
        _emit_stmts(w, s.body)
        w.depth -= 1
        w.put("end")
    else:
        raise AssureError(f"cannot emit statement {type(s).__name__}")


def _emit_else_tail(w: _Writer, s: IfStmt):
    """Close the then-block of s and emit its else part, if any."""
    w.put("end")
    if not s.else_body:
        return
    if len(s.else_body) == 1 and isinstance(s.else_body[0], IfStmt) \
            and not s.else_body[0].skip_pragma:
        chain = s.else_body[0]
        w.put(f"else if ({emit_expr(chain.cond)}) begin")
        w.depth += 1
        _emit_stmts(w, chain.then_body)
        w.depth -= 1
        _emit_else_tail(w, chain)
        return
    w.put("else begin")
    w.depth += 1
    _emit_stmts(w, s.else_body)
    w.depth -= 1
    w.put("end")


def _port_text(p) -> str:
    parts = [p.direction]
    if p.kind == "reg":
        parts.append("reg")
    if p.signed:
        parts.append("signed")
    if p.width > 1:
        parts.append(f"[{p.width - 1}:0]")
    parts.append(p.name)
    return " ".join(parts)


def emit_module(m: ModuleDecl) -> str:
    w = _Writer()
    if m.skip_pragma:
        w.put("(* assure_skip *)")
    if m.ports:
        w.put(f"module {m.name} (")
        w.depth += 1
        for i, p in enumerate(m.ports):
            comma = "," if i < len(m.ports) - 1 else ""
            w.put(_port_text(p) + comma)
        w.depth -= 1
        w.put(");")
    else:
        w.put(f"module {m.name};")
    w.depth += 1
    for it in m.items:
        pre = _pragma_prefix(it)
        if isinstance(it, NetDecl):
            if it.kind == "integer":
                w.put(f"{pre}integer {it.name};")
            else:
                rng = f"[{it.width - 1}:0] " if it.width > 1 else ""
                sgn = "signed " if it.signed else ""
                w.put(f"{pre}{it.kind} {sgn}{rng}{it.name};")
        elif isinstance(it, ContAssign):
            w.put(f"{pre}assign {emit_expr(it.lhs)} = {emit_expr(it.rhs)};")
        elif isinstance(it, AlwaysBlock):
            if it.is_star:
                sens = "*"
            else:
                sens = " or ".join(f"{e.polarity} {e.signal}"
                                   for e in it.edges)
            w.put(f"{pre}always @({sens}) begin")
            w.depth += 1
            _emit_stmts(w, it.body)
            w.depth -= 1
            w.put("end")
        elif isinstance(it, Instance):
            conns = ", ".join(
                f".{c.port}({emit_expr(c.expr) if c.expr is not None else ''})"
                for c in it.conns)
            w.put(f"{pre}{it.module_name} {it.name} ({conns});")
        else:
            raise AssureError(f"cannot emit item {type(it).__name__}")
    w.depth -= 1
    w.put("endmodule")
    return w.text()


def emit(design: SourceUnit) -> str:
    """Emit the whole design; output is stable across runs."""
    return "\n".join(emit_module(m) for m in design.modules)
