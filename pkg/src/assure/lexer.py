"""Tokenizer for the Verilog subset.

2-state value model: x/z digits in numeric literals are rejected, except
`?` which is kept so casez labels can express don't-care bits.

Skip pragmas are recognized here and surface as PRAGMA_SKIP tokens:
  (* assure_skip *)      attribute form
  // assure: skip        line-comment form
Other attributes are discarded. Compiler directives `timescale and
`default_nettype are skipped; anything else starting with a backtick is
rejected (inputs are single preprocessed translation units).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum, auto

from .errors import UnsupportedConstruct, VerilogSyntaxError


class T(Enum):
    NUMBER = auto()
    IDENT = auto()

    # keywords
    MODULE = auto()
    ENDMODULE = auto()
    INPUT = auto()
    OUTPUT = auto()
    INOUT = auto()
    WIRE = auto()
    REG = auto()
    INTEGER = auto()
    GENVAR = auto()
    PARAMETER = auto()
    LOCALPARAM = auto()
    ASSIGN = auto()
    ALWAYS = auto()
    BEGIN = auto()
    END = auto()
    IF = auto()
    ELSE = auto()
    CASE = auto()
    CASEZ = auto()
    ENDCASE = auto()
    DEFAULT = auto()
    FOR = auto()
    GENERATE = auto()
    ENDGENERATE = auto()
    POSEDGE = auto()
    NEGEDGE = auto()
    OR_KW = auto()
    SIGNED = auto()

    # operators
    PLUS = auto()
    MINUS = auto()
    STAR = auto()
    SLASH = auto()
    PERCENT = auto()
    AMP = auto()
    PIPE = auto()
    CARET = auto()
    XNOR = auto()          # ~^ or ^~
    TILDE = auto()
    BANG = auto()
    LSHIFT = auto()
    RSHIFT = auto()
    LAND = auto()
    LOR = auto()
    EQ = auto()
    NEQ = auto()
    LT = auto()
    LE = auto()
    GT = auto()
    GE = auto()
    QUESTION = auto()
    COLON = auto()
    AT = auto()
    HASH = auto()

    LPAREN = auto()
    RPAREN = auto()
    LBRACKET = auto()
    RBRACKET = auto()
    LBRACE = auto()
    RBRACE = auto()
    SEMI = auto()
    COMMA = auto()
    DOT = auto()
    ASSIGN_OP = auto()     # =

    PRAGMA_SKIP = auto()
    EOF = auto()


@dataclass
class Token:
    type: T
    value: str
    line: int
    col: int

    def __repr__(self):
        return f"Token({self.type.name}, {self.value!r}, L{self.line}:{self.col})"


KEYWORDS: dict[str, T] = {
    "module": T.MODULE, "endmodule": T.ENDMODULE,
    "input": T.INPUT, "output": T.OUTPUT, "inout": T.INOUT,
    "wire": T.WIRE, "reg": T.REG, "integer": T.INTEGER, "genvar": T.GENVAR,
    "parameter": T.PARAMETER, "localparam": T.LOCALPARAM,
    "assign": T.ASSIGN, "always": T.ALWAYS,
    "begin": T.BEGIN, "end": T.END,
    "if": T.IF, "else": T.ELSE,
    "case": T.CASE, "casez": T.CASEZ, "endcase": T.ENDCASE, "default": T.DEFAULT,
    "for": T.FOR, "generate": T.GENERATE, "endgenerate": T.ENDGENERATE,
    "posedge": T.POSEDGE, "negedge": T.NEGEDGE, "or": T.OR_KW,
    "signed": T.SIGNED,
}

# Constructs in IEEE 1364 but outside the subset; named rejections give
# friendlier errors than a generic syntax failure.
_REJECTED_KEYWORDS = {
    "casex", "function", "endfunction", "task", "endtask", "initial",
    "real", "time", "fork", "join", "while", "repeat", "forever",
    "wait", "deassign", "force", "release", "specify", "endspecify",
    "primitive", "endprimitive", "table", "endtable", "defparam",
    "tri", "triand", "trior", "tri0", "tri1", "supply0", "supply1",
    "event", "disable", "automatic",
}

_SKIPPED_DIRECTIVES = {"timescale", "default_nettype", "celldefine",
                       "endcelldefine", "resetall"}

_TWO_CHAR = {
    "<<": T.LSHIFT, ">>": T.RSHIFT, "&&": T.LAND, "||": T.LOR,
    "==": T.EQ, "!=": T.NEQ, "<=": T.LE, ">=": T.GE,
    "~^": T.XNOR, "^~": T.XNOR,
}

_ONE_CHAR = {
    "+": T.PLUS, "-": T.MINUS, "*": T.STAR, "/": T.SLASH, "%": T.PERCENT,
    "&": T.AMP, "|": T.PIPE, "^": T.CARET, "~": T.TILDE, "!": T.BANG,
    "<": T.LT, ">": T.GT, "?": T.QUESTION, ":": T.COLON, "@": T.AT,
    "#": T.HASH, "(": T.LPAREN, ")": T.RPAREN, "[": T.LBRACKET,
    "]": T.RBRACKET, "{": T.LBRACE, "}": T.RBRACE, ";": T.SEMI,
    ",": T.COMMA, ".": T.DOT, "=": T.ASSIGN_OP,
}


class Lexer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.col = 1
        self.tokens: list[Token] = []

    def error(self, msg: str):
        raise VerilogSyntaxError(msg, self.line, self.col)

    def _advance(self, n: int = 1):
        for _ in range(n):
            if self.pos < len(self.text) and self.text[self.pos] == "\n":
                self.line += 1
                self.col = 1
            else:
                self.col += 1
            self.pos += 1

    def _peek(self, off: int = 0) -> str:
        p = self.pos + off
        return self.text[p] if p < len(self.text) else ""

    def _emit(self, tt: T, value: str, line: int, col: int):
        self.tokens.append(Token(tt, value, line, col))

    def run(self) -> list[Token]:
        while self.pos < len(self.text):
            c = self._peek()
            if c in " \t\r\n":
                self._advance()
                continue
            if c == "/" and self._peek(1) == "/":
                self._line_comment()
                continue
            if c == "/" and self._peek(1) == "*":
                self._block_comment()
                continue
            if c == "(" and self._peek(1) == "*" and self._peek(2) != ")":
                self._attribute()
                continue
            if c == "`":
                self._directive()
                continue
            if c.isdigit() or (c == "'" ):
                self._number()
                continue
            if c.isalpha() or c == "_":
                self._ident()
                continue
            self._operator()
        self.tokens.append(Token(T.EOF, "", self.line, self.col))
        return self.tokens

    def _line_comment(self):
        line, col = self.line, self.col
        start = self.pos + 2
        end = self.text.find("\n", start)
        if end == -1:
            end = len(self.text)
        body = self.text[start:end].strip()
        if body.replace(" ", "") == "assure:skip":
            self._emit(T.PRAGMA_SKIP, "// assure: skip", line, col)
        self._advance(end - self.pos)

    def _block_comment(self):
        end = self.text.find("*/", self.pos + 2)
        if end == -1:
            self.error("unterminated block comment")
        self._advance(end + 2 - self.pos)

    def _attribute(self):
        line, col = self.line, self.col
        end = self.text.find("*)", self.pos + 2)
        if end == -1:
            self.error("unterminated attribute")
        body = self.text[self.pos + 2:end].strip()
        if body == "assure_skip":
            self._emit(T.PRAGMA_SKIP, "(* assure_skip *)", line, col)
        # other attributes are metadata we do not interpret
        self._advance(end + 2 - self.pos)

    def _directive(self):
        start = self.pos + 1
        end = start
        while end < len(self.text) and (self.text[end].isalnum() or self.text[end] == "_"):
            end += 1
        name = self.text[start:end]
        if name not in _SKIPPED_DIRECTIVES:
            raise UnsupportedConstruct(f"`{name} directive", self.line)
        nl = self.text.find("\n", end)
        if nl == -1:
            nl = len(self.text)
        self._advance(nl - self.pos)

    def _number(self):
        line, col = self.line, self.col
        start = self.pos
        while self._peek().isdigit() or self._peek() == "_":
            self._advance()
        if self._peek() == "'":
            self._advance()
            if self._peek().lower() == "s":
                raise UnsupportedConstruct("signed literal", line)
            base = self._peek().lower()
            if base not in "bodh":
                self.error(f"bad number base {self._peek()!r}")
            self._advance()
            digits = "0123456789abcdefABCDEF_?xXzZ"
            while self._peek() and self._peek() in digits:
                self._advance()
        raw = self.text[start:self.pos]
        if any(ch in raw for ch in "xXzZ"):
            raise UnsupportedConstruct("x/z value in literal (2-state model)", line)
        self._emit(T.NUMBER, raw, line, col)

    def _ident(self):
        line, col = self.line, self.col
        start = self.pos
        while self._peek().isalnum() or self._peek() in "_$":
            self._advance()
        word = self.text[start:self.pos]
        if word.startswith("$") or "$" in word:
            raise UnsupportedConstruct(f"system identifier {word}", line)
        if word in _REJECTED_KEYWORDS:
            raise UnsupportedConstruct(word, line)
        self._emit(KEYWORDS.get(word, T.IDENT), word, line, col)

    def _operator(self):
        line, col = self.line, self.col
        if self._peek() == ">" and self._peek(1) == ">" and self._peek(2) == ">":
            raise UnsupportedConstruct(">>> arithmetic shift", line)
        if self._peek() == "=" and self._peek(1) == "=" and self._peek(2) == "=":
            raise UnsupportedConstruct("=== case equality", line)
        if self._peek() == "!" and self._peek(1) == "=" and self._peek(2) == "=":
            raise UnsupportedConstruct("!== case inequality", line)
        two = self._peek() + self._peek(1)
        if two in _TWO_CHAR:
            self._emit(_TWO_CHAR[two], two, line, col)
            self._advance(2)
            return
        c = self._peek()
        if c in _ONE_CHAR:
            self._emit(_ONE_CHAR[c], c, line, col)
            self._advance()
            return
        self.error(f"unexpected character {c!r}")


def lex(text: str) -> list[Token]:
    return Lexer(text).run()


def resolve_number(raw: str, line: int = 0) -> tuple[int, int, bool, int]:
    """Decode a literal. Returns (value, width, sized, care_mask).

    care_mask has 0s where the literal used `?` (casez labels only);
    it is all-ones for ordinary literals.
    """
    raw = raw.replace("_", "")
    if "'" not in raw:
        value = int(raw)
        if value >= 1 << 32:
            raise VerilogSyntaxError("unsized literal exceeds 32 bits", line, 0)
        return value, 32, False, (1 << 32) - 1
    size_str, rest = raw.split("'", 1)
    base_char = rest[0].lower()
    digits = rest[1:]
    base = {"b": 2, "o": 8, "d": 10, "h": 16}[base_char]
    if not digits:
        raise VerilogSyntaxError("literal has no digits", line, 0)
    width = int(size_str) if size_str else 32
    if width < 1:
        raise VerilogSyntaxError("literal width must be >= 1", line, 0)
    if "?" in digits:
        if base not in (2, 8, 16):
            raise VerilogSyntaxError("? digits need base 2/8/16", line, 0)
        bits_per = {2: 1, 8: 3, 16: 4}[base]
        value = 0
        care = 0
        for d in digits:
            value <<= bits_per
            care <<= bits_per
            if d == "?":
                continue
            value |= int(d, base)
            care |= (1 << bits_per) - 1
        mask = (1 << width) - 1
        return value & mask, width, True, care & mask
    value = int(digits, base)
    mask = (1 << width) - 1
    if value > mask:
        raise VerilogSyntaxError(
            f"literal value {raw} does not fit in {width} bits", line, 0)
    return value, width, True, mask
