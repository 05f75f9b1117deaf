"""Expression width rules for the 2-state subset.

Self-determined width, bottom-up:

  literal             declared width; unsized decimal counts as 32
  identifier          declared width
  bit-select          1
  part-select [m:l]   m - l + 1
  ~e, -e              width(e)
  !e, reductions      1
  a op b  (+ - * / % & | ^ ~^)   max(width(a), width(b))
  a << b, a >> b      width(a); the shift amount is self-determined
  comparisons, && ||  1
  c ? t : f           max(width(t), width(f)); c is self-determined
  {a, b, ...}         sum of part widths (parts self-determined)
  {n{e}}              n * width(e)

Evaluation width, top-down: an assignment evaluates its RHS at
max(lhs_width, self_width(rhs)) and truncates on store. That width
propagates unchanged through + - * / % & | ^ ~^ ~ unary-minus, the
arms of ?:, and the left operand of shifts. Comparison operands are
sized to the max of the two sides; everything else (shift amounts,
logical/reduction operands, concat and repeat parts, conditions,
select indices) restarts at its own self-determined width. All
arithmetic is unsigned modulo 2^width; `signed` declarations parse and
re-emit but do not alter evaluation.

Anchor width is the same bottom-up computation with unsized literals
counting as 1 bit instead of 32. It measures the width of the signals
a constant actually interacts with and drives the key width used when
a constant is extracted into the key (so a 1-bit flag initialized with
integer 1 contributes one key bit, not thirty-two).
"""

from __future__ import annotations

from .ast_nodes import (BitSelect, Binary, Concat, Expr, Ident, KeySlice,
                        Literal, MaskedLiteral, PartSelect, Repeat, Signal,
                        Ternary, Unary)
from .errors import ElaborationError

CONTEXT_BINOPS = {"+", "-", "*", "/", "%", "&", "|", "^", "~^"}
COMPARISONS = {"==", "!=", "<", "<=", ">", ">="}
SHIFTS = {"<<", ">>"}
LOGICAL = {"&&", "||"}
REDUCTIONS = {"&", "|", "^"}

BINARY_OPS = CONTEXT_BINOPS | COMPARISONS | SHIFTS | LOGICAL
UNARY_OPS = {"~", "!", "-", "&", "|", "^"}


def _ref_width(e: Expr, scope: dict[str, Signal]) -> int:
    name = e.name
    if name not in scope:
        raise ElaborationError(f"L{e.line}: undeclared identifier {name!r}")
    return scope[name].width


def self_width(e: Expr, scope: dict[str, Signal]) -> int:
    return _width(e, scope, unsized_as=32)


def anchor_width(e: Expr, scope: dict[str, Signal]) -> int:
    """Self-determined width with unsized literals counted as 1 bit."""
    return _width(e, scope, unsized_as=1)


def _width(e: Expr, scope: dict[str, Signal], unsized_as: int) -> int:
    if isinstance(e, (Literal, MaskedLiteral)):
        if isinstance(e, Literal) and not e.sized:
            return unsized_as
        return e.width
    if isinstance(e, Ident):
        return _ref_width(e, scope)
    if isinstance(e, BitSelect):
        _ref_width(e, scope)
        return 1
    if isinstance(e, PartSelect):
        _ref_width(e, scope)
        return e.msb - e.lsb + 1
    if isinstance(e, KeySlice):
        return e.width
    if isinstance(e, Unary):
        if e.op in ("~", "-"):
            return _width(e.operand, scope, unsized_as)
        return 1  # ! and the & | ^ reductions
    if isinstance(e, Binary):
        if e.op in CONTEXT_BINOPS:
            return max(_width(e.left, scope, unsized_as),
                       _width(e.right, scope, unsized_as))
        if e.op in SHIFTS:
            return _width(e.left, scope, unsized_as)
        return 1  # comparisons and logical ops
    if isinstance(e, Ternary):
        return max(_width(e.then_val, scope, unsized_as),
                   _width(e.else_val, scope, unsized_as))
    if isinstance(e, Concat):
        return sum(self_width(p, scope) for p in e.parts)
    if isinstance(e, Repeat):
        return e.count * self_width(e.value, scope)
    raise ElaborationError(f"width of unexpected node {type(e).__name__}")


def eval_width(rhs: Expr, lhs_width: int, scope: dict[str, Signal]) -> int:
    """Width at which an assignment RHS is evaluated."""
    return max(lhs_width, self_width(rhs, scope))


def lvalue_width(lhs: Expr, scope: dict[str, Signal]) -> int:
    if isinstance(lhs, Ident):
        return _ref_width(lhs, scope)
    if isinstance(lhs, BitSelect):
        _ref_width(lhs, scope)
        return 1
    if isinstance(lhs, PartSelect):
        _ref_width(lhs, scope)
        return lhs.msb - lhs.lsb + 1
    if isinstance(lhs, Concat):
        return sum(lvalue_width(p, scope) for p in lhs.parts)
    raise ElaborationError(f"L{lhs.line}: invalid assignment target")
