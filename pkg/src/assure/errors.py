"""Exception types shared across the toolchain."""

from __future__ import annotations


class AssureError(Exception):
    """Base class for all tool errors."""


class VerilogSyntaxError(AssureError):
    def __init__(self, msg: str, line: int, col: int):
        super().__init__(f"L{line}:{col}: {msg}")
        self.line = line
        self.col = col


class UnsupportedConstruct(AssureError):
    def __init__(self, name: str, line: int):
        super().__init__(f"L{line}: unsupported construct: {name}")
        self.construct = name
        self.line = line


class ParameterUnresolvable(AssureError):
    def __init__(self, name: str, line: int):
        super().__init__(f"L{line}: parameter expression for {name!r} is not compile-time constant")
        self.name = name
        self.line = line


class ElaborationError(AssureError):
    """Structural problems found after parse: undeclared names, cyclic
    hierarchy, duplicate modules, bad widths."""


class TechniqueSetEmpty(AssureError):
    pass


class InputKeyExhausted(AssureError):
    pass


class NoSafeDummy(AssureError):
    """No dummy operator survives the collision/obviousness filters."""


class KeyPortCollision(AssureError):
    pass


class FormatError(AssureError):
    """Malformed key or manifest file."""


class SimulationError(AssureError):
    pass


class CombinationalLoop(SimulationError):
    def __init__(self, nets: set[str]):
        super().__init__(f"combinational loop through: {', '.join(sorted(nets))}")
        self.nets = nets


class DriverConflict(SimulationError):
    def __init__(self, net: str, detail: str = ""):
        super().__init__(f"multiple drivers for {net}" + (f": {detail}" if detail else ""))
        self.net = net


class CapExceeded(AssureError):
    """Exhaustive experiment would exceed its documented size cap."""
