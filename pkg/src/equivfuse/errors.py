"""Exception hierarchy shared by all frontends and passes.

Every user-facing failure raises a subclass of :class:`EquivfuseError`.
Frontend errors carry source coordinates where they exist so the CLI can
print ``file:line:col`` diagnostics verbatim.
"""

from __future__ import annotations


class EquivfuseError(Exception):
    """Base class for all tool errors."""


# ---------------------------------------------------------------- frontends


class SourceError(EquivfuseError):
    """A frontend error anchored to a source location."""

    def __init__(self, message: str, line: int = 0, col: int = 0, path: str | None = None):
        self.line = line
        self.col = col
        self.path = path
        prefix = ""
        if path:
            prefix = f"{path}:"
        if line:
            prefix += f"{line}:{col}: "
        elif path:
            prefix += " "
        super().__init__(prefix + message)


class SyntaxError(SourceError):  # noqa: A001 - deliberate, scoped as errors.SyntaxError
    """Malformed source text (any textual frontend)."""


class UnsupportedConstruct(SourceError):
    """Source uses a construct outside the accepted subset."""

    def __init__(self, name: str, line: int = 0, col: int = 0, path: str | None = None):
        self.construct = name
        super().__init__(f"unsupported construct: {name}", line, col, path)


class DuplicateDefinition(SourceError):
    pass


class CheckError(SourceError):
    """Static validation failure of a parsed program."""


class StaticOutOfBounds(CheckError):
    pass


class NonConstantBound(CheckError):
    pass


class UseBeforeDecl(CheckError):
    pass


class TypeMismatch(CheckError):
    pass


class UnassignedOutput(CheckError):
    """An output parameter is not provably assigned."""


class DynamicOutOfBounds(EquivfuseError):
    """Interpreter hit an out-of-range index; the fixture is buggy."""

    def __init__(self, index: int, length: int, array: str = ""):
        self.index = index
        self.length = length
        self.array = array
        where = f" in {array!r}" if array else ""
        super().__init__(f"index {index} out of range for length {length}{where}")


# ------------------------------------------------------------ graph frontend


class SchemaError(EquivfuseError):
    pass


class ShapeMismatch(EquivfuseError):
    def __init__(self, node: str, detail: str = ""):
        self.node = node
        super().__init__(f"shape mismatch at node {node!r}" + (f": {detail}" if detail else ""))


class UnknownOp(EquivfuseError):
    def __init__(self, name: str):
        self.op = name
        super().__init__(f"unknown graph op {name!r}")


# ---------------------------------------------------------- netlist frontend


class UnknownCell(EquivfuseError):
    def __init__(self, name: str, instance: str = ""):
        self.cell = name
        where = f" (instance {instance!r})" if instance else ""
        super().__init__(f"unknown cell or module {name!r}{where}")


class UnconnectedPin(EquivfuseError):
    pass


class MultipleDrivers(EquivfuseError):
    def __init__(self, net: str):
        self.net = net
        super().__init__(f"net {net!r} has multiple drivers")


class CombinationalLoop(EquivfuseError):
    def __init__(self, cycle: list[str]):
        self.cycle = cycle
        super().__init__("combinational loop: " + " -> ".join(cycle))


class WidthMismatch(EquivfuseError):
    """Bit-width disagreement, in a netlist assign/pin or between matched ports."""

    def __init__(
        self,
        message: str,
        *,
        name: str | None = None,
        spec_w: int | None = None,
        impl_w: int | None = None,
    ):
        self.name = name
        self.spec_w = spec_w
        self.impl_w = impl_w
        super().__init__(message)


# ------------------------------------------------------------------ core IR


class TripCountOverflow(EquivfuseError):
    def __init__(self, limit: int, detail: str = ""):
        self.limit = limit
        super().__init__(f"unrolled statement budget exceeded (limit {limit})"
                         + (f": {detail}" if detail else ""))


class HasState(EquivfuseError):
    """Operation requires a combinational module but registers are present."""


# -------------------------------------------------------------------- miter


class PortMatchError(EquivfuseError):
    """Base for spec/impl port matching failures; terminates the run."""


class CountMismatch(PortMatchError):
    def __init__(self, spec_n: int, impl_n: int):
        self.spec_n = spec_n
        self.impl_n = impl_n
        super().__init__(f"port count mismatch: spec has {spec_n}, impl has {impl_n}")


class NameMissing(PortMatchError):
    def __init__(self, side: str, name: str):
        self.side = side
        self.name = name
        super().__init__(f"port {name!r} has no counterpart on the {side} side")


class DirectionMismatch(PortMatchError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"port {name!r} direction differs between spec and impl")


class NeedsUnrollDepth(EquivfuseError):
    def __init__(self, module: str):
        super().__init__(f"module {module!r} is sequential; an unroll depth (-k) is required")


# ----------------------------------------------------------------- backends


class MultiOutput(EquivfuseError):
    def __init__(self, n: int):
        super().__init__(f"expected a single-output AIG, got {n} outputs")


class ParseFailure(EquivfuseError):
    """Solver output could not be understood; never fabricate a verdict."""

    def __init__(self, excerpt: str):
        self.excerpt = excerpt
        super().__init__(f"cannot parse solver output: {excerpt!r}")


# -------------------------------------------------------------------- solve


class ResourceLimit(EquivfuseError):
    def __init__(self, kind: str, limit: int):
        self.kind = kind
        self.limit = limit
        super().__init__(f"{kind} limit exceeded ({limit})")


class SpawnFailure(EquivfuseError):
    def __init__(self, path: str, reason: str = ""):
        self.path = path
        super().__init__(f"cannot launch solver {path!r}" + (f": {reason}" if reason else ""))


# ---------------------------------------------------------------------- cli


class ConflictingDirective(EquivfuseError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"conflicting port directives for {name!r}")


class TopNotFound(EquivfuseError):
    def __init__(self, name: str, available: list[str] | None = None):
        self.name = name
        hint = f" (available: {', '.join(available)})" if available else ""
        super().__init__(f"top module {name!r} not found{hint}")


class UnsupportedFrontend(EquivfuseError):
    pass


class UsageError(EquivfuseError):
    """Bad command-line usage; exit code 3."""
