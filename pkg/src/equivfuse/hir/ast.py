"""Typed AST for the algorithmic frontend.

Types are fixed-width two's-complement integers (1..64 bits) and fixed-length
one-dimensional arrays of them. Statements are limited to constant-bound for
loops, if/else, and assignments; expressions carry their result type after
validation (the parser leaves ``type`` unset except where syntax forces it).
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class HirType:
    kind: str            # "scalar" | "array"
    signed: bool
    width: int           # element width in bits, 1..64
    length: int | None = None  # arrays only

    def __post_init__(self):
        if not (1 <= self.width <= 64):
            raise ValueError(f"width {self.width} out of range")
        if self.kind == "array" and (self.length is None or self.length < 1):
            raise ValueError("array needs a positive length")

    @property
    def is_array(self) -> bool:
        return self.kind == "array"

    def elem(self) -> "HirType":
        return HirType("scalar", self.signed, self.width)

    def __str__(self) -> str:
        base = f"{'s' if self.signed else 'u'}{self.width}"
        return f"{base}[{self.length}]" if self.is_array else base


def scalar(signed: bool, width: int) -> HirType:
    return HirType("scalar", signed, width)


def array(signed: bool, width: int, length: int) -> HirType:
    return HirType("array", signed, width, length)


U1 = scalar(False, 1)


# -- expressions ---------------------------------------------------------------

@dataclass
class HirExpr:
    line: int = field(default=0, kw_only=True)
    col: int = field(default=0, kw_only=True)
    type: HirType | None = field(default=None, kw_only=True)


@dataclass
class Const(HirExpr):
    value: int  # after validation: the unsigned word for self.type


@dataclass
class Var(HirExpr):
    name: str


@dataclass
class Index(HirExpr):
    array: str
    index: HirExpr


@dataclass
class Binary(HirExpr):
    op: str  # add sub mul and or xor shl lshr ashr eq ne lt le gt ge (parser may emit "shr")
    lhs: HirExpr
    rhs: HirExpr


@dataclass
class Unary(HirExpr):
    op: str  # "not" (bitwise complement) | "neg"
    operand: HirExpr


@dataclass
class Cast(HirExpr):
    kind: str  # "trunc" | "zext" | "sext"; fixed up by the checker
    to: HirType
    operand: HirExpr


COMPARISONS = frozenset(["eq", "ne", "lt", "le", "gt", "ge"])


# -- statements ---------------------------------------------------------------

@dataclass
class HirStmt:
    line: int = field(default=0, kw_only=True)
    col: int = field(default=0, kw_only=True)


@dataclass
class Assign(HirStmt):
    # lvalue is Var or Index
    lvalue: HirExpr
    expr: HirExpr


@dataclass
class If(HirStmt):
    cond: HirExpr
    then: list[HirStmt]
    orelse: list[HirStmt]


@dataclass
class For(HirStmt):
    """for (var = lower; var < upper; var += step).

    The parser stores bound expressions plus the source comparison in
    ``cmp``; validation folds bounds to ints and rewrites every loop to
    this canonical ascending < form (cmp == "lt").
    """
    var: str
    lower: "HirExpr | int"
    upper: "HirExpr | int"
    step: "HirExpr | int"
    body: list[HirStmt]
    cmp: str = field(default="lt", kw_only=True)  # lt | le | gt | ge
    var_type: HirType | None = field(default=None, kw_only=True)  # set by validation


# -- functions ----------------------------------------------------------------

@dataclass
class Param:
    name: str
    type: HirType
    direction: str  # "in" | "out"


@dataclass
class HirFunction:
    name: str
    params: list[Param]
    locals: list[tuple[str, HirType]]
    body: list[HirStmt]
    validated: bool = False

    def param(self, name: str) -> Param:
        for p in self.params:
            if p.name == name:
                return p
        raise KeyError(name)

    def in_params(self) -> list[Param]:
        return [p for p in self.params if p.direction == "in"]

    def out_params(self) -> list[Param]:
        return [p for p in self.params if p.direction == "out"]

    def dump(self) -> str:
        lines = [f"func {self.name}("
                 + ", ".join(f"{p.direction} {p.name}: {p.type}" for p in self.params)
                 + ")"]
        for name, ty in self.locals:
            lines.append(f"  local {name}: {ty}")
        _dump_block(self.body, lines, 1)
        return "\n".join(lines) + "\n"


@dataclass
class HirProgram:
    functions: dict[str, HirFunction]

    def dump(self) -> str:
        return "\n".join(f.dump() for f in self.functions.values())


def _dump_block(stmts: list[HirStmt], out: list[str], depth: int) -> None:
    pad = "  " * depth
    for s in stmts:
        if isinstance(s, Assign):
            out.append(f"{pad}{dump_expr(s.lvalue)} = {dump_expr(s.expr)}")
        elif isinstance(s, If):
            out.append(f"{pad}if {dump_expr(s.cond)}")
            _dump_block(s.then, out, depth + 1)
            if s.orelse:
                out.append(f"{pad}else")
                _dump_block(s.orelse, out, depth + 1)
        elif isinstance(s, For):
            lo = s.lower if isinstance(s.lower, int) else dump_expr(s.lower)
            hi = s.upper if isinstance(s.upper, int) else dump_expr(s.upper)
            st = s.step if isinstance(s.step, int) else dump_expr(s.step)
            out.append(f"{pad}for {s.var} in [{lo}, {hi}) step {st}")
            _dump_block(s.body, out, depth + 1)
        else:
            raise TypeError(type(s).__name__)


def dump_expr(e: HirExpr) -> str:
    if isinstance(e, Const):
        suffix = f":{e.type}" if e.type else ""
        return f"{e.value}{suffix}"
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Index):
        return f"{e.array}[{dump_expr(e.index)}]"
    if isinstance(e, Binary):
        return f"({e.op} {dump_expr(e.lhs)} {dump_expr(e.rhs)})"
    if isinstance(e, Unary):
        return f"({e.op} {dump_expr(e.operand)})"
    if isinstance(e, Cast):
        return f"({e.kind}:{e.to} {dump_expr(e.operand)})"
    raise TypeError(type(e).__name__)
