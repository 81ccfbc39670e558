"""Built-in standard cell library.

Six cells modeled after the classic demo CMOS library: BUF, NOT, NAND, NOR,
DFF (posedge D flip-flop) and DFFSR (set/reset flip-flop). The set/reset pins
are folded into the cycle-based model synchronously: sampled from the current
frame, S forces next-state 1 and beats R, else R forces 0, else D is taken.
True asynchronous behavior is out of scope.

Flip-flops initialize to 0. Elaboration treats every clock pin as the one
implicit frame clock after checking it traces to a single top-level input.
"""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Cell:
    name: str
    inputs: tuple[str, ...]
    output: str
    kind: str = "comb"  # "comb" | "reg"
    clock: str = ""
    data: str = ""
    set_pin: str = ""
    reset_pin: str = ""

    @property
    def pins(self) -> tuple[str, ...]:
        return self.inputs + (self.output,)

    def build(self, b, nodes: dict[str, int]) -> int:
        """Emit core nodes computing the output from input pin nodes."""
        if self.name == "BUF":
            return nodes["A"]
        if self.name == "NOT":
            return b.not_(nodes["A"])
        if self.name == "NAND":
            return b.not_(b.and_(nodes["A"], nodes["B"]))
        if self.name == "NOR":
            return b.not_(b.or_(nodes["A"], nodes["B"]))
        raise ValueError(f"cell {self.name} has no combinational body")

    def build_next(self, b, q: int, nodes: dict[str, int]) -> int:
        """Next-state expression for register cells."""
        nxt = nodes[self.data]
        if self.set_pin:
            forced0 = b.mux(nodes[self.reset_pin], b.const(0, 1), nxt)
            return b.mux(nodes[self.set_pin], b.const(1, 1), forced0)
        return nxt


@dataclass(frozen=True)
class CellLibrary:
    cells: dict[str, Cell] = field(default_factory=dict)

    def __contains__(self, name: str) -> bool:
        return name in self.cells

    def get(self, name: str) -> Cell | None:
        return self.cells.get(name)


def _lib(*cells: Cell) -> CellLibrary:
    return CellLibrary({c.name: c for c in cells})


DEFAULT_LIBRARY = _lib(
    Cell("BUF", ("A",), "Y"),
    Cell("NOT", ("A",), "Y"),
    Cell("NAND", ("A", "B"), "Y"),
    Cell("NOR", ("A", "B"), "Y"),
    Cell("DFF", ("C", "D"), "Q", kind="reg", clock="C", data="D"),
    Cell("DFFSR", ("C", "D", "S", "R"), "Q", kind="reg",
         clock="C", data="D", set_pin="S", reset_pin="R"),
)
