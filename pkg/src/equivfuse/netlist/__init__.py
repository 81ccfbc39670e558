from equivfuse.netlist.cells import Cell, CellLibrary, DEFAULT_LIBRARY
from equivfuse.netlist.elaborate import elaborate
from equivfuse.netlist.parser import (
    AssignStmt, BitSel, Concat, ConstBits, Instance, NetlistModule, PartSel,
    PortDecl, Ref, WireDecl, parse_structural_verilog,
)

__all__ = [
    "Cell", "CellLibrary", "DEFAULT_LIBRARY",
    "NetlistModule", "PortDecl", "WireDecl", "Instance", "AssignStmt",
    "Ref", "BitSel", "PartSel", "ConstBits", "Concat",
    "parse_structural_verilog", "elaborate",
]
