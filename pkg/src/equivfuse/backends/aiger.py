"""AIGER ASCII (`aag`) emission.

Header `aag M I L O A` with M = the highest variable index, then input
literal lines, the single output literal, AND lines `lhs rhs0 rhs1`, and a
symbol table (`i<n> <name>`, `o0 neq`).  No latches: miters are built from
unrolled, combinational logic.
"""

from __future__ import annotations

from equivfuse import errors
from equivfuse.backends.base import EmittedProblem, split_frame, symbol_entry
from equivfuse.core.aig import Aig


def _bit_split(name: str) -> tuple[str, int]:
    """AIG input name -> (miter port name, bit index)."""
    if name.endswith("]") and "[" in name:
        base, _, k = name[:-1].rpartition("[")
        return base, int(k)
    return name, 0


def emit_aiger(aig: Aig, suffixed: bool = True, n_frames: int = 1) -> EmittedProblem:
    if len(aig.outputs) != 1:
        raise errors.MultiOutput(len(aig.outputs))
    lines = [f"aag {aig.num_vars} {len(aig.inputs)} 0 1 {len(aig.ands)}"]
    symbols: dict[str, dict] = {}
    for name, lit in aig.inputs:
        lines.append(str(lit))
        port_name, bit = _bit_split(name)
        base, frame = split_frame(port_name, suffixed)
        symbols[str(lit)] = symbol_entry(base, frame, bit, 1)
    out_name, out_lit = aig.outputs[0]
    lines.append(str(out_lit))
    for lhs, a, b in aig.ands:
        lines.append(f"{lhs} {a} {b}")
    for n, (name, _) in enumerate(aig.inputs):
        lines.append(f"i{n} {name}")
    lines.append(f"o0 {out_name}")
    return EmittedProblem("aiger", "\n".join(lines) + "\n", symbols, ".aag",
                          n_frames=n_frames)
