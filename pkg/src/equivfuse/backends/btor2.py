"""BTOR2 emission.

Combinational form: every node is a numbered line, sorts are deduplicated,
and the miter bit feeds a single `bad` property.  Sequential designs are
unrolled before miter construction, so no state/next lines are emitted.
The symbol table is keyed by input position (0-based declaration order),
which is what witness formats reference.
"""

from __future__ import annotations

from equivfuse.backends.base import EmittedProblem, split_frame, symbol_entry
from equivfuse.miter import MiterModule

_OPS = {
    "add": "add", "sub": "sub", "mul": "mul",
    "and": "and", "or": "or", "xor": "xor",
    "shl": "sll", "lshr": "srl", "ashr": "sra",
    "eq": "eq", "ult": "ult", "slt": "slt", "ule": "ulte", "sle": "slte",
}


def emit_btor2(m: MiterModule) -> EmittedProblem:
    mod = m.module
    assert not mod.registers, "miters are combinational"
    lines: list[str] = []
    next_id = 1
    sorts: dict[int, int] = {}

    def emit(text: str) -> int:
        nonlocal next_id
        lines.append(f"{next_id} {text}")
        next_id += 1
        return next_id - 1

    def sort(w: int) -> int:
        if w not in sorts:
            sorts[w] = emit(f"sort bitvec {w}")
        return sorts[w]

    symbols: dict[str, dict] = {}
    ids: list[int] = [0] * mod.num_nodes
    pos = 0
    for i, kind in enumerate(mod.kinds):
        w = mod.widths[i]
        if kind == "const":
            ids[i] = emit(f"constd {sort(w)} {mod.attrs[i]}")
        elif kind == "input":
            name = mod.ports[mod.attrs[i]].name
            ids[i] = emit(f"input {sort(w)} {name}")
            base, frame = split_frame(name, m.suffixed)
            symbols[str(pos)] = symbol_entry(base, frame, None, w)
            pos += 1
        else:
            a = [ids[x] for x in mod.args[i]]
            if kind in _OPS:
                ids[i] = emit(f"{_OPS[kind]} {sort(w)} {a[0]} {a[1]}")
            elif kind == "not":
                ids[i] = emit(f"not {sort(w)} {a[0]}")
            elif kind == "mux":
                ids[i] = emit(f"ite {sort(w)} {a[0]} {a[1]} {a[2]}")
            elif kind == "concat":
                ids[i] = emit(f"concat {sort(w)} {a[0]} {a[1]}")
            elif kind == "extract":
                hi, lo = mod.attrs[i]
                ids[i] = emit(f"slice {sort(w)} {a[0]} {hi} {lo}")
            elif kind == "zext":
                ids[i] = emit(f"uext {sort(w)} {a[0]} {w - mod.widths[mod.args[i][0]]}")
            elif kind == "sext":
                ids[i] = emit(f"sext {sort(w)} {a[0]} {w - mod.widths[mod.args[i][0]]}")
            else:
                raise ValueError(f"unknown op kind {kind!r}")

    emit(f"bad {ids[mod.outputs['neq']]}")
    return EmittedProblem("btor2", "\n".join(lines) + "\n", symbols, ".btor2",
                          n_frames=m.n_frames)
