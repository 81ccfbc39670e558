"""Linear instruction tape for combinational module evaluation.

``compile_tape`` flattens a combinational :class:`CoreModule` into a
fixed-stride int32 instruction stream plus uint64 side arrays, the form both
kernel backends execute. Every node gets one value slot; instructions sit in
node order, so a single left-to-right pass evaluates the module.

The tape is limited to node widths of at most 32 bits so that every
intermediate (including products) fits in an unsigned 64-bit word. Wider
modules raise :class:`TapeOverflow`; callers fall back to the big-int
evaluator in that case.
"""

from __future__ import annotations

from array import array
from dataclasses import dataclass

from equivfuse import errors
from equivfuse.core.module import CoreModule

STRIDE = 6
MAX_WIDTH = 32

(OP_CONST, OP_INPUT, OP_ADD, OP_SUB, OP_MUL, OP_AND, OP_OR, OP_XOR, OP_NOT,
 OP_SHL, OP_LSHR, OP_ASHR, OP_EQ, OP_ULT, OP_SLT, OP_ULE, OP_SLE, OP_MUX,
 OP_CONCAT, OP_EXTRACT, OP_ZEXT, OP_SEXT) = range(22)

_SIMPLE = {
    "add": OP_ADD, "sub": OP_SUB, "mul": OP_MUL, "and": OP_AND, "or": OP_OR,
    "xor": OP_XOR, "eq": OP_EQ, "ult": OP_ULT, "ule": OP_ULE,
}


class TapeOverflow(Exception):
    """Module shape the fixed-width kernels cannot represent."""


@dataclass
class Tape:
    code: array        # int32, stride 6: op, dst, a, b, c, imm
    consts: array      # uint64 literal pool
    masks: array       # uint64 width mask per slot
    n_slots: int
    n_bits: int        # total packed input width
    in_layout: list    # (port, offset, width), LSB first in port order
    out_slots: dict    # output name -> slot

    @property
    def n_instr(self) -> int:
        return len(self.code) // STRIDE


def compile_tape(module: CoreModule) -> Tape:
    if module.registers:
        raise errors.HasState(module.name)
    for w in module.widths:
        if w > MAX_WIDTH:
            raise TapeOverflow(f"node width {w} exceeds kernel limit {MAX_WIDTH}")

    offsets = {}
    off = 0
    layout = []
    for p in module.in_ports():
        offsets[p.name] = off
        layout.append((p.name, off, p.width))
        off += p.width

    code = array("i")
    consts = array("Q")
    masks = array("Q", (0,) * module.num_nodes)

    def emit(op, dst, a=0, b=0, c=0, imm=0):
        code.extend((op, dst, a, b, c, imm))

    for i, kind in enumerate(module.kinds):
        masks[i] = (1 << module.widths[i]) - 1
        args = module.args[i]
        if kind == "const":
            emit(OP_CONST, i, imm=len(consts))
            consts.append(module.attrs[i])
        elif kind == "input":
            port = module.ports[module.attrs[i]]
            emit(OP_INPUT, i, a=offsets[port.name])
        elif kind in _SIMPLE:
            emit(_SIMPLE[kind], i, args[0], args[1])
        elif kind == "not":
            emit(OP_NOT, i, args[0])
        elif kind in ("shl", "lshr", "ashr", "slt", "sle"):
            op = {"shl": OP_SHL, "lshr": OP_LSHR, "ashr": OP_ASHR,
                  "slt": OP_SLT, "sle": OP_SLE}[kind]
            emit(op, i, args[0], args[1], imm=module.widths[args[0]])
        elif kind == "mux":
            emit(OP_MUX, i, args[0], args[1], args[2])
        elif kind == "concat":
            emit(OP_CONCAT, i, args[0], args[1], imm=module.widths[args[1]])
        elif kind == "extract":
            _, lo = module.attrs[i]
            emit(OP_EXTRACT, i, args[0], imm=lo)
        elif kind == "zext":
            emit(OP_ZEXT, i, args[0])
        elif kind == "sext":
            emit(OP_SEXT, i, args[0], imm=module.widths[args[0]])
        else:
            raise ValueError(f"unknown node kind {kind!r}")

    return Tape(
        code=code, consts=consts, masks=masks, n_slots=module.num_nodes,
        n_bits=off, in_layout=layout, out_slots=dict(module.outputs),
    )
