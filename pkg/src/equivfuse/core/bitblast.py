"""Word-level core modules -> and-inverter graphs.

Each node becomes a list of AIG literals, least significant bit first.
Adders are ripple-carry, multipliers shift-and-add, comparisons ride the
subtractor's carry chain, and shifts are log-depth barrel muxes with the
same saturation behaviour as the word-level evaluator: shifting a w-bit
word by w or more gives 0 (or all sign bits for arithmetic shifts).
"""

from __future__ import annotations

from dataclasses import dataclass

from equivfuse import errors
from equivfuse.core.aig import FALSE, TRUE, Aig
from equivfuse.core.module import CoreModule


@dataclass
class Blasted:
    aig: Aig
    in_bits: dict[str, list[int]]
    out_bits: dict[str, list[int]]


def bitblast(module: CoreModule) -> Blasted:
    if module.registers:
        raise errors.HasState(
            f"cannot bit-blast {module.name!r}: it has registers; unroll first")
    g = Aig(module.name)
    in_bits: dict[str, list[int]] = {}
    for p in module.in_ports():
        if p.width == 1:
            in_bits[p.name] = [g.add_input(p.name)]
        else:
            in_bits[p.name] = [g.add_input(f"{p.name}[{k}]") for k in range(p.width)]

    bits: list[list[int]] = [[] for _ in range(module.num_nodes)]
    for i, kind in enumerate(module.kinds):
        w = module.widths[i]
        if kind == "const":
            v = module.attrs[i]
            bits[i] = [TRUE if (v >> k) & 1 else FALSE for k in range(w)]
        elif kind == "input":
            bits[i] = in_bits[module.ports[module.attrs[i]].name]
        else:
            args = [bits[a] for a in module.args[i]]
            bits[i] = _blast_op(g, kind, args, module.attrs[i], w)

    out_bits = {name: bits[nid] for name, nid in module.outputs.items()}
    for name, nodes in out_bits.items():
        if len(nodes) == 1:
            g.add_output(name, nodes[0])
        else:
            for k, lit in enumerate(nodes):
                g.add_output(f"{name}[{k}]", lit)
    return Blasted(g, in_bits, out_bits)


def _full_add(g: Aig, a: int, b: int, c: int) -> tuple[int, int]:
    axb = g.xor_(a, b)
    return g.xor_(axb, c), g.or_(g.and_(a, b), g.and_(axb, c))


def _ripple(g: Aig, xs: list[int], ys: list[int], carry: int) -> tuple[list[int], int]:
    out = []
    for a, b in zip(xs, ys):
        s, carry = _full_add(g, a, b, carry)
        out.append(s)
    return out, carry


def _add_into(g: Aig, acc: list[int], addend: list[int], lo: int) -> None:
    carry = FALSE
    for j, p in enumerate(addend):
        k = lo + j
        if k >= len(acc):
            return
        acc[k], carry = _full_add(g, acc[k], p, carry)
    for k in range(lo + len(addend), len(acc)):
        acc[k], carry = _full_add(g, acc[k], carry, FALSE)


def _ult(g: Aig, xs: list[int], ys: list[int]) -> int:
    # x < y unsigned iff x - y borrows, i.e. x + ~y + 1 has no carry out.
    _, carry = _ripple(g, xs, [y ^ 1 for y in ys], TRUE)
    return carry ^ 1

def _slt(g: Aig, xs: list[int], ys: list[int]) -> int:
    # Signed compare is unsigned compare with the sign bits flipped.
    return _ult(g, xs[:-1] + [xs[-1] ^ 1], ys[:-1] + [ys[-1] ^ 1])


def _shift(g: Aig, kind: str, xs: list[int], amt: list[int]) -> list[int]:
    w = len(xs)
    fill = xs[-1] if kind == "ashr" else FALSE
    stages = (w - 1).bit_length()
    cur = list(xs)
    for i in range(min(stages, len(amt))):
        n = 1 << i
        if kind == "shl":
            shifted = [FALSE] * n + cur[: w - n]
        else:
            shifted = cur[n:] + [fill] * n
        cur = [g.mux(amt[i], s, c) for s, c in zip(shifted, cur)]
    high = FALSE
    for a in amt[stages:]:
        high = g.or_(high, a)
    return [g.mux(high, fill, c) for c in cur]


def _blast_op(g: Aig, kind: str, args: list[list[int]], attr, w: int) -> list[int]:
    if kind == "add":
        return _ripple(g, args[0], args[1], FALSE)[0]
    if kind == "sub":
        return _ripple(g, args[0], [b ^ 1 for b in args[1]], TRUE)[0]
    if kind == "mul":
        xs, ys = args
        acc = [g.and_(x, ys[0]) for x in xs]
        for i in range(1, w):
            row = [g.and_(xs[j], ys[i]) for j in range(w - i)]
            _add_into(g, acc, row, i)
        return acc
    if kind == "and":
        return [g.and_(a, b) for a, b in zip(*args)]
    if kind == "or":
        return [g.or_(a, b) for a, b in zip(*args)]
    if kind == "xor":
        return [g.xor_(a, b) for a, b in zip(*args)]
    if kind == "not":
        return [a ^ 1 for a in args[0]]
    if kind in ("shl", "lshr", "ashr"):
        return _shift(g, kind, args[0], args[1])
    if kind == "eq":
        acc = TRUE
        for a, b in zip(*args):
            acc = g.and_(acc, g.xor_(a, b) ^ 1)
        return [acc]
    if kind == "ult":
        return [_ult(g, args[0], args[1])]
    if kind == "ule":
        return [_ult(g, args[1], args[0]) ^ 1]
    if kind == "slt":
        return [_slt(g, args[0], args[1])]
    if kind == "sle":
        return [_slt(g, args[1], args[0]) ^ 1]
    if kind == "mux":
        sel = args[0][0]
        return [g.mux(sel, a, b) for a, b in zip(args[1], args[2])]
    if kind == "concat":
        return args[1] + args[0]
    if kind == "extract":
        hi, lo = attr
        return args[0][lo:hi + 1]
    if kind == "zext":
        return args[0] + [FALSE] * (w - len(args[0]))
    if kind == "sext":
        return args[0] + [args[0][-1]] * (w - len(args[0]))
    raise ValueError(f"unknown op kind {kind!r}")
