"""Compiled evaluation of combinational modules.

Generates one Python function per module with ``exec`` and caches nothing:
the function takes all input ports packed into a single integer (ports in
declaration order, least significant first) and returns a tuple of output
values.  Exhaustive enumeration calls it millions of times, so every node
becomes one local assignment and constants are inlined as literals.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from equivfuse import errors
from equivfuse.core.module import CoreModule, mask


@dataclass(frozen=True)
class FlatEval:
    fn: Callable[[int], tuple[int, ...]]
    in_layout: list[tuple[str, int, int]]
    out_names: list[str]
    total_bits: int
    source: str

    def pack(self, vals: dict[str, int]) -> int:
        v = 0
        for name, off, width in self.in_layout:
            v |= (vals[name] & mask(width)) << off
        return v

    def unpack(self, v: int) -> dict[str, int]:
        return {name: (v >> off) & mask(width)
                for name, off, width in self.in_layout}

    def run(self, vals: dict[str, int]) -> dict[str, int]:
        return dict(zip(self.out_names, self.fn(self.pack(vals))))


def _expr(module: CoreModule, i: int, ref) -> str:
    kind = module.kinds[i]
    w = module.widths[i]
    m = mask(w)
    args = module.args[i]
    aw = [module.widths[a] for a in args]
    a = ref(args[0]) if args else ""
    b = ref(args[1]) if len(args) > 1 else ""
    if kind == "add":
        return f"({a} + {b}) & {m}"
    if kind == "sub":
        return f"({a} - {b}) & {m}"
    if kind == "mul":
        return f"({a} * {b}) & {m}"
    if kind == "and":
        return f"{a} & {b}"
    if kind == "or":
        return f"{a} | {b}"
    if kind == "xor":
        return f"{a} ^ {b}"
    if kind == "not":
        return f"{a} ^ {m}"
    if kind == "shl":
        return f"(({a} << {b}) & {m}) if {b} < {aw[0]} else 0"
    if kind == "lshr":
        return f"({a} >> {b}) if {b} < {aw[0]} else 0"
    if kind == "ashr":
        sa = f"({a} - {1 << aw[0]} if {a} >> {aw[0] - 1} else {a})"
        sh = f"({b} if {b} < {aw[0] - 1} else {aw[0] - 1})"
        return f"({sa} >> {sh}) & {m}"
    if kind == "eq":
        return f"1 if {a} == {b} else 0"
    if kind == "ult":
        return f"1 if {a} < {b} else 0"
    if kind == "ule":
        return f"1 if {a} <= {b} else 0"
    if kind in ("slt", "sle"):
        sa = f"({a} - {1 << aw[0]} if {a} >> {aw[0] - 1} else {a})"
        sb = f"({b} - {1 << aw[1]} if {b} >> {aw[1] - 1} else {b})"
        op = "<" if kind == "slt" else "<="
        return f"1 if {sa} {op} {sb} else 0"
    if kind == "mux":
        return f"{b} if {a} else {ref(args[2])}"
    if kind == "concat":
        return f"({a} << {aw[1]}) | {b}"
    if kind == "extract":
        hi, lo = module.attrs[i]
        return f"({a} >> {lo}) & {m}"
    if kind == "zext":
        return a
    if kind == "sext":
        high = m & ~mask(aw[0])
        return f"({a} | {high}) if {a} >> {aw[0] - 1} else {a}"
    raise ValueError(f"unknown op kind {kind!r}")


def compile_flat(module: CoreModule) -> FlatEval:
    if module.registers:
        raise errors.HasState(
            f"cannot compile {module.name!r} for enumeration: it has registers")

    offsets: dict[str, int] = {}
    layout: list[tuple[str, int, int]] = []
    total = 0
    for p in module.in_ports():
        offsets[p.name] = total
        layout.append((p.name, total, p.width))
        total += p.width

    names: list[str] = [""] * module.num_nodes

    def ref(n: int) -> str:
        return names[n]

    lines = ["def _flat_eval(v):"]
    for i, kind in enumerate(module.kinds):
        if kind == "const":
            names[i] = str(module.attrs[i])
        elif kind == "input":
            p = module.ports[module.attrs[i]]
            names[i] = f"n{i}"
            lines.append(f"    n{i} = (v >> {offsets[p.name]}) & {mask(p.width)}")
        else:
            names[i] = f"n{i}"
            lines.append(f"    n{i} = {_expr(module, i, ref)}")
    out_names = list(module.outputs)
    body = ", ".join(names[module.outputs[n]] for n in out_names)
    lines.append(f"    return ({body},)" if out_names else "    return ()")
    source = "\n".join(lines)
    ns: dict = {}
    exec(compile(source, f"<flat:{module.name}>", "exec"), ns)
    return FlatEval(ns["_flat_eval"], layout, out_names, total, source)
