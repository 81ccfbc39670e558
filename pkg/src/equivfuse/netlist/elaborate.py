"""Flatten a parsed netlist hierarchy into a core module.

Every net is exploded into bits; each bit gets exactly one driver (top-level
input, constant, assign alias, or cell output). Library cells become 1-bit
core ops, DFF/DFFSR become 1-bit registers with init 0, submodule instances
are inlined recursively with their port nets bound to the parent's bits.

Clocks: the model is cycle-based, so the single clock is implicit. Each
register's C pin must trace (through assigns) to one shared width-1 top
input, which is then dropped from the core ports, or be left unconnected.
A clock bit feeding ordinary logic is rejected rather than misread.

Combinational cycles are found by DFS over the non-register dataflow and
reported as a bit-level trace. Wires that are never driven and never read
are pruned with a warning; a wire that is read but never driven is an error.
"""

from __future__ import annotations

import warnings

from equivfuse import errors
from equivfuse.core import Builder, CoreModule
from equivfuse.netlist.cells import DEFAULT_LIBRARY, CellLibrary
from equivfuse.netlist.parser import (
    BitSel, Concat, ConstBits, NetlistModule, PartSel, Ref,
)

# a bit source is either a global bit id (int) or a constant ("c", 0/1)


class _Net:
    __slots__ = ("bits", "msb", "lsb")

    def __init__(self, bits, msb, lsb):
        self.bits = bits
        self.msb = msb
        self.lsb = lsb


class _Flattener:
    def __init__(self, modules: list[NetlistModule], lib: CellLibrary):
        self.by_name = {m.name: m for m in modules}
        self.lib = lib
        self.names: list[str] = []     # display name per bit id
        self.driver: dict[int, tuple] = {}
        self.consumed: set[int] = set()
        self.gates: list[tuple] = []   # (cell, path, {pin: src|None})
        self.wire_nets: list[tuple[str, list[int]]] = []
        self.top_inputs: list[tuple[str, int, list[int]]] = []
        self.top_outputs: list[tuple[str, int, list]] = []

    def new_bits(self, display: str, msb: int, lsb: int) -> list[int]:
        width = msb - lsb + 1
        base = len(self.names)
        for k in range(width):
            tag = f"{display}[{lsb + k}]" if width > 1 else display
            self.names.append(tag)
        return list(range(base, base + width))

    def drive(self, bit, src: tuple) -> None:
        if not isinstance(bit, int):
            raise errors.MultipleDrivers("constant bit")
        if bit in self.driver:
            raise errors.MultipleDrivers(self.names[bit])
        self.driver[bit] = src

    def consume(self, srcs) -> None:
        for s in srcs:
            if isinstance(s, int):
                self.consumed.add(s)

    # -- net expressions ----------------------------------------------------

    def eval_expr(self, e, nets: dict[str, _Net], path: str) -> list:
        """Net expression -> bit sources, lsb first."""
        if isinstance(e, ConstBits):
            return [("c", (e.value >> k) & 1) for k in range(e.width)]
        if isinstance(e, Concat):
            out = []
            for part in reversed(e.parts):
                out.extend(self.eval_expr(part, nets, path))
            return out
        net = nets.get(e.name)
        if net is None:
            raise errors.UseBeforeDecl(
                f"net {e.name!r} is not declared", line=e.line, col=e.col)
        if isinstance(e, Ref):
            return list(net.bits)
        if isinstance(e, BitSel):
            lo, hi = (e.index, e.index)
        else:
            lo, hi = (e.lsb, e.msb)
        if lo < net.lsb or hi > net.msb:
            raise errors.WidthMismatch(
                f"select {e.name}[{hi}:{lo}] outside declared range "
                f"[{net.msb}:{net.lsb}]", name=path + e.name)
        bits = net.bits[lo - net.lsb:hi - net.lsb + 1]
        return list(bits)

    # -- structure ---------------------------------------------------------

    def flatten(self, module: NetlistModule, path: str,
                bindings: dict[str, list], stack: tuple[str, ...]) -> None:
        if module.name in stack:
            raise errors.UnsupportedConstruct(
                f"recursive module hierarchy through {module.name!r}")
        stack = stack + (module.name,)

        nets: dict[str, _Net] = {}
        for p in module.ports:
            if p.name in bindings:
                bound = bindings[p.name]
                if len(bound) != p.width:
                    raise errors.WidthMismatch(
                        f"port {p.name!r} of {module.name!r} is {p.width} bits, "
                        f"connected to {len(bound)}",
                        name=path + p.name, spec_w=p.width, impl_w=len(bound))
                nets[p.name] = _Net(bound, p.msb, p.lsb)
            elif p.direction == "in" and path:
                raise errors.UnconnectedPin(
                    f"input port {p.name!r} of instance {path[:-1]!r} is unconnected")
            else:
                bits = self.new_bits(path + p.name, p.msb, p.lsb)
                nets[p.name] = _Net(bits, p.msb, p.lsb)
                if not path:
                    if p.direction == "in":
                        self.top_inputs.append((p.name, p.width, bits))
                        for k, bit in enumerate(bits):
                            self.driver[bit] = ("in", p.name, k)
                    else:
                        self.top_outputs.append((p.name, p.width, bits))
        for w in module.wires:
            if w.name not in nets:
                bits = self.new_bits(path + w.name, w.msb, w.lsb)
                nets[w.name] = _Net(bits, w.msb, w.lsb)
                self.wire_nets.append((path + w.name, bits))

        for a in module.assigns:
            lhs = self.eval_expr(a.lhs, nets, path)
            rhs = self.eval_expr(a.rhs, nets, path)
            if len(lhs) != len(rhs):
                raise errors.WidthMismatch(
                    f"assign width mismatch: {len(lhs)} vs {len(rhs)} bits",
                    spec_w=len(lhs), impl_w=len(rhs))
            self.consume(rhs)
            for tgt, src in zip(lhs, rhs):
                self.drive(tgt, ("alias", src))

        for inst in module.instances:
            cell = self.lib.get(inst.cell)
            if cell is not None:
                self.flatten_cell(cell, inst, nets, path)
                continue
            sub = self.by_name.get(inst.cell)
            if sub is None:
                raise errors.UnknownCell(inst.cell, path + inst.name)
            sub_bindings = {}
            for pin, conn in inst.pins.items():
                port = sub.port(pin)
                if port is None:
                    raise errors.UnconnectedPin(
                        f"module {sub.name!r} has no port {pin!r} "
                        f"(instance {path + inst.name!r})")
                if conn is None:
                    continue
                srcs = self.eval_expr(conn, nets, path)
                if port.direction == "in":
                    self.consume(srcs)
                elif any(not isinstance(s, int) for s in srcs):
                    raise errors.MultipleDrivers(
                        f"constant connected to output port {pin!r} "
                        f"of {path + inst.name!r}")
                sub_bindings[pin] = srcs
            self.flatten(sub, path + inst.name + ".", sub_bindings, stack)

    def flatten_cell(self, cell, inst, nets, path: str) -> None:
        pins: dict[str, object] = {}
        for pin, conn in inst.pins.items():
            if pin not in cell.pins:
                raise errors.UnconnectedPin(
                    f"cell {cell.name} has no pin {pin!r} "
                    f"(instance {path + inst.name!r})")
            if conn is None:
                continue
            srcs = self.eval_expr(conn, nets, path)
            if len(srcs) != 1:
                raise errors.WidthMismatch(
                    f"pin {pin!r} of {cell.name} expects 1 bit, got {len(srcs)}"
                    f" (instance {path + inst.name!r})",
                    name=pin, spec_w=1, impl_w=len(srcs))
            pins[pin] = srcs[0]
        for pin in cell.inputs:
            if pin not in pins and pin != cell.clock:
                raise errors.UnconnectedPin(
                    f"pin {pin!r} of {cell.name} instance "
                    f"{path + inst.name!r} is unconnected")
            if pin in pins and pin != cell.clock:
                self.consume([pins[pin]])
        gidx = len(self.gates)
        self.gates.append((cell, path + inst.name, pins))
        out = pins.get(cell.output)
        if out is not None:
            self.drive(out, ("gate", gidx))


def elaborate(
    modules: list[NetlistModule],
    top: str,
    lib: CellLibrary = DEFAULT_LIBRARY,
) -> CoreModule:
    flat = _Flattener(modules, lib)
    if top not in flat.by_name:
        raise errors.TopNotFound(top, sorted(flat.by_name))
    flat.flatten(flat.by_name[top], "", {}, ())
    return _Assembler(flat, top).run()


class _Assembler:
    def __init__(self, flat: _Flattener, top: str):
        self.f = flat
        self.b = Builder(top)
        self.memo: dict[int, int] = {}
        self.stack: list[int] = []
        self.reg_nodes: dict[int, int] = {}  # gate index -> reg node

    def run(self) -> CoreModule:
        f, b = self.f, self.b
        clock_port = self.find_clock()

        in_bit_nodes: dict[int, int] = {}
        for name, width, bits in f.top_inputs:
            if name == clock_port:
                continue
            port = b.add_in_port(name, width)
            for k, bit in enumerate(bits):
                in_bit_nodes[bit] = port if width == 1 else b.extract(port, k, k)
        self.in_bit_nodes = in_bit_nodes

        regs = [(gi, cell, path, pins)
                for gi, (cell, path, pins) in enumerate(f.gates)
                if cell.kind == "reg"]
        for gi, cell, path, pins in regs:
            self.reg_nodes[gi] = b.add_register(path, 1, 0)

        for bit in sorted(f.driver):
            if f.driver[bit][0] == "in" and bit not in in_bit_nodes:
                continue  # the clock bit never becomes a data node
            self.bit_node(bit)

        for gi, cell, path, pins in regs:
            vals = {}
            for pin in cell.inputs:
                if pin == cell.clock:
                    continue
                if pin not in pins:
                    raise errors.UnconnectedPin(
                        f"pin {pin!r} of {cell.name} instance {path!r} "
                        "is unconnected")
                vals[pin] = self.bit_node(pins[pin])
            b.set_reg_next(self.reg_nodes[gi],
                           cell.build_next(b, self.reg_nodes[gi], vals))

        for name, width, bits in f.top_outputs:
            nodes = [self.bit_node(bit) for bit in bits]
            out = nodes[0] if width == 1 else b.concat(*reversed(nodes))
            b.add_out_port(name, width, out)

        for net_name, bits in f.wire_nets:
            if all(bit not in f.driver and bit not in f.consumed for bit in bits):
                warnings.warn(f"wire {net_name!r} drives nothing; pruned",
                              stacklevel=3)
        return b.finish()

    def find_clock(self) -> str | None:
        f = self.f
        roots = set()
        for cell, path, pins in f.gates:
            if cell.kind != "reg" or cell.clock not in pins:
                continue
            src = self.resolve(pins[cell.clock])
            drv = f.driver.get(src) if isinstance(src, int) else None
            if drv is None or drv[0] != "in":
                raise errors.UnsupportedConstruct(
                    f"register {path!r}: clock must come from a top-level input")
            roots.add(src)
        if not roots:
            return None
        if len(roots) > 1:
            raise errors.UnsupportedConstruct("multiple clock domains")
        (root,) = roots
        port_name = f.driver[root][1]
        port = next(p for p in f.top_inputs if p[0] == port_name)
        if port[1] != 1:
            raise errors.UnsupportedConstruct(
                f"clock input {port_name!r} must be 1 bit wide")
        if root in f.consumed:
            raise errors.UnsupportedConstruct(
                f"clock input {port_name!r} also feeds ordinary logic")
        return port_name

    def resolve(self, src):
        while isinstance(src, int):
            drv = self.f.driver.get(src)
            if drv is None or drv[0] != "alias":
                return src
            src = drv[1]
        return src

    def bit_node(self, src) -> int:
        b = self.b
        if not isinstance(src, int):
            return b.const(src[1], 1)
        if src in self.memo:
            return self.memo[src]
        if src in self.stack:
            names = self.f.names
            cycle = [names[x] for x in self.stack[self.stack.index(src):]]
            raise errors.CombinationalLoop(cycle + [names[src]])
        drv = self.f.driver.get(src)
        if drv is None:
            raise errors.UnconnectedPin(
                f"net {self.f.names[src]!r} has no driver")
        self.stack.append(src)
        try:
            if drv[0] == "in":
                node = self.in_bit_nodes[src]
            elif drv[0] == "alias":
                node = self.bit_node(drv[1])
            else:
                gi = drv[1]
                cell, path, pins = self.f.gates[gi]
                if cell.kind == "reg":
                    node = self.reg_nodes[gi]
                else:
                    ins = {p: self.bit_node(pins[p]) for p in cell.inputs}
                    node = cell.build(b, ins)
        finally:
            self.stack.pop()
        self.memo[src] = node
        return node
