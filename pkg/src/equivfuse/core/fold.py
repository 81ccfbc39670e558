"""Constant folding and dead-node elimination for core modules.

Rebuilds the module through a fresh :class:`Builder`, which re-applies the
local simplifications and hash-consing, then keeps only nodes reachable
from outputs and register next-state functions.
"""

from __future__ import annotations

from equivfuse.core.module import Builder, CoreModule


def const_fold(module: CoreModule) -> CoreModule:
    b = Builder(module.name)
    remap: list[int] = [0] * module.num_nodes
    out_port_widths = {p.name: p.width for p in module.out_ports()}
    reg_new_ids: dict[int, int] = {}

    for i, kind in enumerate(module.kinds):
        if kind == "const":
            remap[i] = b.const(module.attrs[i], module.widths[i])
        elif kind == "input":
            port = module.ports[module.attrs[i]]
            remap[i] = b.add_in_port(port.name, port.width)
        elif kind == "reg":
            r = module.registers[module.attrs[i]]
            nid = b.add_register(r.name, r.width, r.init)
            remap[i] = nid
            reg_new_ids[module.attrs[i]] = nid
        else:
            args = tuple(remap[a] for a in module.args[i])
            remap[i] = _rebuild(b, kind, args, module.attrs[i], module.widths[i])

    for idx, r in enumerate(module.registers):
        if idx not in reg_new_ids:
            # State element never read: keep it anyway, it still clocks.
            reg_new_ids[idx] = b.add_register(r.name, r.width, r.init)
        b.set_reg_next(reg_new_ids[idx], remap[r.next])

    for name, nid in module.outputs.items():
        b.add_out_port(name, out_port_widths[name], remap[nid])

    return _prune(b.finish())


def _rebuild(b: Builder, kind: str, args: tuple[int, ...], attr, width: int) -> int:
    if kind == "add":
        return b.add(*args)
    if kind == "sub":
        return b.sub(*args)
    if kind == "mul":
        return b.mul(*args)
    if kind == "and":
        return b.and_(*args)
    if kind == "or":
        return b.or_(*args)
    if kind == "xor":
        return b.xor(*args)
    if kind == "not":
        return b.not_(args[0])
    if kind in ("shl", "lshr", "ashr"):
        return b.shift(kind, *args)
    if kind in ("eq", "ult", "slt", "ule", "sle"):
        return b.compare(kind, *args)
    if kind == "mux":
        return b.mux(*args)
    if kind == "concat":
        return b.concat(*args)
    if kind == "extract":
        hi, lo = attr
        return b.extract(args[0], hi, lo)
    if kind == "zext":
        return b.zext(args[0], width)
    if kind == "sext":
        return b.sext(args[0], width)
    raise ValueError(f"unknown op kind {kind!r}")


def _prune(module: CoreModule) -> CoreModule:
    live = [False] * module.num_nodes
    stack = list(module.outputs.values()) + [r.next for r in module.registers]
    # Register current-state nodes stay live whenever the register itself is
    # reachable; conservatively keep all of them since register state is
    # externally observable through sequential unrolling.
    for i, kind in enumerate(module.kinds):
        if kind == "reg":
            stack.append(i)
    while stack:
        n = stack.pop()
        if live[n]:
            continue
        live[n] = True
        stack.extend(module.args[n])

    if all(live):
        return module

    from equivfuse.core.module import Register

    out = CoreModule(module.name)
    out.registers = [Register(r.name, r.width, r.init, r.next) for r in module.registers]
    remap = [-1] * module.num_nodes
    for i in range(module.num_nodes):
        if not live[i]:
            continue
        remap[i] = len(out.kinds)
        out.kinds.append(module.kinds[i])
        out.widths.append(module.widths[i])
        out.args.append(tuple(remap[a] for a in module.args[i]))
        out.attrs.append(module.attrs[i])
    # Input ports whose nodes died still exist as ports (the interface is
    # part of the module identity); out.ports keeps the original list.
    out.ports = list(module.ports)
    out.outputs = {name: remap[nid] for name, nid in module.outputs.items()}
    for r in out.registers:
        r.next = remap[r.next]
    return out
