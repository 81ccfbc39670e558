"""Time-frame expansion: sequential module -> combinational module.

Each port of the original module appears once per frame under the name
``<port>@<frame>``.  Registers carry values across frames: frame 0 reads a
register's initial value as a constant, frame t > 0 reads whatever the
frame t-1 copy of its next-state function produced.  Outputs are sampled
every frame, before the clock edge, matching :func:`simulate`.

Rebuilding through a fresh :class:`Builder` re-applies the local folds, so
unrolling a module whose state evolution is input-independent (a counter,
say) collapses each frame's outputs to constants.
"""

from __future__ import annotations

from equivfuse.core.fold import _rebuild
from equivfuse.core.module import Builder, CoreModule


def unroll_sequential(module: CoreModule, k: int) -> CoreModule:
    if k < 1:
        raise ValueError(f"unroll depth must be >= 1, got {k}")
    b = Builder(f"{module.name}_u{k}")
    out_widths = {p.name: p.width for p in module.out_ports()}
    state = {i: b.const(r.init, r.width) for i, r in enumerate(module.registers)}

    for t in range(k):
        remap: list[int] = [0] * module.num_nodes
        for i, kind in enumerate(module.kinds):
            if kind == "const":
                remap[i] = b.const(module.attrs[i], module.widths[i])
            elif kind == "input":
                port = module.ports[module.attrs[i]]
                remap[i] = b.add_in_port(f"{port.name}@{t}", port.width)
            elif kind == "reg":
                remap[i] = state[module.attrs[i]]
            else:
                args = tuple(remap[a] for a in module.args[i])
                remap[i] = _rebuild(b, kind, args, module.attrs[i], module.widths[i])
        for name, nid in module.outputs.items():
            b.add_out_port(f"{name}@{t}", out_widths[name], remap[nid])
        state = {i: remap[r.next] for i, r in enumerate(module.registers)}

    return b.finish()
