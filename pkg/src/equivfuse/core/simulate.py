"""Reference evaluator for core modules.

Words are plain Python ints kept masked to their width (unsigned view).
Signed operators reinterpret through two's complement. This evaluator is
deliberately simple; it is the semantic ground truth the bit-level paths
are tested against.
"""

from __future__ import annotations

from equivfuse.core.module import CoreModule, mask, to_signed


def eval_op(kind: str, width: int, vals: tuple[int, ...], attr, arg_widths: tuple[int, ...]) -> int:
    """Evaluate one operator on already-masked operand values."""
    m = mask(width)
    if kind == "add":
        return (vals[0] + vals[1]) & m
    if kind == "sub":
        return (vals[0] - vals[1]) & m
    if kind == "mul":
        return (vals[0] * vals[1]) & m
    if kind == "and":
        return vals[0] & vals[1]
    if kind == "or":
        return vals[0] | vals[1]
    if kind == "xor":
        return vals[0] ^ vals[1]
    if kind == "not":
        return ~vals[0] & m
    if kind == "shl":
        w = arg_widths[0]
        return (vals[0] << vals[1]) & m if vals[1] < w else 0
    if kind == "lshr":
        w = arg_widths[0]
        return vals[0] >> vals[1] if vals[1] < w else 0
    if kind == "ashr":
        w = arg_widths[0]
        s = to_signed(vals[0], w)
        return (s >> min(vals[1], w - 1)) & m
    if kind == "eq":
        return int(vals[0] == vals[1])
    if kind == "ult":
        return int(vals[0] < vals[1])
    if kind == "ule":
        return int(vals[0] <= vals[1])
    if kind == "slt":
        w = arg_widths[0]
        return int(to_signed(vals[0], w) < to_signed(vals[1], w))
    if kind == "sle":
        w = arg_widths[0]
        return int(to_signed(vals[0], w) <= to_signed(vals[1], w))
    if kind == "mux":
        return vals[1] if vals[0] else vals[2]
    if kind == "concat":
        return (vals[0] << arg_widths[1]) | vals[1]
    if kind == "extract":
        hi, lo = attr
        return (vals[0] >> lo) & m
    if kind == "zext":
        return vals[0]
    if kind == "sext":
        return to_signed(vals[0], arg_widths[0]) & m
    raise ValueError(f"unknown op kind {kind!r}")


def _eval_nodes(module: CoreModule, in_vals: dict[str, int], reg_vals: list[int]) -> list[int]:
    vals: list[int] = [0] * module.num_nodes
    for i, kind in enumerate(module.kinds):
        if kind == "const":
            vals[i] = module.attrs[i]
        elif kind == "input":
            port = module.ports[module.attrs[i]]
            if port.name not in in_vals:
                raise KeyError(f"missing value for input port {port.name!r}")
            vals[i] = in_vals[port.name] & mask(port.width)
        elif kind == "reg":
            vals[i] = reg_vals[module.attrs[i]]
        else:
            args = module.args[i]
            operands = tuple(vals[a] for a in args)
            widths = tuple(module.widths[a] for a in args)
            vals[i] = eval_op(kind, module.widths[i], operands, module.attrs[i], widths)
    return vals


def simulate(module: CoreModule, stimuli: list[dict[str, int]]) -> list[dict[str, int]]:
    """Cycle-accurate simulation. Registers start at their init values; each
    frame's outputs are sampled before the clock edge that latches next-state.
    Returns one output dict per input frame."""
    reg_vals = [r.init for r in module.registers]
    trace: list[dict[str, int]] = []
    for frame in stimuli:
        vals = _eval_nodes(module, frame, reg_vals)
        trace.append({name: vals[nid] for name, nid in module.outputs.items()})
        reg_vals = [vals[r.next] for r in module.registers]
    return trace


def simulate_comb(module: CoreModule, in_vals: dict[str, int]) -> dict[str, int]:
    """Single-frame convenience wrapper (registers sit at init values)."""
    return simulate(module, [in_vals])[0]
