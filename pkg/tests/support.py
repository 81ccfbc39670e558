"""Shared helpers for the test suite."""
from __future__ import annotations

from pathlib import Path

from equivfuse.core import (
    Builder, CoreModule, pack_elements, simulate_comb, unpack_elements,
)
from equivfuse.hir import HirFunction, check, parse_mini_c

FIXTURES = Path(__file__).parent / "fixtures"


def load_c(name: str) -> HirFunction:
    """Parse and validate a C fixture, returning its single function."""
    prog = parse_mini_c((FIXTURES / name).read_text(), path=name)
    check(prog)
    (fn,) = prog.functions.values()
    return fn


def fn_from(source: str) -> HirFunction:
    """Parse and validate an inline source snippet with one function."""
    prog = parse_mini_c(source)
    check(prog)
    (fn,) = prog.functions.values()
    return fn


def as_signed(value: int, width: int) -> int:
    return value - (1 << width) if (value >> (width - 1)) & 1 else value


def run_lowered(fn: HirFunction, module: CoreModule, inputs: dict) -> dict:
    """Drive a lowered module with interpreter-style inputs and return
    interpreter-style outputs (arrays as element lists)."""
    port_vals = {}
    for p in fn.in_params():
        ty = p.type
        v = inputs[p.name]
        if ty.is_array:
            port_vals[p.name] = pack_elements(list(v), ty.width)
        else:
            port_vals[p.name] = v & ((1 << ty.width) - 1)
    raw = simulate_comb(module, port_vals)
    out = {}
    for p in fn.out_params():
        ty = p.type
        if ty.is_array:
            out[p.name] = unpack_elements(raw[p.name], ty.length, ty.width)
        else:
            out[p.name] = raw[p.name]
    return out


_BIN_OPS = ("add", "sub", "mul", "and", "or", "xor")
_CMP_OPS = ("eq", "ult", "slt", "ule", "sle")
_SHIFT_OPS = ("shl", "lshr", "ashr")


def random_core_module(rng, *, name: str = "rnd", max_in_bits: int = 12,
                       max_regs: int = 3, max_ops: int = 25,
                       iface: tuple | None = None) -> CoreModule:
    """Random valid core module: a few input ports, optional registers,
    a pile of word-level ops, 1-3 outputs.  Every structural constraint
    (matching widths, 1-bit mux selects) is satisfied by resizing.
    ``iface`` pins the port list to (in_ports, out_widths) so two draws
    can share an interface."""
    b = Builder(name)
    pool: list[int] = []
    if iface is not None:
        for n, w in iface[0]:
            pool.append(b.add_in_port(n, w))
    else:
        bits_left = max_in_bits
        for k in range(rng.randint(1, 3)):
            if bits_left <= 0:
                break
            w = rng.randint(1, min(8, bits_left))
            bits_left -= w
            pool.append(b.add_in_port(f"x{k}", w))

    regs: list[int] = []
    for k in range(rng.randint(0, max_regs)):
        w = rng.randint(1, 6)
        r = b.add_register(f"r{k}", w, rng.randrange(1 << w))
        regs.append(r)
        pool.append(r)

    pool.append(b.const(rng.randrange(16), 4))

    def fit(node: int, w: int) -> int:
        if rng.random() < 0.5:
            return b.resize_signed(node, w)
        return b.resize_unsigned(node, w)

    for _ in range(rng.randint(3, max_ops)):
        roll = rng.random()
        a = rng.choice(pool)
        if roll < 0.45:
            w = b.width(a)
            op = rng.choice(_BIN_OPS)
            meth = getattr(b, op + "_" if op in ("and", "or") else op)
            node = meth(a, fit(rng.choice(pool), w))
        elif roll < 0.55:
            node = b.compare(rng.choice(_CMP_OPS), a,
                             fit(rng.choice(pool), b.width(a)))
        elif roll < 0.65:
            node = b.shift(rng.choice(_SHIFT_OPS), a,
                           fit(rng.choice(pool), b.width(a)))
        elif roll < 0.72:
            node = b.not_(a)
        elif roll < 0.80:
            sel = fit(rng.choice(pool), 1)
            node = b.mux(sel, a, fit(rng.choice(pool), b.width(a)))
        elif roll < 0.88:
            other = rng.choice(pool)
            if b.width(a) + b.width(other) > 16:
                node = b.not_(a)
            else:
                node = b.concat(a, other)
        elif roll < 0.94:
            w = b.width(a)
            hi = rng.randrange(w)
            lo = rng.randint(0, hi)
            node = b.extract(a, hi, lo)
        else:
            w = b.width(a)
            node = b.zext(a, w + rng.randint(1, 4)) if rng.random() < 0.5 \
                else b.sext(a, w + rng.randint(1, 4))
        pool.append(node)

    for r in regs:
        b.set_reg_next(r, fit(rng.choice(pool), b.width(r)))
    if iface is not None:
        for k, w in enumerate(iface[1]):
            b.add_out_port(f"y{k}", w, fit(rng.choice(pool), w))
    else:
        for k in range(rng.randint(1, 3)):
            src = rng.choice(pool)
            b.add_out_port(f"y{k}", b.width(src), src)
    return b.finish()


def random_stimuli(rng, module: CoreModule, n_frames: int) -> list[dict]:
    return [{p.name: rng.randrange(1 << p.width) for p in module.in_ports()}
            for _ in range(n_frames)]
