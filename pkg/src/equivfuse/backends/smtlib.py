"""SMT-LIB2 (QF_BV) emission.

One `declare-const` per shared input, one `define-fun` per logic node in
topological order, and a single assertion that the miter bit is 1: unsat
means equivalent.  Symbols sanitize `@` to `_f` and brackets to `_`; the
symbol table carries the reverse mapping, names are never re-parsed.
"""

from __future__ import annotations

from equivfuse.backends.base import EmittedProblem, split_frame, symbol_entry
from equivfuse.miter import MiterModule

_OPS = {
    "add": "bvadd", "sub": "bvsub", "mul": "bvmul",
    "and": "bvand", "or": "bvor", "xor": "bvxor",
    "shl": "bvshl", "lshr": "bvlshr", "ashr": "bvashr",
}
_CMPS = {"eq": "=", "ult": "bvult", "slt": "bvslt", "ule": "bvule", "sle": "bvsle"}


def _sanitize(name: str) -> str:
    return name.replace("@", "_f").replace("[", "_").replace("]", "_")


def emit_smtlib(m: MiterModule) -> EmittedProblem:
    mod = m.module
    assert not mod.registers, "miters are combinational"
    lines = ["(set-logic QF_BV)"]
    symbols: dict[str, dict] = {}
    sym_of: dict[str, str] = {}
    for p in mod.in_ports():
        sym = _sanitize(p.name)
        while sym in symbols:
            sym += "_"
        base, frame = split_frame(p.name, m.suffixed)
        symbols[sym] = symbol_entry(base, frame, None, p.width)
        sym_of[p.name] = sym
        lines.append(f"(declare-const {sym} (_ BitVec {p.width}))")

    names: list[str] = [""] * mod.num_nodes
    for i, kind in enumerate(mod.kinds):
        w = mod.widths[i]
        if kind == "const":
            names[i] = f"(_ bv{mod.attrs[i]} {w})"
            continue
        if kind == "input":
            names[i] = sym_of[mod.ports[mod.attrs[i]].name]
            continue
        a = [names[x] for x in mod.args[i]]
        aw = [mod.widths[x] for x in mod.args[i]]
        if kind in _OPS:
            body = f"({_OPS[kind]} {a[0]} {a[1]})"
        elif kind in _CMPS:
            body = f"(ite ({_CMPS[kind]} {a[0]} {a[1]}) #b1 #b0)"
        elif kind == "not":
            body = f"(bvnot {a[0]})"
        elif kind == "mux":
            body = f"(ite (= {a[0]} #b1) {a[1]} {a[2]})"
        elif kind == "concat":
            body = f"(concat {a[0]} {a[1]})"
        elif kind == "extract":
            hi, lo = mod.attrs[i]
            body = f"((_ extract {hi} {lo}) {a[0]})"
        elif kind == "zext":
            body = f"((_ zero_extend {w - aw[0]}) {a[0]})"
        elif kind == "sext":
            body = f"((_ sign_extend {w - aw[0]}) {a[0]})"
        else:
            raise ValueError(f"unknown op kind {kind!r}")
        names[i] = f"n{i}"
        lines.append(f"(define-fun n{i} () (_ BitVec {w}) {body})")

    lines.append(f"(assert (= {names[mod.outputs['neq']]} #b1))")
    lines.append("(check-sat)")
    lines.append("(get-model)")
    return EmittedProblem("smtlib", "\n".join(lines) + "\n", symbols, ".smt2",
                          n_frames=m.n_frames)
