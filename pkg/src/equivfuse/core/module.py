"""Word-level SSA dataflow IR.

A :class:`CoreModule` is the common form every frontend lowers into: typed
ports, an SSA node list, and clocked registers. Node operands always precede
their users, so a single forward walk evaluates the module; the only cycles
run through registers.

Modules are built through :class:`Builder`, which hash-conses nodes and
applies local simplifications (constant evaluation, identities) on the fly.
Once built, modules are treated as immutable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from equivfuse import errors

# Word-level operator kinds, besides the leaf kinds "const", "input", "reg".
OP_KINDS = frozenset([
    "add", "sub", "mul", "and", "or", "xor", "not",
    "shl", "lshr", "ashr",
    "eq", "ult", "slt", "ule", "sle",
    "mux", "concat", "extract", "zext", "sext",
])

CMP_KINDS = frozenset(["eq", "ult", "slt", "ule", "sle"])


def mask(width: int) -> int:
    return (1 << width) - 1


def pack_elements(values: list[int], width: int) -> int:
    """Pack array elements into one word, element 0 at the LSBs."""
    out = 0
    for i, v in enumerate(values):
        out |= (v & mask(width)) << (i * width)
    return out


def unpack_elements(value: int, count: int, width: int) -> list[int]:
    """Split a packed word into ``count`` elements of ``width`` bits."""
    return [(value >> (i * width)) & mask(width) for i in range(count)]


def to_signed(value: int, width: int) -> int:
    """Reinterpret an unsigned word as two's complement."""
    if value >> (width - 1):
        return value - (1 << width)
    return value


@dataclass(frozen=True)
class Port:
    name: str
    width: int
    direction: str  # "in" | "out"


@dataclass
class Register:
    name: str
    width: int
    init: int
    next: int  # node id computing the next state


class CoreModule:
    """SSA word-level module. Construct via :class:`Builder`."""

    def __init__(self, name: str):
        self.name = name
        self.ports: list[Port] = []
        self.kinds: list[str] = []
        self.widths: list[int] = []
        self.args: list[tuple[int, ...]] = []
        self.attrs: list = []
        self.registers: list[Register] = []
        self.outputs: dict[str, int] = {}

    # -- queries ------------------------------------------------------------

    @property
    def num_nodes(self) -> int:
        return len(self.kinds)

    def in_ports(self) -> list[Port]:
        return [p for p in self.ports if p.direction == "in"]

    def out_ports(self) -> list[Port]:
        return [p for p in self.ports if p.direction == "out"]

    def port(self, name: str) -> Port:
        for p in self.ports:
            if p.name == name:
                return p
        raise KeyError(name)

    @property
    def is_combinational(self) -> bool:
        return not self.registers

    def total_in_bits(self) -> int:
        return sum(p.width for p in self.in_ports())

    def node_count(self, kind: str) -> int:
        return sum(1 for k in self.kinds if k == kind)

    # -- dumps ----------------------------------------------------------------

    def to_text(self) -> str:
        """Human-readable dump (debugging aid; format not stable)."""
        out = [f"module {self.name}"]
        for p in self.ports:
            out.append(f"  port {p.name} : {p.direction} {p.width}")
        for i, kind in enumerate(self.kinds):
            w = self.widths[i]
            if kind == "const":
                out.append(f"  n{i} = const {self.attrs[i]:#x} : {w}")
            elif kind == "input":
                out.append(f"  n{i} = input {self.ports[self.attrs[i]].name!r} : {w}")
            elif kind == "reg":
                out.append(f"  n{i} = reg {self.registers[self.attrs[i]].name!r} : {w}")
            else:
                ops = ", ".join(f"n{a}" for a in self.args[i])
                extra = ""
                if kind == "extract":
                    hi, lo = self.attrs[i]
                    extra = f" [{hi}:{lo}]"
                elif kind in ("zext", "sext"):
                    extra = f" to {self.attrs[i]}"
                out.append(f"  n{i} = {kind} {ops}{extra} : {w}")
        for r in self.registers:
            out.append(f"  reg {r.name!r} : {r.width} init={r.init} next=n{r.next}")
        for name, nid in self.outputs.items():
            out.append(f"  output {name!r} = n{nid}")
        return "\n".join(out) + "\n"

    # -- serialization (sidecar embedding, test plumbing) ---------------------

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "ports": [[p.name, p.width, p.direction] for p in self.ports],
            "kinds": self.kinds,
            "widths": self.widths,
            "args": [list(a) for a in self.args],
            "attrs": [list(a) if isinstance(a, tuple) else a for a in self.attrs],
            "registers": [[r.name, r.width, r.init, r.next] for r in self.registers],
            "outputs": self.outputs,
        }

    @classmethod
    def from_json(cls, data: dict) -> "CoreModule":
        m = cls(data["name"])
        m.ports = [Port(n, w, d) for n, w, d in data["ports"]]
        m.kinds = list(data["kinds"])
        m.widths = list(data["widths"])
        m.args = [tuple(a) for a in data["args"]]
        m.attrs = [tuple(a) if isinstance(a, list) else a for a in data["attrs"]]
        m.registers = [Register(n, w, i, nx) for n, w, i, nx in data["registers"]]
        m.outputs = dict(data["outputs"])
        return m

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def loads(cls, text: str) -> "CoreModule":
        return cls.from_json(json.loads(text))


class Builder:
    """Constructs a CoreModule with hash-consing and local folding.

    All node constructors return node ids. Width discipline is enforced
    eagerly; violations are internal bugs and raise ValueError rather than
    a user-facing error class.
    """

    def __init__(self, name: str):
        self.module = CoreModule(name)
        self._memo: dict[tuple, int] = {}

    # -- raw node insertion ---------------------------------------------------

    def _raw(self, kind: str, width: int, args: tuple[int, ...], attr) -> int:
        key = (kind, width, args, attr)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        m = self.module
        nid = len(m.kinds)
        m.kinds.append(kind)
        m.widths.append(width)
        m.args.append(args)
        m.attrs.append(attr)
        self._memo[key] = nid
        return nid

    def width(self, nid: int) -> int:
        return self.module.widths[nid]

    def const_value(self, nid: int):
        """Value if the node is a constant, else None."""
        if self.module.kinds[nid] == "const":
            return self.module.attrs[nid]
        return None

    # -- leaves ---------------------------------------------------------------

    def add_in_port(self, name: str, width: int) -> int:
        m = self.module
        m.ports.append(Port(name, width, "in"))
        return self._raw("input", width, (), len(m.ports) - 1)

    def add_out_port(self, name: str, width: int, node: int) -> None:
        m = self.module
        if self.width(node) != width:
            raise ValueError(f"output {name}: node width {self.width(node)} != port width {width}")
        m.ports.append(Port(name, width, "out"))
        m.outputs[name] = node

    def add_register(self, name: str, width: int, init: int) -> int:
        """Adds the register and returns its current-state node id.

        The next-state node is set later with :meth:`set_reg_next` (registers
        may feed their own next-state logic).
        """
        m = self.module
        m.registers.append(Register(name, width, init & mask(width), -1))
        return self._raw("reg", width, (), len(m.registers) - 1)

    def set_reg_next(self, reg_node: int, next_node: int) -> None:
        m = self.module
        if m.kinds[reg_node] != "reg":
            raise ValueError("not a register node")
        reg = m.registers[m.attrs[reg_node]]
        if self.width(next_node) != reg.width:
            raise ValueError(f"register {reg.name}: next width mismatch")
        reg.next = next_node

    def const(self, value: int, width: int) -> int:
        return self._raw("const", width, (), value & mask(width))

    # -- ops --------------------------------------------------------------------

    def _binary_same_width(self, kind: str, a: int, b: int) -> int:
        w = self.width(a)
        if self.width(b) != w:
            raise ValueError(f"{kind}: operand widths {w} vs {self.width(b)}")
        ca, cb = self.const_value(a), self.const_value(b)
        if ca is not None and cb is not None:
            from equivfuse.core.simulate import eval_op
            return self.const(eval_op(kind, w, (ca, cb), None, (w, w)), w)
        return self._fold_binary(kind, a, b, w)

    def _fold_binary(self, kind: str, a: int, b: int, w: int) -> int:
        ca, cb = self.const_value(a), self.const_value(b)
        full = mask(w)
        if kind == "add":
            if ca == 0:
                return b
            if cb == 0:
                return a
        elif kind == "sub":
            if cb == 0:
                return a
            if a == b:
                return self.const(0, w)
        elif kind == "mul":
            if ca == 0 or cb == 0:
                return self.const(0, w)
            if ca == 1:
                return b
            if cb == 1:
                return a
        elif kind == "and":
            if ca == 0 or cb == 0:
                return self.const(0, w)
            if ca == full:
                return b
            if cb == full:
                return a
            if a == b:
                return a
        elif kind == "or":
            if ca == full or cb == full:
                return self.const(full, w)
            if ca == 0:
                return b
            if cb == 0:
                return a
            if a == b:
                return a
        elif kind == "xor":
            if ca == 0:
                return b
            if cb == 0:
                return a
            if a == b:
                return self.const(0, w)
        # Commutative ops get a canonical operand order for better sharing.
        if kind in ("add", "mul", "and", "or", "xor") and a > b:
            a, b = b, a
        return self._raw(kind, w, (a, b), None)

    def add(self, a: int, b: int) -> int:
        return self._binary_same_width("add", a, b)

    def sub(self, a: int, b: int) -> int:
        return self._binary_same_width("sub", a, b)

    def mul(self, a: int, b: int) -> int:
        return self._binary_same_width("mul", a, b)

    def and_(self, a: int, b: int) -> int:
        return self._binary_same_width("and", a, b)

    def or_(self, a: int, b: int) -> int:
        return self._binary_same_width("or", a, b)

    def xor(self, a: int, b: int) -> int:
        return self._binary_same_width("xor", a, b)

    def not_(self, a: int) -> int:
        w = self.width(a)
        ca = self.const_value(a)
        if ca is not None:
            return self.const(~ca, w)
        m = self.module
        if m.kinds[a] == "not":
            return m.args[a][0]
        return self._raw("not", w, (a,), None)

    def shift(self, kind: str, a: int, b: int) -> int:
        """shl/lshr/ashr. Shift amount is the full value of ``b``; shifting by
        the operand width or more saturates (zero fill, or sign fill for ashr),
        matching the SMT-LIB/BTOR2 shift operators and a full barrel shifter."""
        w = self.width(a)
        if self.width(b) != w:
            raise ValueError(f"{kind}: operand widths {w} vs {self.width(b)}")
        ca, cb = self.const_value(a), self.const_value(b)
        if ca is not None and cb is not None:
            from equivfuse.core.simulate import eval_op
            return self.const(eval_op(kind, w, (ca, cb), None, (w, w)), w)
        if cb is not None:
            if cb == 0:
                return a
            if cb >= w:
                if kind == "ashr":
                    return self.sext(self.extract(a, w - 1, w - 1), w)
                return self.const(0, w)
        return self._raw(kind, w, (a, b), None)

    def shl(self, a: int, b: int) -> int:
        return self.shift("shl", a, b)

    def lshr(self, a: int, b: int) -> int:
        return self.shift("lshr", a, b)

    def ashr(self, a: int, b: int) -> int:
        return self.shift("ashr", a, b)

    def compare(self, kind: str, a: int, b: int) -> int:
        w = self.width(a)
        if self.width(b) != w:
            raise ValueError(f"{kind}: operand widths {w} vs {self.width(b)}")
        ca, cb = self.const_value(a), self.const_value(b)
        if ca is not None and cb is not None:
            from equivfuse.core.simulate import eval_op
            return self.const(eval_op(kind, 1, (ca, cb), None, (w, w)), 1)
        if a == b:
            return self.const(1 if kind in ("eq", "ule", "sle") else 0, 1)
        if kind == "eq" and w == 1:
            if cb is not None:
                return a if cb == 1 else self.not_(a)
            if ca is not None:
                return b if ca == 1 else self.not_(b)
        if kind in ("eq",) and a > b:
            a, b = b, a
        return self._raw(kind, 1, (a, b), None)

    def eq(self, a: int, b: int) -> int:
        return self.compare("eq", a, b)

    def ne(self, a: int, b: int) -> int:
        return self.not_(self.eq(a, b))

    def ult(self, a: int, b: int) -> int:
        return self.compare("ult", a, b)

    def slt(self, a: int, b: int) -> int:
        return self.compare("slt", a, b)

    def ule(self, a: int, b: int) -> int:
        return self.compare("ule", a, b)

    def sle(self, a: int, b: int) -> int:
        return self.compare("sle", a, b)

    def mux(self, sel: int, a: int, b: int) -> int:
        """``sel`` is 1-bit; result is ``a`` when sel=1, else ``b``."""
        if self.width(sel) != 1:
            raise ValueError("mux selector must be 1 bit")
        w = self.width(a)
        if self.width(b) != w:
            raise ValueError("mux arm widths differ")
        cs = self.const_value(sel)
        if cs is not None:
            return a if cs == 1 else b
        if a == b:
            return a
        if w == 1:
            ca, cb = self.const_value(a), self.const_value(b)
            if ca == 1 and cb == 0:
                return sel
            if ca == 0 and cb == 1:
                return self.not_(sel)
        return self._raw("mux", w, (sel, a, b), None)

    def concat(self, *parts: int) -> int:
        """First operand occupies the most significant bits."""
        if not parts:
            raise ValueError("empty concat")
        if len(parts) == 1:
            return parts[0]
        if len(parts) > 2:
            acc = parts[0]
            for p in parts[1:]:
                acc = self.concat(acc, p)
            return acc
        hi, lo = parts
        w = self.width(hi) + self.width(lo)
        ch, cl = self.const_value(hi), self.const_value(lo)
        if ch is not None and cl is not None:
            return self.const((ch << self.width(lo)) | cl, w)
        return self._raw("concat", w, (hi, lo), None)

    def extract(self, a: int, hi: int, lo: int) -> int:
        if hi < lo or lo < 0 or hi >= self.width(a):
            raise ValueError(f"extract [{hi}:{lo}] out of a {self.width(a)}-bit value")
        w = hi - lo + 1
        if w == self.width(a):
            return a
        ca = self.const_value(a)
        if ca is not None:
            return self.const(ca >> lo, w)
        m = self.module
        kind = m.kinds[a]
        if kind == "extract":
            src = m.args[a][0]
            _, src_lo = m.attrs[a]
            return self.extract(src, hi + src_lo, lo + src_lo)
        if kind == "concat":
            part_hi, part_lo = m.args[a]
            w_lo = self.width(part_lo)
            if hi < w_lo:
                return self.extract(part_lo, hi, lo)
            if lo >= w_lo:
                return self.extract(part_hi, hi - w_lo, lo - w_lo)
        if kind == "zext":
            src = m.args[a][0]
            sw = self.width(src)
            if hi < sw:
                return self.extract(src, hi, lo)
            if lo >= sw:
                return self.const(0, w)
        return self._raw("extract", w, (a,), (hi, lo))

    def zext(self, a: int, width: int) -> int:
        aw = self.width(a)
        if width < aw:
            raise ValueError("zext to narrower width")
        if width == aw:
            return a
        ca = self.const_value(a)
        if ca is not None:
            return self.const(ca, width)
        m = self.module
        if m.kinds[a] == "zext":
            return self.zext(m.args[a][0], width)
        return self._raw("zext", width, (a,), width)

    def sext(self, a: int, width: int) -> int:
        aw = self.width(a)
        if width < aw:
            raise ValueError("sext to narrower width")
        if width == aw:
            return a
        ca = self.const_value(a)
        if ca is not None:
            v = to_signed(ca, aw)
            return self.const(v, width)
        return self._raw("sext", width, (a,), width)

    def resize_unsigned(self, a: int, width: int) -> int:
        """zext or truncate to the given width."""
        aw = self.width(a)
        if width == aw:
            return a
        if width < aw:
            return self.extract(a, width - 1, 0)
        return self.zext(a, width)

    def resize_signed(self, a: int, width: int) -> int:
        """sext or truncate to the given width."""
        aw = self.width(a)
        if width == aw:
            return a
        if width < aw:
            return self.extract(a, width - 1, 0)
        return self.sext(a, width)

    # -- composite helpers ------------------------------------------------------

    def reduce_or(self, nodes: list[int]) -> int:
        """Balanced OR over 1-bit nodes; empty list folds to constant 0."""
        if not nodes:
            return self.const(0, 1)
        while len(nodes) > 1:
            nxt = [self.or_(nodes[i], nodes[i + 1]) for i in range(0, len(nodes) - 1, 2)]
            if len(nodes) % 2:
                nxt.append(nodes[-1])
            nodes = nxt
        return nodes[0]

    def mod_const(self, a: int, n: int) -> int:
        """``a mod n`` for a compile-time constant n >= 1.

        Powers of two reduce to a bit slice. Otherwise the remainder is
        accumulated bit-by-bit: fold each input bit's residue (2^i mod n)
        into a running value kept below n with one conditional subtract.
        """
        if n < 1:
            raise ValueError("mod by non-positive constant")
        if n == 1:
            return self.const(0, 1)
        if n & (n - 1) == 0:
            bits = n.bit_length() - 1
            return self.resize_unsigned(a, bits)
        aw = self.width(a)
        rw = n.bit_length() + 1  # room for acc + residue before the subtract
        acc = self.const(0, rw)
        n_c = self.const(n, rw)
        for i in range(aw):
            residue = pow(2, i, n)
            if residue == 0:
                continue
            bit = self.extract(a, i, i)
            bumped = self.add(acc, self.const(residue, rw))
            over = self.ule(n_c, bumped)
            reduced = self.mux(over, self.sub(bumped, n_c), bumped)
            acc = self.mux(bit, reduced, acc)
        return self.extract(acc, n.bit_length() - 1, 0) if n.bit_length() < rw else acc

    def select(self, index: int, elems: list[int]) -> int:
        """Balanced mux tree over ``elems`` keyed on ``index mod len(elems)``."""
        n = len(elems)
        if n == 0:
            raise ValueError("select over no elements")
        if n == 1:
            return elems[0]
        idx = self.mod_const(index, n)

        def rec(lo: int, hi: int) -> int:
            if hi - lo == 1:
                return elems[lo]
            mid = (lo + hi) // 2
            sel = self.ult(idx, self.const(mid, self.width(idx)))
            return self.mux(sel, rec(lo, mid), rec(mid, hi))

        return rec(0, n)

    def finish(self) -> CoreModule:
        for r in self.module.registers:
            if r.next < 0:
                raise ValueError(f"register {r.name!r} has no next-state node")
        return self.module
