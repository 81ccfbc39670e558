#!/usr/bin/env python3
"""Generate tests/fixtures/dot2_s4_netlist.v.

Hand-built gate-level implementation of the 2-element signed 4-bit dot
product with a 16-bit accumulator: NAND/NOT/NOR cells only, ripple-carry
adders, shift-and-add multipliers.  Ports match the packed lowering of the
tensor-graph version (element 0 in the low bits):

    module dot2_s4_net(input [7:0] a, input [7:0] b, output [15:0] out);

Each 4-bit element is sign-extended to 8 bits; the 8-bit low product is
exact there (|p| <= 64), then sign-extended to 16 and summed mod 2^16.

Before writing the file the netlist is validated exhaustively over all
2^16 input combinations using bit-parallel evaluation (one 65536-bit
integer per net), so the fixture checked into the tree is known-good
independently of any of the package's own machinery.
"""

import pathlib
import sys


class GateBuilder:
    def __init__(self):
        self.wires = []
        self.gates = []

    def wire(self):
        w = f"w{len(self.wires)}"
        self.wires.append(w)
        return w

    def gate(self, cell, **pins):
        y = self.wire()
        self.gates.append((cell, f"g{len(self.gates)}", {**pins, "Y": y}))
        return y

    def nand(self, a, b):
        return self.gate("NAND", A=a, B=b)

    def nor(self, a, b):
        return self.gate("NOR", A=a, B=b)

    def not_(self, a):
        return self.gate("NOT", A=a)

    def and_(self, a, b):
        return self.not_(self.nand(a, b))

    def xor(self, a, b):
        n1 = self.nand(a, b)
        return self.nand(self.nand(a, n1), self.nand(b, n1))

    def half_add(self, a, b):
        return self.xor(a, b), self.and_(a, b)

    def full_add(self, a, b, c):
        # Classic 9-gate NAND full adder.
        n1 = self.nand(a, b)
        axb = self.nand(self.nand(a, n1), self.nand(b, n1))
        n4 = self.nand(axb, c)
        s = self.nand(self.nand(axb, n4), self.nand(c, n4))
        return s, self.nand(n1, n4)

    def add_into(self, acc, addend, lo):
        """acc[lo:] += addend, carries past the end dropped."""
        carry = None
        for j, p in enumerate(addend):
            k = lo + j
            if k >= len(acc):
                break
            if carry is None:
                acc[k], carry = self.half_add(acc[k], p)
            else:
                acc[k], carry = self.full_add(acc[k], p, carry)
        k = lo + len(addend)
        while carry is not None and k < len(acc):
            acc[k], carry = self.half_add(acc[k], carry)
            k += 1

    def mul_low(self, xs, ys):
        """Low len(xs) bits of xs * ys (shift-and-add)."""
        n = len(xs)
        acc = [self.and_(x, ys[0]) for x in xs]
        for i in range(1, n):
            row = [self.and_(xs[j], ys[i]) for j in range(n - i)]
            self.add_into(acc, row, i)
        return acc


def build():
    g = GateBuilder()
    out = None
    for el in range(2):
        base = 4 * el
        sx_a = [f"a[{base + k}]" for k in range(4)] + [f"a[{base + 3}]"] * 4
        sx_b = [f"b[{base + k}]" for k in range(4)] + [f"b[{base + 3}]"] * 4
        prod = g.mul_low(sx_a, sx_b)
        prod16 = prod + [prod[-1]] * 8
        if out is None:
            out = prod16
        else:
            g.add_into(out, prod16, 0)
    return g, out


def render(g, out_bits):
    lines = [
        "// Generated by scripts/gen_dot_netlist.py; do not edit by hand.",
        "// 2-element signed 4-bit dot product, 16-bit result, element 0",
        "// in the low bits of each packed input.  Validated exhaustively",
        "// over all 2^16 inputs at generation time.",
        "module dot2_s4_net(input [7:0] a, input [7:0] b, output [15:0] out);",
    ]
    for i in range(0, len(g.wires), 20):
        lines.append("  wire " + ", ".join(g.wires[i:i + 20]) + ";")
    for cell, name, pins in g.gates:
        conns = ", ".join(f".{p}({s})" for p, s in pins.items())
        lines.append(f"  {cell} {name} ({conns});")
    for k, w in enumerate(out_bits):
        lines.append(f"  assign out[{k}] = {w};")
    lines.append("endmodule")
    return "\n".join(lines) + "\n"


def validate(g, out_bits):
    """Exhaustive check, one 65536-bit integer per net (bit i = value in
    the case where a = i & 0xff, b = i >> 8)."""
    total = 1 << 16
    full = (1 << total) - 1

    def pattern(k):
        half = 1 << k
        pat = ((1 << half) - 1) << half
        span = half * 2
        while span < total:
            pat |= pat << span
            span *= 2
        return pat

    vals = {f"a[{k}]": pattern(k) for k in range(8)}
    vals.update({f"b[{k}]": pattern(8 + k) for k in range(8)})
    for cell, _, pins in g.gates:
        a = vals[pins["A"]]
        if cell == "NAND":
            y = full & ~(a & vals[pins["B"]])
        elif cell == "NOR":
            y = full & ~(a | vals[pins["B"]])
        elif cell == "NOT":
            y = full & ~a
        else:
            y = a
        vals[pins["Y"]] = y

    def sx4(v):
        return v - 16 if v & 8 else v

    bad = 0
    for i in range(total):
        a, b = i & 0xFF, i >> 8
        want = (sx4(a & 15) * sx4(b & 15) + sx4(a >> 4) * sx4(b >> 4)) & 0xFFFF
        got = 0
        for k, w in enumerate(out_bits):
            got |= ((vals[w] >> i) & 1) << k
        if got != want:
            print(f"MISMATCH a={a} b={b}: got {got}, want {want}")
            bad += 1
            if bad > 5:
                return False
    return bad == 0


def main():
    g, out_bits = build()
    if not validate(g, out_bits):
        print("validation FAILED; fixture not written")
        return 1
    dest = pathlib.Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "dot2_s4_netlist.v"
    dest.write_text(render(g, out_bits))
    print(f"wrote {dest}: {len(g.gates)} gates, validated over 65536 cases")
    return 0


if __name__ == "__main__":
    sys.exit(main())
