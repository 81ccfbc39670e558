"""Structural Verilog parsing and elaboration to the core IR."""

import random

import pytest

from equivfuse import errors
from equivfuse.core import simulate, simulate_comb
from equivfuse.netlist import (
    BitSel, Concat, Ref, elaborate, parse_structural_verilog,
)

from support import FIXTURES


def parse_one(text):
    mods = parse_structural_verilog([text])
    assert len(mods) == 1
    return mods[0]


def build(text, top=None, extra=()):
    mods = parse_structural_verilog([text, *extra])
    return elaborate(mods, top or mods[0].name)


def load_v(name):
    return (FIXTURES / name).read_text()


# --- parsing -------------------------------------------------------------------


def test_identity_module():
    m = parse_one("module id(input a, output y); assign y = a; endmodule")
    assert m.name == "id"
    assert [(p.name, p.direction, p.width) for p in m.ports] == [
        ("a", "in", 1), ("y", "out", 1)]
    assert len(m.assigns) == 1
    assert m.assigns[0].lhs == Ref("y", 1, 38)
    assert m.assigns[0].rhs == Ref("a", 1, 42)


def test_classic_header_style():
    m = parse_one("""
        module dot2_comb(arg_0, arg_1, out_0);
          input [7:0] arg_0;
          input [7:0] arg_1;
          output [15:0] out_0;
          wire _0000_;
          wire _0001_;
          NOT _0852_ (.A(arg_0[3]), .Y(_0000_));
          NAND _0853_ (.A(_0000_), .B(arg_1[0]), .Y(_0001_));
          assign out_0 = {arg_0, _0001_, _0000_, 6'd0};
        endmodule
    """)
    assert m.name == "dot2_comb"
    assert [(p.name, p.width) for p in m.ports] == [
        ("arg_0", 8), ("arg_1", 8), ("out_0", 16)]
    assert [w.name for w in m.wires] == ["_0000_", "_0001_"]
    inst = m.instances[0]
    assert (inst.cell, inst.name) == ("NOT", "_0852_")
    pin = inst.pins["A"]
    assert isinstance(pin, BitSel)
    assert (pin.name, pin.index, pin.line) == ("arg_0", 3, 8)
    assert isinstance(m.assigns[0].rhs, Concat)


def test_port_decl_without_header_entry_rejected():
    with pytest.raises(errors.SyntaxError, match="not a module port"):
        parse_one("module m(a); input a; input b; endmodule")


def test_module_without_ports():
    m = parse_one("module m; wire w; assign w = 1'b0; endmodule")
    assert m.ports == [] and len(m.wires) == 1


def test_sized_constants():
    m = parse_one("""
        module c(output [7:0] y, output z);
          assign y = 8'hA5;
          assign z = 1'b1;
        endmodule
    """)
    c = m.assigns[0].rhs
    assert (c.width, c.value) == (8, 0xA5)
    assert (m.assigns[1].rhs.width, m.assigns[1].rhs.value) == (1, 1)


def test_constant_value_masked_to_width():
    m = parse_one("module c(output [1:0] y); assign y = 2'd7; endmodule")
    assert m.assigns[0].rhs.value == 3


def test_underscores_in_constants():
    m = parse_one("module c(output [7:0] y); assign y = 8'b1010_0101; endmodule")
    assert m.assigns[0].rhs.value == 0xA5


def test_attributes_skipped():
    m = parse_one("""
        (* top = 1 *)
        module a(input x, output y);
          (* src = "foo.v:3 *) tricky" *)
          BUF b0 (.A(x), .Y(y));
        endmodule
    """)
    assert m.instances[0].cell == "BUF"


def test_comments_skipped():
    m = parse_one("""
        // header comment
        module a(input x, output y); /* inline */ assign y = x; endmodule
    """)
    assert len(m.assigns) == 1


@pytest.mark.parametrize("text, construct", [
    ("module m(input a); always @(*) begin end endmodule", "always"),
    ("module m(); initial x = 0; endmodule", "initial"),
    ("module m(input a); reg r; endmodule", "reg"),
    ("module m(); parameter W = 8; endmodule", "parameter"),
    ("module m(); generate endgenerate endmodule", "generate"),
    ("module m(inout a); endmodule", "inout"),
    ("module m(input a, output y); BUF #(1) b (.A(a), .Y(y)); endmodule",
     "parameter expression"),
    ("module m(input a, output y); BUF b (a, y); endmodule",
     "positional port connection"),
    ("module m(input a, output [1:0] y); assign y = {2{a}}; endmodule",
     "replication"),
    ("module m(input a, output y); assign y = \\esc~ ; endmodule",
     "escaped identifier"),
    ("`timescale 1ns/1ps\nmodule m(); endmodule", "compiler directive"),
    ("module m(output y); assign y = 1'bx; endmodule", "x/z constant"),
    ("module m(input [0:3] a); endmodule", "ascending bit range"),
    ("module m(input a, output y); assign y = ~a; endmodule",
     "expression in assign"),
])
def test_unsupported_constructs(text, construct):
    with pytest.raises(errors.UnsupportedConstruct) as exc:
        parse_structural_verilog([text])
    assert exc.value.construct == construct


def test_syntax_error_has_location():
    with pytest.raises(errors.SyntaxError) as exc:
        parse_structural_verilog(["module m(input a;\n output y); endmodule"])
    assert exc.value.line == 1 and exc.value.col > 0


def test_missing_endmodule():
    with pytest.raises(errors.SyntaxError, match="endmodule"):
        parse_structural_verilog(["module m(input a, output y); assign y = a;"])


def test_duplicate_module_rejected():
    src = "module m(); endmodule"
    with pytest.raises(errors.DuplicateDefinition):
        parse_structural_verilog([src, src])


def test_duplicate_wire_rejected():
    with pytest.raises(errors.SyntaxError, match="declared twice"):
        parse_one("module m(); wire w; wire w; endmodule")


def test_cell_models_skipped_with_warning():
    with pytest.warns(UserWarning, match="library cell"):
        mods = parse_structural_verilog([load_v("cmos_cells.v")])
    assert mods == []


def test_netlist_plus_cell_models():
    with pytest.warns(UserWarning):
        mods = parse_structural_verilog(
            [load_v("buf_chain.v"), load_v("cmos_cells.v")])
    assert [m.name for m in mods] == ["buf_chain"]


# --- elaboration ----------------------------------------------------------------


def test_not_not_is_identity():
    m = build(load_v("buf_chain.v"))
    assert m.is_combinational
    for a in (0, 1):
        assert simulate_comb(m, {"a": a}) == {"y": a}


def test_dff_inverter_toggles():
    m = build(load_v("dff_inv.v"))
    assert len(m.registers) == 1
    assert [p.name for p in m.in_ports()] == []  # clk folded into the frame clock
    assert [f["q"] for f in simulate(m, [{}, {}, {}])] == [0, 1, 0]


def test_nand_self_loop_rejected():
    with pytest.raises(errors.CombinationalLoop) as exc:
        build(load_v("nand_loop.v"))
    assert "y" in exc.value.cycle


def test_hierarchy_flattens():
    m = build(load_v("hierarchy.v"), top="hier_top")
    assert m.is_combinational
    for a in range(4):
        assert simulate_comb(m, {"a": a}) == {"y": a}


def test_counter_counts():
    m = build(load_v("counter2.v"))
    assert len(m.registers) == 2
    assert [f["count"] for f in simulate(m, [{}] * 6)] == [0, 1, 2, 3, 0, 1]


def test_dffsr_set_beats_reset():
    m = build(load_v("dffsr_cell.v"))
    frames = [
        {"d": 1, "s": 0, "r": 0},
        {"d": 0, "s": 1, "r": 1},
        {"d": 0, "s": 0, "r": 1},
        {"d": 1, "s": 0, "r": 0},
    ]
    assert [f["q"] for f in simulate(m, frames)] == [0, 1, 1, 0]


def test_swap_via_concat():
    m = build("""
        module swap(input [3:0] a, output [3:0] y);
          assign y = {a[1:0], a[3:2]};
        endmodule
    """)
    for a in range(16):
        want = ((a & 3) << 2) | (a >> 2)
        assert simulate_comb(m, {"a": a}) == {"y": want}


def test_partial_and_constant_assigns():
    m = build("""
        module c(input [2:0] a, output [3:0] y);
          assign y[0] = 1'b1;
          assign y[3:1] = a;
        endmodule
    """)
    for a in range(8):
        assert simulate_comb(m, {"a": a}) == {"y": (a << 1) | 1}


def test_nonzero_lsb_ranges():
    m = build("""
        module r(input [4:1] a, output [4:1] y);
          assign y[4:3] = a[2:1];
          assign y[2:1] = a[4:3];
        endmodule
    """)
    for a in range(16):
        want = ((a & 3) << 2) | ((a >> 2) & 3)
        assert simulate_comb(m, {"a": a}) == {"y": want}


def test_constant_fans_out():
    m = build("module k(output [7:0] y); assign y = 8'd160; endmodule")
    assert simulate_comb(m, {}) == {"y": 160}


def test_multiple_drivers_rejected():
    with pytest.raises(errors.MultipleDrivers) as exc:
        build("""
            module m(input a, input b, output y);
              wire w;
              assign w = a;
              assign w = b;
              assign y = w;
            endmodule
        """)
    assert exc.value.net == "w"


def test_assign_width_mismatch():
    with pytest.raises(errors.WidthMismatch):
        build("""
            module m(input [3:0] a, output [7:0] y);
              assign y = a;
            endmodule
        """)


def test_unknown_cell():
    with pytest.raises(errors.UnknownCell) as exc:
        build("module m(input a, output y); XOR g (.A(a), .Y(y)); endmodule")
    assert exc.value.cell == "XOR"


def test_unconnected_pin():
    with pytest.raises(errors.UnconnectedPin):
        build("module m(input a, output y); NAND g (.A(a), .Y(y)); endmodule")
    with pytest.raises(errors.UnconnectedPin):
        build("module m(input a, output y); NAND g (.A(a), .B(), .Y(y)); endmodule")


def test_unknown_pin_name():
    with pytest.raises(errors.UnconnectedPin, match="no pin"):
        build("module m(input a, output y); NOT g (.A(a), .Z(y)); endmodule")


def test_wide_net_on_cell_pin():
    with pytest.raises(errors.WidthMismatch):
        build("""
            module m(input [1:0] a, output y);
              NOT g (.A(a), .Y(y));
            endmodule
        """)


def test_top_not_found():
    with pytest.raises(errors.TopNotFound):
        build("module m(); endmodule", top="nope")


def test_undriven_used_net():
    with pytest.raises(errors.UnconnectedPin, match="no driver"):
        build("""
            module m(input a, output y);
              wire w;
              NAND g (.A(a), .B(w), .Y(y));
            endmodule
        """)


def test_unused_wire_pruned_with_warning():
    with pytest.warns(UserWarning, match="drives nothing"):
        m = build("""
            module m(input a, output y);
              wire dead;
              assign y = a;
            endmodule
        """)
    assert simulate_comb(m, {"a": 1}) == {"y": 1}


def test_submodule_port_errors():
    pair = "module p(input x, output z); assign z = x; endmodule"
    with pytest.raises(errors.UnconnectedPin, match="no port"):
        build(f"module t(input a, output y); p u (.x(a), .bad(y)); endmodule\n{pair}")
    with pytest.raises(errors.UnconnectedPin, match="unconnected"):
        build(f"module t(input a, output y); p u (.z(y)); endmodule\n{pair}")


def test_recursive_hierarchy_rejected():
    with pytest.raises(errors.UnsupportedConstruct, match="recursive"):
        build("""
            module a(input x, output y); a u (.x(x), .y(y)); endmodule
        """)


def test_clock_used_as_data_rejected():
    with pytest.raises(errors.UnsupportedConstruct, match="ordinary logic"):
        build("""
            module m(input clk, output q, output y);
              DFF f (.C(clk), .D(q), .Q(q));
              BUF b (.A(clk), .Y(y));
            endmodule
        """)


def test_multiple_clock_domains_rejected():
    with pytest.raises(errors.UnsupportedConstruct, match="clock"):
        build("""
            module m(input c1, input c2, input d, output q, output p);
              DFF f (.C(c1), .D(d), .Q(q));
              DFF g (.C(c2), .D(d), .Q(p));
            endmodule
        """)


def test_gate_driven_clock_rejected():
    with pytest.raises(errors.UnsupportedConstruct, match="top-level input"):
        build("""
            module m(input c, input d, output q);
              wire g;
              NOT n (.A(c), .Y(g));
              DFF f (.C(g), .D(d), .Q(q));
            endmodule
        """)


def test_dot_netlist_matches_c_reference():
    # The generated multiplier-adder fixture against the loop version of
    # the same dot product.  Elements are packed with element 0 low.
    from equivfuse.hir import interpret
    from support import load_c

    m = build(load_v("dot2_s4_netlist.v"))
    assert m.is_combinational
    ref = load_c("dot2_s4.c")
    rng = random.Random(1906)
    for _ in range(300):
        a = [rng.randrange(16) for _ in range(2)]
        b = [rng.randrange(16) for _ in range(2)]
        want = interpret(ref, {"a": a, "b": b})["out_0"]
        got = simulate_comb(m, {"a": a[0] | (a[1] << 4), "b": b[0] | (b[1] << 4)})
        assert got == {"out": want & 0xFFFF}


# --- random soundness property ---------------------------------------------------

_GATE = {
    "BUF": lambda a: a,
    "NOT": lambda a: 1 - a,
    "NAND": lambda a, b: 1 - (a & b),
    "NOR": lambda a, b: 1 - (a | b),
}


def _rand_netlist(rng):
    """Random acyclic netlist, returned as Verilog text plus a gate list for
    the independent evaluator."""
    n_in = rng.randint(1, 6)
    n_reg = rng.randint(0, 3) if rng.random() < 0.5 else 0
    inputs = [f"i{k}" for k in range(n_in)]
    qs = [f"q{k}" for k in range(n_reg)]
    avail = inputs + qs

    gates = []
    for k in range(rng.randint(1, 40 - n_reg)):
        cell = rng.choice(("BUF", "NOT", "NAND", "NOR"))
        ins = [rng.choice(avail) for _ in range(1 if cell in ("BUF", "NOT") else 2)]
        out = f"n{k}"
        gates.append((cell, out, ins))
        avail.append(out)

    regs = []
    for k, q in enumerate(qs):
        kind = rng.choice(("DFF", "DFFSR"))
        d, s, r = (rng.choice(avail) for _ in range(3))
        regs.append((kind, q, d, s, r))

    outputs = [(f"o{k}", rng.choice(avail)) for k in range(rng.randint(1, 3))]

    ports = [f"input {i}" for i in inputs] + [f"output {p}" for p, _ in outputs]
    if regs:
        ports.insert(0, "input clk")
    lines = [f"module rnd({', '.join(ports)});"]
    for name in [o for _, o, _ in gates] + qs:
        lines.append(f"  wire {name};")
    stmts = [f"  {c} g{k} (.A({i[0]}), " +
             (f".B({i[1]}), " if len(i) > 1 else "") + f".Y({o}));"
             for k, (c, o, i) in enumerate(gates)]
    for k, (kind, q, d, s, r) in enumerate(regs):
        extra = f".S({s}), .R({r}), " if kind == "DFFSR" else ""
        stmts.append(f"  {kind} r{k} (.C(clk), .D({d}), {extra}.Q({q}));")
    rng.shuffle(stmts)  # elaboration must not depend on statement order
    lines += stmts
    lines += [f"  assign {p} = {s};" for p, s in outputs]
    lines.append("endmodule")
    return "\n".join(lines), inputs, gates, regs, outputs


def _eval_direct(inputs, gates, regs, outputs, frames):
    state = {q: 0 for _, q, _, _, _ in regs}
    trace = []
    for frame in frames:
        vals = dict(frame)
        vals.update(state)
        for cell, out, ins in gates:
            vals[out] = _GATE[cell](*(vals[x] for x in ins))
        trace.append({p: vals[s] for p, s in outputs})
        state = {}
        for kind, q, d, s, r in regs:
            if kind == "DFFSR":
                state[q] = 1 if vals[s] else (0 if vals[r] else vals[d])
            else:
                state[q] = vals[d]
    return trace


def test_random_netlists_match_direct_evaluation():
    rng = random.Random(20240820)
    for _ in range(100):
        text, inputs, gates, regs, outputs = _rand_netlist(rng)
        m = build(text)
        assert len(m.registers) == len(regs)
        n_frames = 4 if regs else 1
        for _ in range(100 // n_frames):
            frames = [{i: rng.randint(0, 1) for i in inputs}
                      for _ in range(n_frames)]
            assert simulate(m, frames) == _eval_direct(
                inputs, gates, regs, outputs, frames)
