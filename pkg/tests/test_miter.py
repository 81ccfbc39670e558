"""Port matching and miter construction."""

import itertools
import random

import pytest

from equivfuse import errors
from equivfuse.core import Builder, lower_hir, simulate_comb
from equivfuse.miter import MiterModule, PortMap, build_miter, match_ports

from support import fn_from, random_core_module


def buf(width=1, name="buf", out="y"):
    b = Builder(name)
    b.add_out_port(out, width, b.add_in_port("a", width))
    return b.finish()


def inv(width=1, name="inv"):
    b = Builder(name)
    b.add_out_port("y", width, b.not_(b.add_in_port("a", width)))
    return b.finish()


def miter_of(spec, impl, **kw):
    return build_miter(spec, impl, match_ports(spec, impl), **kw)


# --- match_ports ------------------------------------------------------------


def test_identical_single_port_modules():
    pm = match_ports(buf(), buf())
    assert pm.pairs == [("a", "a", "in"), ("y", "y", "out")]
    assert pm.unmatched == []


def test_count_mismatch():
    b = Builder("two_in")
    x = b.add_in_port("a", 1)
    y = b.add_in_port("b", 1)
    b.add_out_port("y", 1, b.and_(x, y))
    with pytest.raises(errors.CountMismatch) as exc:
        match_ports(buf(), b.finish())
    assert (exc.value.spec_n, exc.value.impl_n) == (2, 3)


def test_name_missing():
    with pytest.raises(errors.NameMissing) as exc:
        match_ports(buf(out="out"), buf(out="out_0"))
    assert exc.value.side == "impl" and exc.value.name == "out"


def test_rename_directive_bridges_names():
    pm = match_ports(buf(out="out"), buf(out="out_0"),
                     {"rename_impl": {"out_0": "out"}})
    assert ("out", "out_0", "out") in pm.pairs


def test_width_mismatch():
    with pytest.raises(errors.WidthMismatch) as exc:
        match_ports(buf(width=4), buf(width=8))
    assert (exc.value.spec_w, exc.value.impl_w) == (4, 8)


def test_direction_mismatch():
    b = Builder("flip")
    y = b.add_in_port("y", 1)
    b.add_out_port("a", 1, y)
    with pytest.raises(errors.DirectionMismatch):
        match_ports(buf(), b.finish())


def test_match_is_symmetric_up_to_side_labels():
    rng = random.Random(11)
    for _ in range(20):
        iface = ([("p", 3), ("q", 2)], [4, 1])
        m1 = random_core_module(rng, iface=iface, max_regs=0)
        m2 = random_core_module(rng, iface=iface, max_regs=0)
        fwd = match_ports(m1, m2)
        rev = match_ports(m2, m1)
        assert [(i, s, d) for s, i, d in fwd.pairs] == rev.pairs


# --- build_miter ------------------------------------------------------------


def test_buffer_vs_buffer_folds_to_constant_zero():
    m = miter_of(buf(4), buf(4))
    assert [p.name for p in m.module.out_ports()] == ["neq"]
    neq = m.module.outputs["neq"]
    assert m.module.kinds[neq] == "const" and m.module.attrs[neq] == 0
    # Shared input port survives folding; the interface is part of identity.
    assert [p.name for p in m.module.in_ports()] == ["a"]


def test_not_vs_buf_differs_everywhere():
    m = miter_of(inv(), buf())
    for a in (0, 1):
        assert simulate_comb(m.module, {"a": a}) == {"neq": 1}


def test_miter_flags_exactly_the_differing_inputs():
    # Two 4-bit functions that disagree only when a >= 12.
    b1 = Builder("s")
    a = b1.add_in_port("a", 4)
    b1.add_out_port("y", 4, b1.add(a, b1.const(1, 4)))
    spec = b1.finish()
    b2 = Builder("i")
    a2 = b2.add_in_port("a", 4)
    plus1 = b2.add(a2, b2.const(1, 4))
    clipped = b2.mux(b2.ult(a2, b2.const(12, 4)), plus1, b2.const(0, 4))
    b2.add_out_port("y", 4, clipped)
    impl = b2.finish()
    m = miter_of(spec, impl)
    for a_ in range(16):
        # At a = 15 the increment wraps to 0 and matches the clip.
        want = 1 if 12 <= a_ <= 14 else 0
        assert simulate_comb(m.module, {"a": a_}) == {"neq": want}


def test_sort2_asc_vs_desc_witness():
    asc = lower_hir(fn_from("""
        extern "C" void Sort(const u4 (&a)[2], u4 (&out)[2]) {
            u4 lo = a[0];
            u4 hi = a[1];
            if (hi < lo) { u4 t = lo; lo = hi; hi = t; }
            out[0] = lo;
            out[1] = hi;
        }
    """))
    desc = lower_hir(fn_from("""
        extern "C" void Sort(const u4 (&a)[2], u4 (&out)[2]) {
            u4 lo = a[0];
            u4 hi = a[1];
            if (hi < lo) { u4 t = lo; lo = hi; hi = t; }
            out[0] = hi;
            out[1] = lo;
        }
    """))
    m = miter_of(asc, desc)
    hits = [v for v in range(256)
            if simulate_comb(m.module, {"a": v})["neq"]]
    # Witness (0, 1): packed 0x10.
    assert 0x10 in hits
    # Exactly the inputs with distinct elements differ.
    assert len(hits) == 256 - 16


def test_aiger_mode_carries_equivalent_aig():
    spec, impl = inv(4), buf(4)
    m = miter_of(spec, impl, mode="aiger")
    assert m.aig is not None
    assert [n for n, _ in m.aig.outputs] == ["neq"]
    for a in range(16):
        want = simulate_comb(m.module, {"a": a})["neq"]
        got = m.aig.eval({f"a[{k}]": (a >> k) & 1 for k in range(4)})
        assert got == {"neq": want}


def test_sequential_requires_depth():
    b = Builder("reg")
    r = b.add_register("r", 1, 0)
    b.set_reg_next(r, b.not_(r))
    b.add_out_port("q", 1, r)
    seq = b.finish()
    with pytest.raises(errors.NeedsUnrollDepth):
        build_miter(seq, seq, match_ports(seq, seq))
    m = build_miter(seq, seq, match_ports(seq, seq), k=3)
    assert simulate_comb(m.module, {}) == {"neq": 0}


def test_unrolled_inputs_are_shared_per_frame():
    spec, impl = inv(2), inv(2)
    m = miter_of(spec, impl, k=2)
    assert [p.name for p in m.module.in_ports()] == ["a@0", "a@1"]
    assert m.in_port_name("a", 1) == "a@1"
    assert m.compare_frames == [(1, 1)]


def test_latency_mismatch_with_per_side_depths():
    # Pass-through vs one-cycle delay: equivalent when the delayed side
    # gets one extra frame and only final frames are compared.
    comb = buf(4)
    b = Builder("dly")
    x = b.add_in_port("a", 4)
    r = b.add_register("r", 4, 0)
    b.set_reg_next(r, x)
    b.add_out_port("y", 4, r)
    delayed = b.finish()
    m = build_miter(comb, delayed, match_ports(comb, delayed),
                    spec_k=1, impl_k=2)
    assert m.compare_frames == [(0, 1)]
    # Shared frame 0 feeds both; frame 1 input feeds only the impl side.
    assert [p.name for p in m.module.in_ports()] == ["a@0", "a@1"]
    for v0, v1 in itertools.product(range(16), repeat=2):
        got = simulate_comb(m.module, {"a@0": v0, "a@1": v1})
        assert got == {"neq": 0}


def test_compare_all_frames():
    b = Builder("count")
    r = b.add_register("r", 2, 0)
    b.set_reg_next(r, b.add(r, b.const(1, 2)))
    b.add_out_port("y", 2, r)
    seq = b.finish()
    with pytest.raises(ValueError):
        build_miter(seq, seq, match_ports(seq, seq),
                    spec_k=2, impl_k=3, compare_frames="all")
    m = build_miter(seq, seq, match_ports(seq, seq), k=3,
                    compare_frames="all")
    assert m.compare_frames == [(0, 0), (1, 1), (2, 2)]
    assert simulate_comb(m.module, {}) == {"neq": 0}


def test_explicit_frame_list_validated():
    seq = buf(2)
    with pytest.raises(ValueError):
        build_miter(seq, seq, match_ports(seq, seq), k=2, compare_frames=[2])


def test_sidecar_roundtrip():
    m = miter_of(inv(3), buf(3), mode="aiger", k=2)
    m2 = MiterModule.from_json(m.to_json())
    assert m2.module.dumps() == m.module.dumps()
    assert m2.pm.pairs == m.pm.pairs
    assert m2.output_pairs == m.output_pairs
    assert m2.aig is not None and m2.aig.outputs == m.aig.outputs


def test_random_miters_flag_exactly_the_divergences():
    rng = random.Random(20240824)
    for _ in range(40):
        n_in = rng.randint(1, 2)
        ins = [(f"x{k}", rng.randint(1, 4)) for k in range(n_in)]
        outs = [rng.randint(1, 4) for _ in range(rng.randint(1, 2))]
        iface = (ins, outs)
        spec = random_core_module(rng, iface=iface, max_regs=0)
        impl = random_core_module(rng, iface=iface, max_regs=0)
        m = miter_of(spec, impl)
        total = sum(w for _, w in ins)
        vectors = range(1 << total) if total <= 8 else \
            [rng.randrange(1 << total) for _ in range(100)]
        for v in vectors:
            vals, off = {}, 0
            for n, w in ins:
                vals[n] = (v >> off) & ((1 << w) - 1)
                off += w
            differ = simulate_comb(spec, vals) != simulate_comb(impl, vals)
            assert simulate_comb(m.module, vals)["neq"] == int(differ)
