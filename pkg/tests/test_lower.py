"""Lowering tests: every lowered module must agree with the interpreter."""
import random

import pytest

from equivfuse import errors
from equivfuse.core import lower_hir, simulate_comb
from equivfuse.hir import interpret
from support import as_signed, fn_from, load_c, run_lowered


def _agree(fn, module, inputs):
    want = interpret(fn, inputs)
    got = run_lowered(fn, module, inputs)
    assert got == want, (inputs, got, want)


# ------------------------------------------------------------ module shape


def test_identity_module_shape():
    fn = load_c("identity.c")
    m = lower_hir(fn)
    assert m.name == "identity"
    assert [(p.name, p.width, p.direction) for p in m.ports] == [
        ("a", 32, "in"), ("out_0", 32, "out")]
    assert m.is_combinational
    assert simulate_comb(m, {"a": 7})["out_0"] == 7


def test_array_ports_are_packed():
    fn = load_c("sort4_bubble.c")
    m = lower_hir(fn)
    assert m.port("input").width == 16
    assert m.port("output").width == 16
    # element 0 rides the low bits
    got = simulate_comb(m, {"input": 0x0123})["output"]
    assert got == 0x3210


def test_lower_requires_checked_function():
    from equivfuse.hir import parse_mini_c
    prog = parse_mini_c("int f(int a) { return a; }")
    (fn,) = prog.functions.values()
    with pytest.raises(ValueError, match="check"):
        lower_hir(fn)


def test_trip_count_budget():
    fn = fn_from("""
    u8 f(u8 a) {
        u8 s = 0;
        for (u32 i = 0; i < 1000; i++) { s += a; }
        return s;
    }
    """)
    with pytest.raises(errors.TripCountOverflow):
        lower_hir(fn, stmt_limit=100)
    m = lower_hir(fn)  # default budget is plenty
    assert simulate_comb(m, {"a": 1})["out_0"] == 1000 & 0xFF


def test_constant_program_folds_to_const():
    fn = fn_from("""
    u8 f(u8 a) {
        u8 s = 0;
        for (u32 i = 0; i < 5; i++) { s += 2; }
        return s;
    }
    """)
    m = lower_hir(fn)
    out = m.outputs["out_0"]
    assert m.kinds[out] == "const"
    assert m.attrs[out] == 10


# ------------------------------------------------------- fixture agreement


@pytest.mark.parametrize("name,n,w", [
    ("sort4_bubble.c", 4, 4),
    ("sort4_net.c", 4, 4),
    ("sort4_desc.c", 4, 4),
    ("sort8_bubble.c", 8, 8),
    ("sort8_net.c", 8, 8),
])
def test_sort_fixtures_lower_faithfully(name, n, w):
    fn = load_c(name)
    m = lower_hir(fn)
    rng = random.Random(42)
    for _ in range(200):
        vec = [rng.randrange(1 << w) for _ in range(n)]
        _agree(fn, m, {"input": vec})


@pytest.mark.parametrize("name,n,w", [
    ("dot4_s16.c", 4, 16),
    ("dot4_s16_trunc.c", 4, 16),
    ("widen4_ok.c", 4, 8),
    ("widen4_sx.c", 4, 8),
    ("dot64_good.c", 64, 16),
    ("dot64_trunc.c", 64, 16),
])
def test_dot_fixtures_lower_faithfully(name, n, w):
    fn = load_c(name)
    m = lower_hir(fn)
    rng = random.Random(43)
    for _ in range(60):
        a = [as_signed(rng.randrange(1 << w), w) for _ in range(n)]
        b = [as_signed(rng.randrange(1 << w), w) for _ in range(n)]
        _agree(fn, m, {"arg_0": a, "arg_1": b})


def test_dot2_s4_exhaustive():
    fn = load_c("dot2_s4.c")
    m = lower_hir(fn)
    for packed in range(1 << 16):
        a = [(packed >> 0) & 15, (packed >> 4) & 15]
        b = [(packed >> 8) & 15, (packed >> 12) & 15]
        want = interpret(fn, {"a": a, "b": b})["out_0"]
        got = simulate_comb(m, {"a": a[0] | (a[1] << 4), "b": b[0] | (b[1] << 4)})
        assert got["out_0"] == want, (a, b)


# ------------------------------------------------------- targeted programs


def test_dynamic_read_and_write():
    fn = fn_from("""
    void f(u2 i, u2 j, u8 x, u8 o[2]) {
        u8 t[4];
        t[i] = x;
        t[3] = 9;
        o[0] = t[j];
        o[1] = t[i];
    }
    """)
    m = lower_hir(fn)
    for i in range(4):
        for j in range(4):
            for x in (0, 7, 255):
                _agree(fn, m, {"i": i, "j": j, "x": x})


def test_if_else_merges_scalars_and_arrays():
    fn = fn_from("""
    void f(u8 a, u8 b, u8 o[3]) {
        u8 t[2];
        u8 s = 1;
        if (a < b) {
            s = a;
            t[0] = b;
        } else {
            t[1] = a;
            if (a == b) { s = 200; }
        }
        o[0] = s;
        o[1] = t[0];
        o[2] = t[1];
    }
    """)
    m = lower_hir(fn)
    for a, b in [(1, 2), (2, 1), (3, 3), (0, 255), (255, 0)]:
        _agree(fn, m, {"a": a, "b": b})


def test_variable_shift_semantics_match():
    fn = fn_from("""
    void f(u8 a, u8 n, s8 b, u8 o[3]) {
        o[0] = a << n;
        o[1] = a >> n;
        o[2] = (u8)(b >> (s8)n);
    }
    """)
    m = lower_hir(fn)
    rng = random.Random(5)
    cases = [(a, n, c) for a in (0, 1, 0x80, 0xFF) for n in (0, 1, 7, 8, 9, 255)
             for c in (0, -1, -128, 127)]
    cases += [(rng.randrange(256), rng.randrange(256), as_signed(rng.randrange(256), 8))
              for _ in range(100)]
    for a, n, c in cases:
        _agree(fn, m, {"a": a, "n": n, "b": c})


def test_signed_compare_lowering():
    fn = fn_from("""
    void f(s8 a, s8 b, u8 o[6]) {
        o[0] = 0; o[1] = 0; o[2] = 0; o[3] = 0; o[4] = 0; o[5] = 0;
        if (a < b) { o[0] = 1; }
        if (a <= b) { o[1] = 1; }
        if (a > b) { o[2] = 1; }
        if (a >= b) { o[3] = 1; }
        if (a == b) { o[4] = 1; }
        if (a != b) { o[5] = 1; }
    }
    """)
    m = lower_hir(fn)
    for a in (-128, -1, 0, 1, 127):
        for b in (-128, -1, 0, 1, 127):
            _agree(fn, m, {"a": a, "b": b})


def test_cast_lowering():
    fn = fn_from("""
    void f(u8 a, s8 b, u16 o[4]) {
        o[0] = (u16)a;
        o[1] = (u16)(s16)b;
        o[2] = (u16)(u4)a;
        o[3] = (u16)(s16)(s4)b;
    }
    """)
    m = lower_hir(fn)
    for a in (0, 1, 0x0F, 0x1F, 0x80, 0xFF):
        for b in (-128, -8, -1, 0, 7, 127):
            _agree(fn, m, {"a": a, "b": b})


def test_neg_and_bitnot_lowering():
    fn = fn_from("""
    void f(s8 a, u8 o[2]) {
        o[0] = (u8)(-a);
        o[1] = (u8)(s8)~(u8)a;
    }
    """)
    m = lower_hir(fn)
    for a in (-128, -5, -1, 0, 1, 127):
        _agree(fn, m, {"a": a})


# --------------------------------------------------- randomized differential

_EXPR_VARS = ["x", "y", "s"]


def _gen_expr(rng, depth=0):
    if depth > 2 or rng.random() < 0.4:
        if rng.random() < 0.3:
            return str(rng.randrange(256))
        pick = rng.choice(_EXPR_VARS + ["t[i]", "t[j]", f"t[{rng.randrange(4)}]"])
        return pick
    op = rng.choice(["+", "-", "*", "&", "|", "^", "<<", ">>"])
    lhs = _gen_expr(rng, depth + 1)
    rhs = str(rng.randrange(8)) if op in ("<<", ">>") else _gen_expr(rng, depth + 1)
    return f"({lhs} {op} {rhs})"


def _gen_stmts(rng, depth, budget):
    stmts = []
    for _ in range(rng.randint(1, 3)):
        if budget[0] <= 0:
            break
        budget[0] -= 1
        roll = rng.random()
        if roll < 0.35:
            dest = rng.choice(["s", "t[i]", "t[j]", f"t[{rng.randrange(4)}]"])
            stmts.append(f"{dest} = {_gen_expr(rng)};")
        elif roll < 0.5:
            stmts.append(f"s += {_gen_expr(rng)};")
        elif roll < 0.75 and depth < 2:
            cond = rng.choice(["x < y", "x == y", "i == j", "s >= x", "z < w"])
            then = " ".join(_gen_stmts(rng, depth + 1, budget))
            orelse = " ".join(_gen_stmts(rng, depth + 1, budget))
            stmts.append(f"if ({cond}) {{ {then} }} else {{ {orelse} }}")
        else:
            bound = rng.randint(1, 4)
            body = f"t[k] = {_gen_expr(rng)};"
            stmts.append(f"for (u32 k = 0; k < {bound}; k++) {{ {body} }}")
    return stmts or ["s = 0;"]


def test_random_programs_lower_faithfully():
    rng = random.Random(20240818)
    for _ in range(40):
        budget = [14]
        body = " ".join(_gen_stmts(rng, 0, budget))
        src = f"""
        void f(u2 i, u2 j, u8 x, u8 y, s8 z, s8 w, u8 o[4]) {{
            u8 t[4];
            u8 s = 0;
            {body}
            o[0] = s;
            o[1] = t[i];
            o[2] = t[0];
            o[3] = x ^ y;
        }}
        """
        fn = fn_from(src)
        m = lower_hir(fn)
        for _ in range(100):
            inputs = {
                "i": rng.randrange(4), "j": rng.randrange(4),
                "x": rng.randrange(256), "y": rng.randrange(256),
                "z": as_signed(rng.randrange(256), 8),
                "w": as_signed(rng.randrange(256), 8),
            }
            _agree(fn, m, inputs)
