"""Tensor-graph frontend: parsing, validation, lowering soundness."""

import json
import random

import pytest

from equivfuse import errors
from equivfuse.graph import lower_graph_to_hir, parse_graph
from equivfuse.hir import Assign, For, Index, interpret

from support import FIXTURES, load_c


# --- independent direct evaluator -------------------------------------------
# Works straight off the GraphSpec in arbitrary-precision Python ints and only
# wraps when storing a tensor, so it shares no code with the HIR pipeline.


def _wrap(value, width):
    return value & ((1 << width) - 1)


def _signed_view(raw, signed, width):
    raw = _wrap(raw, width)
    if signed and raw >> (width - 1):
        raw -= 1 << width
    return raw


def eval_graph(g, inputs):
    env = {t: inputs[t] for t in g.inputs}

    def elems(name):
        t = g.tensors[name]
        v = env[name]
        v = v if isinstance(v, list) else [v]
        return [_signed_view(x, t.signed, t.width) for x in v]

    for node in g.nodes:
        res = g.tensors[node.result]
        if node.op == "dot":
            x, y = elems(node.args[0]), elems(node.args[1])
            out = [sum(p * q for p, q in zip(x, y))]
        elif node.op == "matmul":
            x, y = elems(node.args[0]), elems(node.args[1])
            m, k = g.tensors[node.args[0]].shape
            _, n = g.tensors[node.args[1]].shape
            out = [sum(x[i * k + t] * y[t * n + j] for t in range(k))
                   for i in range(m) for j in range(n)]
        elif node.op in ("ewadd", "ewmul"):
            x, y = elems(node.args[0]), elems(node.args[1])
            op = (lambda p, q: p + q) if node.op == "ewadd" else (lambda p, q: p * q)
            out = [op(p, q) for p, q in zip(x, y)]
        else:
            out = [sum(elems(node.args[0]))]
        out = [_wrap(v, res.width) for v in out]
        env[node.result] = out[0] if res.is_scalar else out
    return {t: env[t] for t in g.outputs}


def run_lowered(g, inputs, fn=None):
    fn = fn if fn is not None else lower_graph_to_hir(g)
    got = interpret(fn, {t: inputs[t] for t in g.inputs})
    # out params appear in g.outputs order (passthroughs get renamed)
    return {t: got[p.name] for t, p in zip(g.outputs, fn.out_params())}


def spec_of(**parts):
    return parse_graph(json.dumps(parts))


def tensor(name, shape, dtype):
    return {"name": name, "shape": shape, "dtype": dtype}


def node(op, args, result):
    return {"op": op, "args": args, "result": result}


DOT2_S8 = dict(
    tensors=[tensor("a", [2], "s8"), tensor("b", [2], "s8"),
             tensor("out", [], "s32")],
    nodes=[node("dot", ["a", "b"], "out")],
    inputs=["a", "b"], outputs=["out"],
)


# --- parsing and validation ---------------------------------------------------


def test_dot_graph_parses():
    g = spec_of(**DOT2_S8)
    assert len(g.nodes) == 1
    assert g.nodes[0].op == "dot"
    assert g.nodes[0].args == ("a", "b")
    assert g.tensors["a"].shape == (2,)
    assert g.tensors["a"].signed and g.tensors["a"].width == 8
    assert g.tensors["out"].is_scalar and g.tensors["out"].width == 32


def test_passthrough_graph_valid():
    g = spec_of(tensors=[tensor("x", [3], "u8")], nodes=[],
                inputs=["x"], outputs=["x"])
    assert g.nodes == [] and g.inputs == ["x"] and g.outputs == ["x"]


def test_dot_length_mismatch():
    parts = dict(
        tensors=[tensor("a", [2], "s8"), tensor("b", [3], "s8"),
                 tensor("out", [], "s32")],
        nodes=[node("dot", ["a", "b"], "out")],
        inputs=["a", "b"], outputs=["out"],
    )
    with pytest.raises(errors.ShapeMismatch) as exc:
        spec_of(**parts)
    assert exc.value.node == "out"


def test_unknown_op():
    parts = dict(
        tensors=[tensor("a", [2], "s8"), tensor("out", [2], "s8")],
        nodes=[node("conv2d", ["a"], "out")],
        inputs=["a"], outputs=["out"],
    )
    with pytest.raises(errors.UnknownOp) as exc:
        spec_of(**parts)
    assert exc.value.op == "conv2d"


@pytest.mark.parametrize("mutate, detail", [
    (lambda d: d.pop("outputs"), "missing key"),
    (lambda d: d.update(extra=[]), "extra key"),
    (lambda d: d["tensors"].append(tensor("a", [2], "s8")), "duplicate tensor"),
    (lambda d: d["tensors"][0].update(dtype="f32"), "float dtype"),
    (lambda d: d["tensors"][0].update(dtype="s0"), "zero width"),
    (lambda d: d["tensors"][0].update(dtype="s65"), "width over 64"),
    (lambda d: d["tensors"][0].update(name="1a"), "bad name"),
    (lambda d: d["tensors"][0].update(shape=[2, 0]), "zero dim"),
    (lambda d: d["tensors"][0].update(shape=[-1]), "negative dim"),
    (lambda d: d["inputs"].append("a"), "duplicate input"),
    (lambda d: d["outputs"].append("nope"), "undeclared output"),
    (lambda d: d["nodes"][0].update(result="missing"), "undeclared result"),
    (lambda d: d["nodes"][0].update(args=["a", "ghost"]), "undeclared arg"),
    (lambda d: d["nodes"][0].pop("args"), "node missing args"),
    (lambda d: d["tensors"].append(tensor("dead", [2], "s8")), "never produced"),
])
def test_schema_violations(mutate, detail):
    parts = json.loads(json.dumps(DOT2_S8))
    mutate(parts)
    with pytest.raises(errors.SchemaError):
        spec_of(**parts)


def test_not_json():
    with pytest.raises(errors.SchemaError, match="not valid JSON"):
        parse_graph("{tensors: oops")
    with pytest.raises(errors.SchemaError, match="top level"):
        parse_graph("[1, 2]")


def test_use_before_produced():
    parts = dict(
        tensors=[tensor("a", [2], "s8"), tensor("t", [2], "s8"),
                 tensor("u", [2], "s8")],
        nodes=[node("ewadd", ["a", "t"], "u"),
               node("ewadd", ["a", "a"], "t")],
        inputs=["a"], outputs=["u", "t"],
    )
    with pytest.raises(errors.SchemaError, match="before it is produced"):
        spec_of(**parts)


def test_double_assignment():
    parts = dict(
        tensors=[tensor("a", [2], "s8"), tensor("t", [2], "s8")],
        nodes=[node("ewadd", ["a", "a"], "t"),
               node("ewmul", ["a", "a"], "t")],
        inputs=["a"], outputs=["t"],
    )
    with pytest.raises(errors.SchemaError, match="more than once"):
        spec_of(**parts)


def test_operand_dtype_must_match():
    parts = dict(
        tensors=[tensor("a", [2], "s8"), tensor("b", [2], "u8"),
                 tensor("out", [], "s32")],
        nodes=[node("dot", ["a", "b"], "out")],
        inputs=["a", "b"], outputs=["out"],
    )
    with pytest.raises(errors.ShapeMismatch, match="share a dtype"):
        spec_of(**parts)


@pytest.mark.parametrize("shapes, result_shape, op", [
    (([2], [3]), [], "dot"),
    (([2, 2], [2]), [2, 2], "matmul"),
    (([2, 3], [2, 3]), [2, 3], "matmul"),
    (([2, 3], [3, 2]), [3, 3], "matmul"),
    (([2], [3]), [2], "ewadd"),
    (([2], [2]), [3], "ewmul"),
    (([2], [2]), [2], "dot"),
])
def test_shape_rules(shapes, result_shape, op):
    parts = dict(
        tensors=[tensor("a", list(shapes[0]), "s8"),
                 tensor("b", list(shapes[1]), "s8"),
                 tensor("out", result_shape, "s16")],
        nodes=[node(op, ["a", "b"], "out")],
        inputs=["a", "b"], outputs=["out"],
    )
    with pytest.raises(errors.ShapeMismatch):
        spec_of(**parts)


def test_reduce_sum_arity():
    parts = dict(
        tensors=[tensor("a", [2], "s8"), tensor("out", [], "s16")],
        nodes=[node("reduce_sum", ["a", "a"], "out")],
        inputs=["a"], outputs=["out"],
    )
    with pytest.raises(errors.ShapeMismatch, match="takes 1 argument"):
        spec_of(**parts)


# --- lowering: pinned examples -----------------------------------------------


def test_dot_lowering_shape_and_widening():
    g = spec_of(**DOT2_S8)
    fn = lower_graph_to_hir(g)
    assert fn.validated
    assert [(p.name, p.direction) for p in fn.params] == [
        ("a", "in"), ("b", "in"), ("out", "out")]
    loops = [s for s in fn.body if isinstance(s, For)]
    assert len(loops) == 1
    assert (loops[0].lower, loops[0].upper, loops[0].step) == (0, 2, 1)

    assert run_lowered(g, {"a": [2, 3], "b": [4, 5]}, fn) == {"out": 23}
    # sign-extension to the accumulator: -100 * 100 would wrap at any width
    # below 16, so 0xFFFFD8F0 pins the product living at the wide type
    raw = run_lowered(g, {"a": [156, 0], "b": [100, 0]}, fn)
    assert raw == {"out": (-10000) & 0xFFFFFFFF}


def test_passthrough_lowers_to_copy_loop():
    g = spec_of(tensors=[tensor("x", [3], "u8")], nodes=[],
                inputs=["x"], outputs=["x"])
    fn = lower_graph_to_hir(g)
    assert [(p.name, p.direction) for p in fn.params] == [
        ("x", "in"), ("x_out", "out")]
    (loop,) = (s for s in fn.body if isinstance(s, For))
    (stmt,) = loop.body
    assert isinstance(stmt, Assign)
    assert isinstance(stmt.lvalue, Index) and stmt.lvalue.array == "x_out"
    assert isinstance(stmt.expr, Index) and stmt.expr.array == "x"
    assert run_lowered(g, {"x": [7, 0, 255]}, fn) == {"x": [7, 0, 255]}


def test_matmul_all_ones():
    g = spec_of(
        tensors=[tensor("a", [2, 2], "u8"), tensor("b", [2, 2], "u8"),
                 tensor("c", [2, 2], "u8")],
        nodes=[node("matmul", ["a", "b"], "c")],
        inputs=["a", "b"], outputs=["c"],
    )
    ones = [1, 1, 1, 1]
    assert run_lowered(g, {"a": ones, "b": ones}) == {"c": [2, 2, 2, 2]}


def test_matmul_identity_times_any():
    g = spec_of(
        tensors=[tensor("a", [2, 2], "u8"), tensor("b", [2, 2], "u8"),
                 tensor("c", [2, 2], "u16")],
        nodes=[node("matmul", ["a", "b"], "c")],
        inputs=["a", "b"], outputs=["c"],
    )
    eye = [1, 0, 0, 1]
    assert run_lowered(g, {"a": eye, "b": [9, 8, 7, 6]}) == {"c": [9, 8, 7, 6]}
    got = run_lowered(g, {"a": [200, 200, 200, 200], "b": [200, 0, 200, 0]})
    assert got == {"c": [(200 * 200 * 2) & 0xFFFF, 0, (200 * 200 * 2) & 0xFFFF, 0]}


def test_rectangular_matmul():
    g = spec_of(
        tensors=[tensor("a", [1, 3], "s8"), tensor("b", [3, 2], "s8"),
                 tensor("c", [1, 2], "s16")],
        nodes=[node("matmul", ["a", "b"], "c")],
        inputs=["a", "b"], outputs=["c"],
    )
    # (-1, 2, -3) x [[1, 2], [3, 4], [5, 6]] = (-10, -12)
    got = run_lowered(g, {"a": [255, 2, 253], "b": [1, 2, 3, 4, 5, 6]})
    assert got == {"c": [(-10) & 0xFFFF, (-12) & 0xFFFF]}


def test_elementwise_and_reduce():
    g = spec_of(
        tensors=[tensor("a", [4], "u4"), tensor("b", [4], "u4"),
                 tensor("p", [4], "u8"), tensor("s", [], "u8")],
        nodes=[node("ewmul", ["a", "b"], "p"),
               node("reduce_sum", ["p"], "s")],
        inputs=["a", "b"], outputs=["p", "s"],
    )
    got = run_lowered(g, {"a": [15, 15, 2, 0], "b": [15, 1, 3, 9]})
    assert got == {"p": [225, 15, 6, 0], "s": 246}


def test_scalar_tensors():
    g = spec_of(
        tensors=[tensor("x", [], "s8"), tensor("y", [], "s8"),
                 tensor("z", [], "s8")],
        nodes=[node("ewadd", ["x", "y"], "z")],
        inputs=["x", "y"], outputs=["z"],
    )
    assert run_lowered(g, {"x": 200, "y": 100}) == {"z": (200 + 100) & 0xFF}


def test_narrowing_accumulator():
    # result dtype narrower than the operands truncates like any store
    g = spec_of(
        tensors=[tensor("a", [2], "s8"), tensor("b", [2], "s8"),
                 tensor("out", [], "s4")],
        nodes=[node("dot", ["a", "b"], "out")],
        inputs=["a", "b"], outputs=["out"],
    )
    assert run_lowered(g, {"a": [5, 0], "b": [5, 0]}) == {"out": 25 & 0xF}


def test_chained_nodes_reading_an_output():
    g = spec_of(
        tensors=[tensor("a", [2], "s8"), tensor("b", [2], "s8"),
                 tensor("s", [], "s16"), tensor("t", [], "s16")],
        nodes=[node("dot", ["a", "b"], "s"),
               node("ewadd", ["s", "s"], "t")],
        inputs=["a", "b"], outputs=["s", "t"],
    )
    got = run_lowered(g, {"a": [3, 4], "b": [5, 6]})
    assert got == {"s": 39, "t": 78}


def test_passthrough_name_collision():
    g = spec_of(
        tensors=[tensor("x", [2], "u8"), tensor("x_out", [2], "u8")],
        nodes=[node("ewadd", ["x", "x"], "x_out")],
        inputs=["x"], outputs=["x", "x_out"],
    )
    fn = lower_graph_to_hir(g)
    names = [p.name for p in fn.params]
    assert len(set(names)) == len(names)
    got = run_lowered(g, {"x": [10, 20]})
    assert got == {"x": [10, 20], "x_out": [20, 40]}


def test_fixture_files_parse():
    for name in ("dot2_s4.json", "dot2_s8_acc32.json"):
        g = parse_graph((FIXTURES / name).read_text())
        assert g.nodes[0].op == "dot"
        assert g.outputs == ["out"]


def test_dot2_s4_matches_c_oracle():
    g = parse_graph((FIXTURES / "dot2_s4.json").read_text())
    fn = lower_graph_to_hir(g)
    cfn = load_c("dot2_s4.c")
    rng = random.Random(1905)
    for _ in range(300):
        a = [rng.randrange(16) for _ in range(2)]
        b = [rng.randrange(16) for _ in range(2)]
        want = interpret(cfn, {"a": a, "b": b})["out_0"]
        assert run_lowered(g, {"a": a, "b": b}, fn) == {"out": want}


# --- lowering soundness property ---------------------------------------------


def _rand_dtype(rng, max_width=8):
    return ("s" if rng.random() < 0.5 else "u") + str(rng.randint(1, max_width))


def _rand_shape(rng):
    r = rng.random()
    if r < 0.2:
        return []
    if r < 0.7:
        return [rng.randint(1, 4)]
    return [rng.randint(1, 3), rng.randint(1, 3)]


def _rand_graph(rng):
    tensors = []
    inputs = []
    produced = []  # (name, shape tuple, dtype)

    def declare(shape, dtype, as_input):
        name = f"t{len(tensors)}"
        tensors.append(tensor(name, list(shape), dtype))
        if as_input:
            inputs.append(name)
        produced.append((name, tuple(shape), dtype))
        return name

    def pick(shape, dtype):
        if rng.random() < 0.5:
            have = [n for n, s, d in produced if s == tuple(shape) and d == dtype]
            if have:
                return rng.choice(have)
        name = f"t{len(tensors)}"
        tensors.append(tensor(name, list(shape), dtype))
        inputs.append(name)
        produced.append((name, tuple(shape), dtype))
        return name

    nodes = []
    for _ in range(rng.randint(1, 3)):
        op = rng.choice(("dot", "matmul", "ewadd", "ewmul", "reduce_sum"))
        dt = _rand_dtype(rng)
        if op == "dot":
            n = rng.randint(1, 4)
            args = [pick([n], dt), pick([n], dt)]
            rshape = []
        elif op == "matmul":
            m, k, n = (rng.randint(1, 3) for _ in range(3))
            args = [pick([m, k], dt), pick([k, n], dt)]
            rshape = [m, n]
        elif op == "reduce_sum":
            args = [pick(_rand_shape(rng), dt)]
            rshape = []
        else:
            shape = _rand_shape(rng)
            args = [pick(shape, dt), pick(shape, dt)]
            rshape = shape
        result = declare(rshape, _rand_dtype(rng), as_input=False)
        nodes.append(node(op, args, result))

    outputs = [n for (n, _, _) in produced if n not in inputs and rng.random() < 0.7]
    if not outputs:
        outputs = [nodes[-1]["result"]]
    if inputs and rng.random() < 0.3:
        outputs.append(rng.choice(inputs))
    return dict(tensors=tensors, nodes=nodes, inputs=inputs, outputs=outputs)


def test_lowering_matches_direct_evaluator():
    rng = random.Random(20240819)
    for _ in range(1000):
        g = spec_of(**_rand_graph(rng))
        fn = lower_graph_to_hir(g)
        for _ in range(2):
            ins = {}
            for t in g.inputs:
                tn = g.tensors[t]
                vals = [rng.randrange(1 << tn.width) for _ in range(tn.elems)]
                ins[t] = vals[0] if tn.is_scalar else vals
            assert run_lowered(g, ins, fn) == eval_graph(g, ins)
