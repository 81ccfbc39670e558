"""Tensor-dataflow frontend.

Reads a small JSON graph format (integer tensors, a topologically ordered
node list) and lowers it to the algorithmic IR as canonical loop nests, one
affine accumulation per node. Accumulator widths are explicit in the file:
every node states its result dtype, and operands are sign/zero-extended (or
truncated) to that width before the arithmetic happens there. For products
this matches computing exactly at twice the element width and then resizing,
since multiplication commutes with truncation modulo a power of two.

Schema::

    {"tensors": [{"name": ..., "shape": [...], "dtype": "s8"}, ...],
     "nodes":   [{"op": ..., "args": [...], "result": ...}, ...],
     "inputs":  [...], "outputs": [...]}

Ops: dot (two equal-length 1-D -> scalar), matmul ((m,k)x(k,n) -> (m,n)),
ewadd/ewmul (equal shapes), reduce_sum (any shape -> scalar). A tensor listed
in both inputs and outputs is a passthrough and lowers to a copy loop.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from math import prod

from equivfuse import errors
from equivfuse.hir import (
    Assign, Binary, Cast, Const, For, HirFunction, HirProgram, HirType, Index,
    Param, Var, array, check, scalar,
)

OPS = ("dot", "matmul", "ewadd", "ewmul", "reduce_sum")

_NAME_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
_DTYPE_RE = re.compile(r"^([su])([1-9][0-9]?)$")


@dataclass(frozen=True)
class Tensor:
    name: str
    shape: tuple[int, ...]
    signed: bool
    width: int

    @property
    def is_scalar(self) -> bool:
        return not self.shape

    @property
    def elems(self) -> int:
        return prod(self.shape)

    def hir_type(self) -> HirType:
        if self.is_scalar:
            return scalar(self.signed, self.width)
        return array(self.signed, self.width, self.elems)


@dataclass(frozen=True)
class GraphNode:
    op: str
    args: tuple[str, ...]
    result: str


@dataclass
class GraphSpec:
    tensors: dict[str, Tensor]
    nodes: list[GraphNode]
    inputs: list[str]
    outputs: list[str]


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise errors.SchemaError(msg)


def _str_list(obj, what: str) -> list[str]:
    _require(isinstance(obj, list) and all(isinstance(s, str) for s in obj),
             f"{what} must be a list of strings")
    return list(obj)


def parse_graph(source: str) -> GraphSpec:
    """Parse and validate the JSON graph format."""
    try:
        doc = json.loads(source)
    except json.JSONDecodeError as e:
        raise errors.SchemaError(f"not valid JSON: {e}") from None
    _require(isinstance(doc, dict), "top level must be an object")
    keys = {"tensors", "nodes", "inputs", "outputs"}
    _require(set(doc) == keys,
             f"top-level keys must be exactly {sorted(keys)}, got {sorted(doc)}")

    tensors: dict[str, Tensor] = {}
    _require(isinstance(doc["tensors"], list), "tensors must be a list")
    for entry in doc["tensors"]:
        _require(isinstance(entry, dict) and set(entry) == {"name", "shape", "dtype"},
                 "each tensor needs exactly name/shape/dtype")
        name = entry["name"]
        _require(isinstance(name, str) and _NAME_RE.match(name),
                 f"bad tensor name {name!r}")
        _require(name not in tensors, f"tensor {name!r} declared twice")
        shape = entry["shape"]
        _require(isinstance(shape, list)
                 and all(isinstance(d, int) and d >= 1 for d in shape),
                 f"tensor {name!r}: shape must be a list of positive ints")
        m = _DTYPE_RE.match(entry["dtype"]) if isinstance(entry["dtype"], str) else None
        _require(m is not None and 1 <= int(m.group(2)) <= 64,
                 f"tensor {name!r}: bad dtype {entry['dtype']!r}")
        tensors[name] = Tensor(name, tuple(shape), m.group(1) == "s", int(m.group(2)))

    inputs = _str_list(doc["inputs"], "inputs")
    outputs = _str_list(doc["outputs"], "outputs")
    for t in inputs + outputs:
        _require(t in tensors, f"undeclared tensor {t!r} in inputs/outputs")
    _require(len(set(inputs)) == len(inputs), "duplicate input")
    _require(len(set(outputs)) == len(outputs), "duplicate output")

    produced = set(inputs)
    nodes: list[GraphNode] = []
    _require(isinstance(doc["nodes"], list), "nodes must be a list")
    for entry in doc["nodes"]:
        _require(isinstance(entry, dict) and set(entry) == {"op", "args", "result"},
                 "each node needs exactly op/args/result")
        op = entry["op"]
        if not isinstance(op, str) or op not in OPS:
            raise errors.UnknownOp(str(op))
        args = tuple(_str_list(entry["args"], "node args"))
        result = entry["result"]
        _require(isinstance(result, str) and result in tensors,
                 f"node result {result!r} is not a declared tensor")
        for a in args:
            _require(a in tensors, f"node argument {a!r} is not a declared tensor")
            _require(a in produced,
                     f"node argument {a!r} used before it is produced")
        _require(result not in produced,
                 f"tensor {result!r} assigned more than once")
        _check_shapes(op, [tensors[a] for a in args], tensors[result])
        produced.add(result)
        nodes.append(GraphNode(op, args, result))

    for name in tensors:
        _require(name in produced, f"tensor {name!r} is never produced")

    return GraphSpec(tensors, nodes, inputs, outputs)


def _check_shapes(op: str, args: list[Tensor], result: Tensor) -> None:
    def fail(detail: str):
        raise errors.ShapeMismatch(result.name, detail)

    if op != "reduce_sum":
        if len(args) != 2:
            fail(f"{op} takes 2 arguments, got {len(args)}")
        if (args[0].signed, args[0].width) != (args[1].signed, args[1].width):
            fail(f"{op} operands must share a dtype")
    if op == "dot":
        if not (len(args[0].shape) == len(args[1].shape) == 1):
            fail("dot needs 1-D operands")
        if args[0].shape != args[1].shape:
            fail(f"dot lengths differ: {args[0].shape[0]} vs {args[1].shape[0]}")
        if not result.is_scalar:
            fail("dot result must be a scalar")
    elif op == "matmul":
        if len(args[0].shape) != 2 or len(args[1].shape) != 2:
            fail("matmul needs 2-D operands")
        m, k = args[0].shape
        k2, n = args[1].shape
        if k != k2:
            fail(f"matmul inner dims differ: {k} vs {k2}")
        if result.shape != (m, n):
            fail(f"matmul result shape must be {(m, n)}, got {result.shape}")
    elif op in ("ewadd", "ewmul"):
        if args[0].shape != args[1].shape:
            fail(f"{op} operand shapes differ")
        if result.shape != args[0].shape:
            fail(f"{op} result shape must match operands")
    else:  # reduce_sum
        if len(args) != 1:
            fail(f"reduce_sum takes 1 argument, got {len(args)}")
        if not result.is_scalar:
            fail("reduce_sum result must be a scalar")


# ------------------------------------------------------------------ lowering


def lower_graph_to_hir(g: GraphSpec, name: str = "graph") -> HirFunction:
    """Emit one validated HirFunction computing the whole graph."""
    return _GraphLowerer(g, name).run()


class _GraphLowerer:
    def __init__(self, g: GraphSpec, name: str):
        self.g = g
        self.name = name
        self.fresh = 0
        self.locals: list[tuple[str, HirType]] = []
        # tensors that double as inputs and outputs need a distinct out param
        self.out_name: dict[str, str] = {}
        taken = set(g.tensors)
        for t in g.outputs:
            cand = t
            while t in g.inputs and cand in taken:
                cand += "_out" if cand == t else "_"
            taken.add(cand)
            self.out_name[t] = cand

    def loop_var(self) -> str:
        while True:
            v = f"i{self.fresh}"
            self.fresh += 1
            if v not in self.g.tensors:
                return v

    def run(self) -> HirFunction:
        g = self.g
        params = [Param(t, g.tensors[t].hir_type(), "in") for t in g.inputs]
        params += [Param(self.out_name[t], g.tensors[t].hir_type(), "out")
                   for t in g.outputs]
        named = set(g.inputs) | {self.out_name[t] for t in g.outputs}
        for t, tensor in g.tensors.items():
            if t not in named:
                self.locals.append((t, tensor.hir_type()))

        body: list = []
        for node in g.nodes:
            body.extend(self.lower_node(node))
        for t in g.outputs:
            if t in g.inputs:
                body.extend(self.copy(t, self.out_name[t]))

        fn = HirFunction(self.name, params, self.locals, body)
        check(HirProgram({self.name: fn}))
        return fn

    # -- helpers ---------------------------------------------------------------

    def loop(self, bound: int, build_body) -> For:
        v = self.loop_var()
        self.locals.append((v, scalar(True, 32)))
        body = build_body(Var(v))
        return For(v, Const(0), Const(bound), Const(1), body)

    def extended(self, tensor: Tensor, ref_name: str, idx, to: HirType):
        e = Index(ref_name, idx) if idx is not None else Var(ref_name)
        if (tensor.signed, tensor.width) == (to.signed, to.width):
            return e
        return Cast("", to, e)

    def copy(self, src: str, dst: str) -> list:
        tensor = self.g.tensors[src]
        if tensor.is_scalar:
            return [Assign(Var(dst), Var(src))]
        return [self.loop(tensor.elems,
                          lambda i: [Assign(Index(dst, i), Index(src, i))])]

    # -- per-op lowering ---------------------------------------------------------

    def lower_node(self, node: GraphNode) -> list:
        g = self.g
        res = g.tensors[node.result]
        acc_ty = scalar(res.signed, res.width)
        # results are never graph inputs, so the value lives under the plain
        # tensor name on every path (out param or local); args likewise
        rname = node.result
        args = [g.tensors[a] for a in node.args]
        anames = list(node.args)

        if node.op == "dot":
            a, b = args
            an, bn = anames

            def mac(i):
                p = Binary("mul", self.extended(a, an, i, acc_ty),
                           self.extended(b, bn, i, acc_ty))
                return [Assign(Var(rname), Binary("add", Var(rname), p))]

            return [self.loop(a.shape[0], mac)]

        if node.op == "matmul":
            a, b = args
            an, bn = anames
            m, k = a.shape
            _, n = b.shape

            def rows(i):
                def cols(j):
                    def inner(t):
                        def flat(row, width, col):
                            return Binary("add",
                                          Binary("mul", Var(row.name), Const(width)),
                                          Var(col.name))
                        p = Binary("mul",
                                   self.extended(a, an, flat(i, k, t), acc_ty),
                                   self.extended(b, bn, flat(t, n, j), acc_ty))
                        return [Assign(Index(rname, flat(i, n, j)),
                                       Binary("add", Index(rname, flat(i, n, j)), p))]
                    return [self.loop(k, inner)]
                return [self.loop(n, cols)]

            return [self.loop(m, rows)]

        if node.op in ("ewadd", "ewmul"):
            hir_op = "add" if node.op == "ewadd" else "mul"
            a, b = args
            an, bn = anames
            if a.is_scalar:
                e = Binary(hir_op, self.extended(a, an, None, acc_ty),
                           self.extended(b, bn, None, acc_ty))
                return [Assign(Var(rname), e)]

            def ew(i):
                e = Binary(hir_op, self.extended(a, an, i, acc_ty),
                           self.extended(b, bn, i, acc_ty))
                return [Assign(Index(rname, i), e)]

            return [self.loop(a.elems, ew)]

        # reduce_sum
        (a,) = args
        (an,) = anames
        if a.is_scalar:
            return [Assign(Var(rname), self.extended(a, an, None, acc_ty))]

        def step(i):
            return [Assign(Var(rname),
                           Binary("add", Var(rname),
                                  self.extended(a, an, i, acc_ty)))]

        return [self.loop(a.elems, step)]
