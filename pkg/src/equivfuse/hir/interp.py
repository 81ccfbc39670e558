"""Reference interpreter for validated HIR functions.

Defines the ground-truth semantics every other path (lowering, bit-level
encodings, solver replay) is measured against: two's-complement modular
arithmetic at each expression's result width, shift amounts reduced modulo
the operand width, array indices checked at runtime.

Inputs and outputs are keyed by parameter name; scalar values are ints,
array values are lists of ints (element 0 first).
"""

from __future__ import annotations

from equivfuse import errors
from equivfuse.hir import ast


def _mask(w: int) -> int:
    return (1 << w) - 1


def _signed(v: int, w: int) -> int:
    return v - (1 << w) if v >> (w - 1) else v


def interpret(fn: ast.HirFunction, inputs: dict) -> dict:
    if not fn.validated:
        raise ValueError(f"function {fn.name!r} has not been validated")
    scalars: dict[str, int] = {}
    arrays: dict[str, list[int]] = {}

    for p in fn.params:
        if p.direction == "in":
            if p.name not in inputs:
                raise KeyError(f"missing input {p.name!r}")
            v = inputs[p.name]
            if p.type.is_array:
                if len(v) != p.type.length:
                    raise ValueError(f"{p.name!r} expects {p.type.length} elements")
                arrays[p.name] = [x & _mask(p.type.width) for x in v]
            else:
                scalars[p.name] = v & _mask(p.type.width)
        else:
            if p.type.is_array:
                arrays[p.name] = [0] * p.type.length
            else:
                scalars[p.name] = 0
    for name, ty in fn.locals:
        if ty.is_array:
            arrays[name] = [0] * ty.length
        else:
            scalars[name] = 0

    _exec_block(fn.body, scalars, arrays)

    result: dict = {}
    for p in fn.out_params():
        result[p.name] = list(arrays[p.name]) if p.type.is_array else scalars[p.name]
    return result


def _exec_block(stmts: list[ast.HirStmt], scalars: dict, arrays: dict) -> None:
    for s in stmts:
        if isinstance(s, ast.Assign):
            v = _eval(s.expr, scalars, arrays)
            lv = s.lvalue
            if isinstance(lv, ast.Var):
                scalars[lv.name] = v
            else:
                arr = arrays[lv.array]
                i = _index_value(lv, scalars, arrays)
                arr[i] = v
        elif isinstance(s, ast.If):
            if _eval(s.cond, scalars, arrays):
                _exec_block(s.then, scalars, arrays)
            else:
                _exec_block(s.orelse, scalars, arrays)
        elif isinstance(s, ast.For):
            m = _mask(s.var_type.width)
            for raw in range(s.lower, s.upper, s.step):
                scalars[s.var] = raw & m
                _exec_block(s.body, scalars, arrays)
        else:
            raise TypeError(type(s).__name__)


def _index_value(e: ast.Index, scalars: dict, arrays: dict) -> int:
    idx = _eval(e.index, scalars, arrays)
    ty = e.index.type
    v = _signed(idx, ty.width) if ty.signed else idx
    length = len(arrays[e.array])
    if not (0 <= v < length):
        raise errors.DynamicOutOfBounds(v, length, e.array)
    return v


def _eval(e: ast.HirExpr, scalars: dict, arrays: dict) -> int:
    if isinstance(e, ast.Const):
        return e.value
    if isinstance(e, ast.Var):
        return scalars[e.name]
    if isinstance(e, ast.Index):
        return arrays[e.array][_index_value(e, scalars, arrays)]
    if isinstance(e, ast.Binary):
        a = _eval(e.lhs, scalars, arrays)
        b = _eval(e.rhs, scalars, arrays)
        ty = e.lhs.type
        w = ty.width
        m = _mask(w)
        op = e.op
        if op == "add":
            return (a + b) & m
        if op == "sub":
            return (a - b) & m
        if op == "mul":
            return (a * b) & m
        if op == "and":
            return a & b
        if op == "or":
            return a | b
        if op == "xor":
            return a ^ b
        if op == "shl":
            return (a << (b % w)) & m
        if op == "lshr":
            return a >> (b % w)
        if op == "ashr":
            return (_signed(a, w) >> (b % w)) & m
        if op == "eq":
            return int(a == b)
        if op == "ne":
            return int(a != b)
        sa = _signed(a, w) if ty.signed else a
        sb = _signed(b, w) if ty.signed else b
        if op == "lt":
            return int(sa < sb)
        if op == "le":
            return int(sa <= sb)
        if op == "gt":
            return int(sa > sb)
        if op == "ge":
            return int(sa >= sb)
        raise ValueError(f"unvalidated operator {op!r}")
    if isinstance(e, ast.Unary):
        v = _eval(e.operand, scalars, arrays)
        w = e.type.width
        if e.op == "not":
            return ~v & _mask(w)
        if e.op == "neg":
            return -v & _mask(w)
        raise ValueError(e.op)
    if isinstance(e, ast.Cast):
        v = _eval(e.operand, scalars, arrays)
        to_w = e.to.width
        if e.kind == "trunc":
            return v & _mask(to_w)
        if e.kind == "zext":
            return v
        if e.kind == "sext":
            return _signed(v, e.operand.type.width) & _mask(to_w)
        raise ValueError(e.kind)
    raise TypeError(type(e).__name__)
