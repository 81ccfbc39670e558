"""Lowering from the algorithmic frontend to the word-level core IR.

The pipeline symbolically executes a validated function: loops are fully
unrolled (bounds are compile-time constants by construction), scalars and
flattened array elements become SSA values, if/else writes merge through
muxes, and dynamic array accesses turn into balanced mux trees (reads) or
per-element enable muxes (writes). Array parameters travel as single packed
ports, element 0 in the least-significant bits.

Dynamic indices wrap modulo the array length here; the reference
interpreter instead reports them as errors. Agreement between the two is
therefore only promised for executions that stay in bounds.
"""

from __future__ import annotations

from equivfuse import errors
from equivfuse.core.module import Builder, CoreModule, mask
from equivfuse.hir import ast

STMT_LIMIT = 1 << 20

_CMP_UNSIGNED = {"lt": "ult", "le": "ule"}
_CMP_SIGNED = {"lt": "slt", "le": "sle"}


def lower_hir(fn: ast.HirFunction, name: str | None = None,
              stmt_limit: int = STMT_LIMIT) -> CoreModule:
    """Compile a checked function into a combinational CoreModule.

    Port names mirror parameter names. An array parameter of N elements of
    W bits becomes one N*W-bit port.
    """
    if not fn.validated:
        raise ValueError("lower_hir needs a checked function (run check first)")
    return _Lowerer(fn, name or fn.name, stmt_limit).run()


class _Lowerer:
    def __init__(self, fn: ast.HirFunction, name: str, stmt_limit: int):
        self.fn = fn
        self.b = Builder(name)
        self.env: dict[str, int | list[int]] = {}
        self.steps = 0
        self.limit = stmt_limit

    def run(self) -> CoreModule:
        b = self.b
        for p in self.fn.params:
            ty = p.type
            if p.direction == "in":
                if ty.is_array:
                    port = b.add_in_port(p.name, ty.width * ty.length)
                    self.env[p.name] = [
                        b.extract(port, (i + 1) * ty.width - 1, i * ty.width)
                        for i in range(ty.length)
                    ]
                else:
                    self.env[p.name] = b.add_in_port(p.name, ty.width)
            else:
                zero = b.const(0, ty.width)
                self.env[p.name] = [zero] * ty.length if ty.is_array else zero
        for name, ty in self.fn.locals:
            zero = b.const(0, ty.width)
            self.env[name] = [zero] * ty.length if ty.is_array else zero

        self.exec_block(self.fn.body)

        for p in self.fn.out_params():
            ty = p.type
            if ty.is_array:
                elems = self.env[p.name]
                b.add_out_port(p.name, ty.width * ty.length, b.concat(*reversed(elems)))
            else:
                b.add_out_port(p.name, ty.width, self.env[p.name])
        return b.finish()

    # -- statements ------------------------------------------------------------

    def exec_block(self, stmts: list[ast.HirStmt]) -> None:
        for s in stmts:
            self.exec_stmt(s)

    def exec_stmt(self, s: ast.HirStmt) -> None:
        self.steps += 1
        if self.steps > self.limit:
            raise errors.TripCountOverflow(
                self.limit, f"unrolled statement budget exceeded in {self.fn.name!r}")
        if isinstance(s, ast.Assign):
            self.exec_assign(s)
        elif isinstance(s, ast.If):
            self.exec_if(s)
        elif isinstance(s, ast.For):
            w = s.var_type.width
            for v in range(s.lower, s.upper, s.step):
                self.env[s.var] = self.b.const(v & mask(w), w)
                self.exec_block(s.body)
        else:
            raise TypeError(f"unexpected statement {type(s).__name__}")

    def exec_assign(self, s: ast.Assign) -> None:
        b = self.b
        val = self.eval(s.expr)
        lv = s.lvalue
        if isinstance(lv, ast.Var):
            self.env[lv.name] = val
            return
        elems = list(self.env[lv.array])
        n = len(elems)
        idx = self.eval(lv.index)
        iv = b.const_value(idx)
        if iv is not None:
            elems[iv % n] = val
        else:
            idxm = b.mod_const(idx, n)
            iw = b.width(idxm)
            for k in range(n):
                hit = b.eq(idxm, b.const(k, iw))
                elems[k] = b.mux(hit, val, elems[k])
        self.env[lv.array] = elems

    def exec_if(self, s: ast.If) -> None:
        b = self.b
        cond = self.eval(s.cond)
        cv = b.const_value(cond)
        if cv is not None:
            self.exec_block(s.then if cv else s.orelse)
            return
        snapshot = {k: (list(v) if isinstance(v, list) else v)
                    for k, v in self.env.items()}
        self.exec_block(s.then)
        then_env = self.env
        self.env = snapshot
        self.exec_block(s.orelse)
        merged: dict[str, int | list[int]] = {}
        for k, tv in then_env.items():
            ev = self.env[k]
            if isinstance(tv, list):
                merged[k] = [b.mux(cond, t, e) for t, e in zip(tv, ev)]
            else:
                merged[k] = b.mux(cond, tv, ev)
        self.env = merged

    # -- expressions -----------------------------------------------------------

    def eval(self, e: ast.HirExpr) -> int:
        b = self.b
        w = e.type.width
        if isinstance(e, ast.Const):
            return b.const(e.value & mask(w), w)
        if isinstance(e, ast.Var):
            return self.env[e.name]
        if isinstance(e, ast.Index):
            elems = self.env[e.array]
            idx = self.eval(e.index)
            iv = b.const_value(idx)
            if iv is not None:
                return elems[iv % len(elems)]
            return b.select(idx, elems)
        if isinstance(e, ast.Unary):
            v = self.eval(e.operand)
            if e.op == "neg":
                return b.sub(b.const(0, w), v)
            return b.not_(v)
        if isinstance(e, ast.Cast):
            v = self.eval(e.operand)
            vw = b.width(v)
            if e.kind == "zext":
                return b.zext(v, w)
            if e.kind == "sext":
                return b.sext(v, w)
            return b.extract(v, w - 1, 0) if w < vw else v
        if isinstance(e, ast.Binary):
            return self.eval_binary(e)
        raise TypeError(f"unexpected expression {type(e).__name__}")

    def eval_binary(self, e: ast.Binary) -> int:
        b = self.b
        op = e.op
        lhs = self.eval(e.lhs)
        rhs = self.eval(e.rhs)
        if op in ("add", "sub", "mul", "and", "or", "xor"):
            return {"add": b.add, "sub": b.sub, "mul": b.mul,
                    "and": b.and_, "or": b.or_, "xor": b.xor}[op](lhs, rhs)
        if op in ("shl", "lshr", "ashr"):
            # frontend shifts take the amount modulo the operand width
            w = b.width(lhs)
            amt = b.resize_unsigned(b.mod_const(rhs, w), w)
            return b.shift(op, lhs, amt)
        signed = e.lhs.type.signed
        if op == "eq":
            return b.eq(lhs, rhs)
        if op == "ne":
            return b.not_(b.eq(lhs, rhs))
        if op in ("gt", "ge"):
            lhs, rhs = rhs, lhs
            op = {"gt": "lt", "ge": "le"}[op]
        kind = (_CMP_SIGNED if signed else _CMP_UNSIGNED)[op]
        return b.compare(kind, lhs, rhs)
