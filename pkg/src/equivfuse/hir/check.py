"""Semantic validation of HIR programs.

Establishes the typing discipline the rest of the pipeline relies on:
every expression gets a concrete scalar type, both operands of a binary
operator have the *same* type (untyped literals adopt their context; any
other width or signedness mixing demands an explicit cast), comparisons
produce u1, loop bounds fold to integers, and every loop is rewritten to
the canonical ascending form. Static array indices are bounds-checked.
Descending source loops become an ascending trip counter plus an index
recomputation at the top of the body.
"""

from __future__ import annotations

from equivfuse import errors
from equivfuse.hir import ast
from equivfuse.hir.parser import fold_literal

_S32 = ast.scalar(True, 32)


def check(program: ast.HirProgram) -> ast.HirProgram:
    for fn in program.functions.values():
        _FnChecker(fn).run()
    return program


class _FnChecker:
    def __init__(self, fn: ast.HirFunction):
        self.fn = fn
        self.table: dict[str, ast.HirType] = {}
        self.out_assigned: set[str] = set()
        self.fresh = 0

    def run(self) -> None:
        fn = self.fn
        for p in fn.params:
            self._declare(p.name, p.type)
        for name, ty in fn.locals:
            self._declare(name, ty)
        fn.body = self.walk_block(fn.body)
        for p in fn.out_params():
            if p.name not in self.out_assigned:
                raise errors.UnassignedOutput(
                    f"output parameter {p.name!r} of {fn.name!r} is never assigned")
        fn.validated = True

    def _declare(self, name: str, ty: ast.HirType) -> None:
        if name in self.table:
            raise errors.DuplicateDefinition(f"{name!r} declared twice")
        self.table[name] = ty

    def fail(self, cls, msg: str, node) -> Exception:
        return cls(msg, line=node.line, col=node.col)

    # -- statements ------------------------------------------------------------

    def walk_block(self, stmts: list[ast.HirStmt]) -> list[ast.HirStmt]:
        out: list[ast.HirStmt] = []
        for s in stmts:
            out.extend(self.walk_stmt(s))
        return out

    def walk_stmt(self, s: ast.HirStmt) -> list[ast.HirStmt]:
        if isinstance(s, ast.Assign):
            self.check_assign(s)
            return [s]
        if isinstance(s, ast.If):
            cond_ty = self.type_expr(s.cond, None)
            if cond_ty != ast.U1:
                raise self.fail(errors.TypeMismatch,
                                f"condition must be u1, got {cond_ty}", s)
            s.then = self.walk_block(s.then)
            s.orelse = self.walk_block(s.orelse)
            return [s]
        if isinstance(s, ast.For):
            return self.normalize_for(s)
        raise TypeError(type(s).__name__)

    def check_assign(self, s: ast.Assign) -> None:
        lv = s.lvalue
        if isinstance(lv, ast.Var):
            ty = self.table.get(lv.name)
            if ty is None:
                raise self.fail(errors.UseBeforeDecl, f"{lv.name!r} undeclared", lv)
            if ty.is_array:
                raise self.fail(errors.TypeMismatch,
                                f"cannot assign whole array {lv.name!r}", lv)
            lv.type = ty
            target = ty
            base = lv.name
        elif isinstance(lv, ast.Index):
            target = self.check_index(lv)
            base = lv.array
        else:
            raise self.fail(errors.TypeMismatch, "invalid assignment target", lv)
        param = _param_or_none(self.fn, base)
        if param is not None:
            if param.type.is_array and param.direction == "in":
                raise self.fail(errors.TypeMismatch,
                                f"write to input array {base!r}", lv)
            if param.direction == "out":
                self.out_assigned.add(base)
        rhs_ty = self.type_expr(s.expr, target)
        if rhs_ty != target:
            raise self.fail(errors.TypeMismatch,
                            f"assigning {rhs_ty} to {target}", s)

    def normalize_for(self, s: ast.For) -> list[ast.HirStmt]:
        var_ty = self.table.get(s.var)
        if var_ty is None:
            raise self.fail(errors.UseBeforeDecl, f"loop variable {s.var!r} undeclared", s)
        if var_ty.is_array:
            raise self.fail(errors.TypeMismatch, "loop variable must be scalar", s)

        def fold(e, what: str) -> int:
            if isinstance(e, int):
                return e
            v = fold_literal(e)
            if v is None:
                raise self.fail(errors.NonConstantBound,
                                f"loop {what} must be a compile-time constant", s)
            return v

        init = fold(s.lower, "start")
        bound = fold(s.upper, "bound")
        step = fold(s.step, "step")
        if step < 1:
            raise self.fail(errors.UnsupportedConstruct, "non-positive loop step", s)
        s.var_type = var_ty

        if s.cmp in ("lt", "le"):
            upper = bound + 1 if s.cmp == "le" else bound
            trip = max(0, -(-(upper - init) // step))  # ceil div
            if trip == 0:
                return self._zero_trip(s, var_ty, init)
            last = init + (trip - 1) * step
            self._fit(init, var_ty, s)
            self._fit(last, var_ty, s)
            s.lower, s.upper, s.step, s.cmp = init, last + 1, step, "lt"
            s.body = self.walk_block(s.body)
            return [s]

        # descending: values init, init-step, ... down to (>= or >) bound
        if s.cmp == "ge":
            trip = (init - bound) // step + 1 if init >= bound else 0
        else:
            trip = -(-(init - bound) // step) if init > bound else 0
        if trip == 0:
            return self._zero_trip(s, var_ty, init)
        last = init - (trip - 1) * step
        self._fit(init, var_ty, s)
        self._fit(last, var_ty, s)
        counter = f"{s.var}__n{self.fresh}"
        self.fresh += 1
        self._declare(counter, var_ty)
        self.fn.locals.append((counter, var_ty))
        recompute = ast.Assign(
            ast.Var(s.var, line=s.line, col=s.col, type=var_ty),
            ast.Binary(
                "sub",
                _typed_const(init, var_ty, s),
                ast.Binary("mul",
                           ast.Var(counter, line=s.line, col=s.col, type=var_ty),
                           _typed_const(step, var_ty, s),
                           line=s.line, col=s.col, type=var_ty),
                line=s.line, col=s.col, type=var_ty),
            line=s.line, col=s.col)
        s.var = counter
        s.lower, s.upper, s.step, s.cmp = 0, trip, 1, "lt"
        s.body = [recompute] + s.body
        self._fit(trip - 1, var_ty, s)
        s.body = self.walk_block(s.body)
        return [s]

    def _zero_trip(self, s: ast.For, var_ty: ast.HirType, init: int) -> list[ast.HirStmt]:
        # C still runs the init assignment even when the body never does
        self._fit(init, var_ty, s)
        assign = ast.Assign(
            ast.Var(s.var, line=s.line, col=s.col, type=var_ty),
            _typed_const(init, var_ty, s), line=s.line, col=s.col)
        return [assign]

    def _fit(self, value: int, ty: ast.HirType, node) -> None:
        lo = -(1 << (ty.width - 1)) if ty.signed else 0
        hi = (1 << ty.width) - 1  # unsigned-fit masks are tolerated for signed too
        if not (lo <= value <= hi):
            raise self.fail(errors.TypeMismatch,
                            f"loop value {value} does not fit {ty}", node)

    # -- expressions -------------------------------------------------------------

    def type_expr(self, e: ast.HirExpr, ctx: ast.HirType | None) -> ast.HirType:
        ty = self._type_expr(e, ctx)
        e.type = ty
        return ty

    def _type_expr(self, e: ast.HirExpr, ctx: ast.HirType | None) -> ast.HirType:
        if isinstance(e, ast.Const):
            if e.type is not None:
                return e.type
            ty = ctx if (ctx is not None and not ctx.is_array) else _S32
            self._literal_fits(e.value, ty, e)
            e.value &= (1 << ty.width) - 1
            return ty
        if isinstance(e, ast.Var):
            ty = self.table.get(e.name)
            if ty is None:
                raise self.fail(errors.UseBeforeDecl, f"{e.name!r} undeclared", e)
            if ty.is_array:
                raise self.fail(errors.TypeMismatch,
                                f"array {e.name!r} used as a scalar", e)
            return ty
        if isinstance(e, ast.Index):
            return self.check_index(e)
        if isinstance(e, ast.Binary):
            return self.type_binary(e, ctx)
        if isinstance(e, ast.Unary):
            ty = self.type_expr(e.operand, ctx)
            return ty
        if isinstance(e, ast.Cast):
            src_ty = self.type_expr(e.operand, e.to)
            to = e.to
            if to.width < src_ty.width:
                e.kind = "trunc"
            elif to.width > src_ty.width:
                e.kind = "sext" if src_ty.signed else "zext"
            else:
                e.kind = "trunc"  # same-width reinterpret
            return to
        raise TypeError(type(e).__name__)

    def check_index(self, e: ast.Index) -> ast.HirType:
        arr = self.table.get(e.array)
        if arr is None:
            raise self.fail(errors.UseBeforeDecl, f"array {e.array!r} undeclared", e)
        if not arr.is_array:
            raise self.fail(errors.TypeMismatch, f"{e.array!r} is not an array", e)
        idx_ty = self.type_expr(e.index, _S32)
        if idx_ty.is_array:
            raise self.fail(errors.TypeMismatch, "array index must be scalar", e)
        idx = e.index
        if isinstance(idx, ast.Const):
            v = idx.value
            if idx.type.signed and v >> (idx.type.width - 1):
                v -= 1 << idx.type.width
            if not (0 <= v < arr.length):
                raise self.fail(
                    errors.StaticOutOfBounds,
                    f"index {v} out of bounds for {e.array!r} (length {arr.length})", e)
        e.type = arr.elem()
        return e.type

    def type_binary(self, e: ast.Binary, ctx: ast.HirType | None = None) -> ast.HirType:
        op = e.op
        if op in ("shl", "shr", "lshr", "ashr"):
            lty = self.type_expr(e.lhs, ctx)
            rty = self.type_expr(e.rhs, lty)
            if rty != lty:
                raise self.fail(errors.TypeMismatch,
                                f"shift amount type {rty} differs from value type {lty} "
                                "(insert an explicit cast)", e)
            if op == "shr":
                e.op = "ashr" if lty.signed else "lshr"
            return lty

        if op in ast.COMPARISONS:
            self._unify(e, None)
            return ast.U1
        lty, _ = self._unify(e, ctx)
        if op in ("add", "sub", "mul", "and", "or", "xor"):
            return lty
        raise self.fail(errors.TypeMismatch, f"unknown operator {op!r}", e)

    def _unify(self, e: ast.Binary,
               ctx: ast.HirType | None) -> tuple[ast.HirType, ast.HirType]:
        if ctx is not None and ctx.is_array:
            ctx = None
        l_lit = _is_untyped_literal(e.lhs)
        r_lit = _is_untyped_literal(e.rhs)
        if l_lit and not r_lit:
            rty = self.type_expr(e.rhs, ctx)
            lty = self.type_expr(e.lhs, rty)
        elif r_lit and not l_lit:
            lty = self.type_expr(e.lhs, ctx)
            rty = self.type_expr(e.rhs, lty)
        else:
            # both literals adopt the context type; for non-literal sides the
            # context only reaches untyped constants in nested subtrees
            lty = self.type_expr(e.lhs, ctx)
            rty = self.type_expr(e.rhs, lty if l_lit else ctx)
        if lty != rty:
            raise self.fail(
                errors.TypeMismatch,
                f"operand types {lty} and {rty} differ (insert an explicit cast)", e)
        return lty, rty

    def _literal_fits(self, value: int, ty: ast.HirType, node) -> None:
        # Negative literals must fit the signed range; non-negative literals
        # may use the full unsigned range even for signed types (mask idiom).
        lo = -(1 << (ty.width - 1))
        hi = (1 << ty.width) - 1
        if not ty.signed:
            lo = 0
        if not (lo <= value <= hi):
            raise self.fail(errors.TypeMismatch,
                            f"literal {value} does not fit {ty}", node)


def _param_or_none(fn: ast.HirFunction, name: str) -> ast.Param | None:
    for p in fn.params:
        if p.name == name:
            return p
    return None


def _is_untyped_literal(e: ast.HirExpr) -> bool:
    if isinstance(e, ast.Unary):  # ~3 and -(3) stay adoptable
        return _is_untyped_literal(e.operand)
    return isinstance(e, ast.Const) and e.type is None


def _typed_const(value: int, ty: ast.HirType, node) -> ast.Const:
    return ast.Const(value & ((1 << ty.width) - 1),
                     line=node.line, col=node.col, type=ty)
