"""Recursive-descent parser for the algorithmic subset.

Accepts C-flavored sources (a restricted C/C++ subset: fixed-width integer
types, fixed-size arrays, constant-bound for loops, if/else, assignments,
explicit casts, object-like integer macros, extern "C" wrappers) and the
same grammar with explicit-width type names s1..s64 / u1..u64 for direct
test authoring. Multi-dimensional arrays are linearized row-major here;
scalar returns become an `out_0` parameter.
"""

from __future__ import annotations

from equivfuse import errors
from equivfuse.hir import ast
from equivfuse.hir.lexer import Token, split_directives, tokenize

_BASE_WIDTH = {"char": 8, "short": 16, "int": 32, "long": 64}
_FIXED = {f"int{w}_t": (True, w) for w in (8, 16, 32, 64)}
_FIXED.update({f"uint{w}_t": (False, w) for w in (8, 16, 32, 64)})
_REJECT_TYPES = {"float", "double", "struct", "union", "enum"}
_REJECT_STMTS = {"while", "do", "break", "continue", "switch", "goto"}

_CMP_OPS = {"==": "eq", "!=": "ne", "<": "lt", "<=": "le", ">": "gt", ">=": "ge"}
# binary levels, loosest first
_LEVELS = [
    [("|", "or")],
    [("^", "xor")],
    [("&", "and")],
    [("==", "eq"), ("!=", "ne")],
    [("<", "lt"), ("<=", "le"), (">", "gt"), (">=", "ge")],
    [("<<", "shl"), (">>", "shr")],
    [("+", "add"), ("-", "sub")],
    [("*", "mul"), ("/", "div"), ("%", "mod")],
]


def _width_name(text: str) -> tuple[bool, int] | None:
    """s7/u32 style explicit-width scalar names."""
    if len(text) >= 2 and text[0] in "su" and text[1:].isdigit():
        w = int(text[1:])
        if 1 <= w <= 64:
            return text[0] == "s", w
    return None


class Parser:
    def __init__(self, tokens: list[Token], path: str | None, macros: dict[str, int]):
        self.toks = tokens
        self.pos = 0
        self.path = path
        self.macros = macros

    # -- token plumbing -------------------------------------------------------

    def peek(self, ahead: int = 0) -> Token:
        i = min(self.pos + ahead, len(self.toks) - 1)
        tok = self.toks[i]
        if tok.kind == "id" and tok.text in self.macros:
            return Token("num", tok.text, self.macros[tok.text], tok.line, tok.col)
        return tok

    def next(self) -> Token:
        tok = self.peek()
        self.pos += 1
        return tok

    def at(self, text: str) -> bool:
        return self.peek().text == text and self.peek().kind in ("punct", "id")

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.pos += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        tok = self.peek()
        if tok.text != text:
            raise self.err(f"expected {text!r}, found {tok.text or 'end of input'!r}", tok)
        self.pos += 1
        return tok

    def err(self, msg: str, tok: Token | None = None) -> errors.SyntaxError:
        tok = tok or self.peek()
        return errors.SyntaxError(msg, line=tok.line, col=tok.col, path=self.path)

    def unsupported(self, name: str, tok: Token | None = None) -> errors.UnsupportedConstruct:
        tok = tok or self.peek()
        return errors.UnsupportedConstruct(name, line=tok.line, col=tok.col, path=self.path)

    # -- types ------------------------------------------------------------------

    def looks_like_type(self) -> bool:
        tok = self.peek()
        if tok.kind != "id":
            return False
        t = tok.text
        return (t in ("const", "signed", "unsigned", "void", "bool", "_Bool", "_BitInt")
                or t in _BASE_WIDTH or t in _FIXED or t in _REJECT_TYPES
                or _width_name(t) is not None)

    def parse_scalar_type(self) -> ast.HirType | None:
        """Returns None for void. Raises if no type is present."""
        tok = self.peek()
        if tok.text in _REJECT_TYPES:
            raise self.unsupported(tok.text)
        self.accept("const")
        tok = self.peek()
        if tok.text in _REJECT_TYPES:
            raise self.unsupported(tok.text)
        if self.accept("void"):
            return None
        if self.accept("bool") or self.accept("_Bool"):
            return ast.scalar(False, 1)
        explicit = _width_name(tok.text)
        if explicit and tok.kind == "id":
            self.next()
            return ast.scalar(*explicit)
        if tok.text in _FIXED:
            self.next()
            signed, width = _FIXED[tok.text]
            return ast.scalar(signed, width)
        signed = True
        saw_prefix = False
        if self.accept("unsigned"):
            signed = False
            saw_prefix = True
        elif self.accept("signed"):
            saw_prefix = True
        tok = self.peek()
        if tok.text == "_BitInt":
            self.next()
            self.expect("(")
            w_tok = self.next()
            if w_tok.kind != "num" or not (1 <= (w_tok.value or 0) <= 64):
                raise self.err("_BitInt width must be a constant 1..64", w_tok)
            self.expect(")")
            return ast.scalar(signed, w_tok.value)
        if tok.text in _BASE_WIDTH:
            self.next()
            if tok.text == "long":
                self.accept("long")
            return ast.scalar(signed, _BASE_WIDTH[tok.text])
        if saw_prefix:  # plain "unsigned x" means unsigned int
            return ast.scalar(signed, 32)
        raise self.err(f"expected a type, found {tok.text!r}", tok)

    # -- program ------------------------------------------------------------------

    def parse_program(self) -> ast.HirProgram:
        funcs: dict[str, ast.HirFunction] = {}
        while self.peek().kind != "eof":
            if self.accept("extern"):
                tok = self.peek()
                if tok.kind == "str":  # extern "C"
                    self.next()
                    if self.accept("{"):
                        while not self.accept("}"):
                            f = self.parse_function()
                            self._add(funcs, f)
                        continue
                continue
            if self.accept(";"):
                continue
            f = self.parse_function()
            self._add(funcs, f)
        return ast.HirProgram(funcs)

    def _add(self, funcs: dict, f: ast.HirFunction) -> None:
        if f.name in funcs:
            raise errors.DuplicateDefinition(f"function {f.name!r} defined twice", path=self.path)
        funcs[f.name] = f

    # -- functions -----------------------------------------------------------------

    def parse_function(self) -> ast.HirFunction:
        ret_type = self.parse_scalar_type()
        name_tok = self.next()
        if name_tok.kind != "id":
            raise self.err("expected function name", name_tok)
        self.expect("(")
        self.fn = _FnCtx(name_tok.text)
        if not self.at(")"):
            if not (self.peek().text == "void" and self.peek(1).text == ")"):
                while True:
                    self.parse_param()
                    if not self.accept(","):
                        break
            else:
                self.next()
        self.expect(")")
        out_ret = None
        if ret_type is not None:
            out_ret = ast.Param("out_0", ret_type, "out")
        self.expect("{")
        body = self.parse_block(top_level=True, ret_param=out_ret)
        fn = self.fn
        params = list(fn.params)
        if out_ret is not None:
            if not fn.saw_return:
                raise self.err(f"function {fn.name!r} must end in a return statement")
            params.append(out_ret)
        for p in params:
            if p.type.is_array and p.direction == "in" and fn.written.get(p.name):
                p.direction = "out"
        return ast.HirFunction(fn.name, params, fn.locals, body)

    def parse_param(self) -> None:
        ty = self.parse_scalar_type()
        if ty is None:
            raise self.err("void parameter")
        if self.at("*"):
            raise self.unsupported("pointer parameter")
        by_ref = False
        if self.accept("("):
            self.expect("&")
            by_ref = True
        elif self.accept("&"):
            by_ref = True
        name_tok = self.next()
        if name_tok.kind != "id":
            raise self.err("expected parameter name", name_tok)
        if by_ref and self.at(")"):
            self.expect(")")
        dims = self.parse_dims()
        if by_ref and not dims:
            raise self.unsupported("reference scalar parameter", name_tok)
        if dims:
            total = 1
            for d in dims:
                total *= d
            full = ast.array(ty.signed, ty.width, total)
        else:
            full = ty
        self.fn.declare(name_tok.text, full, dims, self, name_tok)
        # direction: scalars are inputs; arrays default to in, flipped to out
        # after the body reveals writes
        self.fn.params.append(ast.Param(name_tok.text, full, "in"))

    def parse_dims(self) -> list[int]:
        dims: list[int] = []
        while self.accept("["):
            tok = self.peek()
            e = self.parse_expr()
            v = fold_literal(e)
            if v is None:
                raise self.unsupported("dynamic array size", tok)
            if v < 1:
                raise self.err("array dimension must be >= 1", tok)
            dims.append(v)
            self.expect("]")
        return dims

    # -- statements -------------------------------------------------------------

    def parse_block(self, top_level: bool = False, ret_param: ast.Param | None = None) -> list[ast.HirStmt]:
        stmts: list[ast.HirStmt] = []
        while not self.accept("}"):
            tok = self.peek()
            if tok.kind == "eof":
                raise self.err("unexpected end of input (missing '}')")
            if tok.text == "return":
                if not top_level:
                    raise self.unsupported("early return", tok)
                self.next()
                if ret_param is not None:
                    e = self.parse_expr()
                    stmts.append(ast.Assign(
                        ast.Var(ret_param.name, line=tok.line, col=tok.col), e,
                        line=tok.line, col=tok.col))
                    self.fn.saw_return = True
                self.expect(";")
                if not self.at("}"):
                    raise self.unsupported("statements after return", self.peek())
                continue
            stmts.extend(self.parse_stmt())
        return stmts

    def parse_stmt(self) -> list[ast.HirStmt]:
        tok = self.peek()
        if tok.text in _REJECT_STMTS:
            raise self.unsupported(tok.text, tok)
        if tok.text == "return":
            raise self.unsupported("early return", tok)
        if self.accept(";"):
            return []
        if self.accept("{"):
            self.fn.push_scope()
            stmts = self.parse_block()
            self.fn.pop_scope()
            return stmts
        if tok.text == "if":
            return [self.parse_if()]
        if tok.text == "for":
            return [self.parse_for()]
        if self.looks_like_type():
            return self.parse_decl()
        return [self.parse_simple_stmt()]

    def parse_decl(self) -> list[ast.HirStmt]:
        ty = self.parse_scalar_type()
        if ty is None:
            raise self.err("cannot declare void variable")
        stmts: list[ast.HirStmt] = []
        while True:
            name_tok = self.next()
            if name_tok.kind != "id":
                raise self.err("expected variable name", name_tok)
            dims = self.parse_dims()
            if dims:
                total = 1
                for d in dims:
                    total *= d
                full = ast.array(ty.signed, ty.width, total)
            else:
                full = ty
            unique = self.fn.declare(name_tok.text, full, dims, self, name_tok)
            self.fn.locals.append((unique, full))
            if self.accept("="):
                if self.at("{"):
                    raise self.unsupported("array initializer", self.peek())
                e = self.parse_expr()
                if dims:
                    raise self.err("cannot assign a whole array", name_tok)
                stmts.append(ast.Assign(
                    ast.Var(unique, line=name_tok.line, col=name_tok.col),
                    e, line=name_tok.line, col=name_tok.col))
            if not self.accept(","):
                break
        self.expect(";")
        return stmts

    def parse_if(self) -> ast.If:
        tok = self.expect("if")
        self.expect("(")
        cond = self.parse_expr()
        self.expect(")")
        then = self.parse_stmt_or_block()
        orelse: list[ast.HirStmt] = []
        if self.accept("else"):
            orelse = self.parse_stmt_or_block()
        return ast.If(cond, then, orelse, line=tok.line, col=tok.col)

    def parse_stmt_or_block(self) -> list[ast.HirStmt]:
        if self.accept("{"):
            self.fn.push_scope()
            stmts = self.parse_block()
            self.fn.pop_scope()
            return stmts
        return self.parse_stmt()

    def parse_for(self) -> ast.For:
        tok = self.expect("for")
        self.expect("(")
        self.fn.push_scope()
        # init: [type] var = expr
        if self.looks_like_type():
            ty = self.parse_scalar_type()
            if ty is None or ty.is_array:
                raise self.err("loop variable must be scalar")
            name_tok = self.next()
            if name_tok.kind != "id":
                raise self.err("expected loop variable", name_tok)
            unique = self.fn.declare(name_tok.text, ty, [], self, name_tok)
            self.fn.locals.append((unique, ty))
        else:
            name_tok = self.next()
            if name_tok.kind != "id":
                raise self.err("expected loop variable", name_tok)
            res = self.fn.resolve(name_tok.text)
            if res is None:
                raise errors.UseBeforeDecl(
                    f"{name_tok.text!r} used before declaration",
                    line=name_tok.line, col=name_tok.col, path=self.path)
            unique = res[0]
        src = name_tok.text
        self.expect("=")
        init = self.parse_expr()
        self.expect(";")
        # condition: var CMP bound
        cv = self.next()
        if cv.kind != "id" or cv.text != src:
            raise self.err(f"loop condition must test {src!r}", cv)
        op_tok = self.next()
        if op_tok.text not in ("<", "<=", ">", ">="):
            raise self.unsupported(f"loop condition {op_tok.text!r}", op_tok)
        cmp_op = _CMP_OPS[op_tok.text]
        bound = self.parse_expr()
        self.expect(";")
        # update: var++ / ++var / var-- / --var / var += c / var -= c / var = var ± c
        desc_from_update, step = self.parse_for_update(src)
        self.expect(")")
        descending = cmp_op in ("gt", "ge")
        if descending != desc_from_update:
            raise self.unsupported("loop direction mismatch", op_tok)
        body = self.parse_stmt_or_block()
        self.fn.pop_scope()
        self.fn.note_write(unique)
        return ast.For(unique, init, bound, step, body, line=tok.line, col=tok.col,
                       cmp=cmp_op)

    def parse_for_update(self, var: str) -> tuple[bool, ast.HirExpr]:
        tok = self.peek()
        one = ast.Const(1, line=tok.line, col=tok.col)
        if self.accept("++"):
            self.expect(var)
            return False, one
        if self.accept("--"):
            self.expect(var)
            return True, one
        name_tok = self.next()
        if name_tok.kind != "id" or name_tok.text != var:
            raise self.err(f"loop update must modify {var!r}", name_tok)
        if self.accept("++"):
            return False, one
        if self.accept("--"):
            return True, one
        if self.accept("+="):
            return False, self.parse_expr()
        if self.accept("-="):
            return True, self.parse_expr()
        if self.accept("="):
            lhs_tok = self.next()
            if lhs_tok.kind != "id" or lhs_tok.text != var:
                raise self.err(f"loop update must be {var} = {var} ± step", lhs_tok)
            if self.accept("+"):
                return False, self.parse_expr()
            if self.accept("-"):
                return True, self.parse_expr()
            raise self.err("loop update must be var = var ± step")
        raise self.err("unrecognized loop update", name_tok)

    def parse_simple_stmt(self) -> ast.HirStmt:
        tok = self.peek()
        if tok.text in ("++", "--"):
            op = self.next().text
            name_tok = self.next()
            self.expect(";")
            return self._incdec(name_tok, op)
        if tok.kind != "id":
            raise self.err(f"expected a statement, found {tok.text!r}", tok)
        name_tok = self.next()
        if self.peek().text in ("++", "--"):
            op = self.next().text
            self.expect(";")
            return self._incdec(name_tok, op)
        if self.at("("):
            raise self.unsupported("function call", name_tok)
        res = self.fn.resolve(name_tok.text)
        if res is None:
            raise errors.UseBeforeDecl(
                f"{name_tok.text!r} used before declaration",
                line=name_tok.line, col=name_tok.col, path=self.path)
        unique = res[0]
        lvalue: ast.HirExpr = ast.Var(unique, line=name_tok.line, col=name_tok.col)
        if self.at("["):
            lvalue = self.parse_index(name_tok, unique)
        op_tok = self.next()
        compound = {"+=": "add", "-=": "sub", "*=": "mul", "&=": "and",
                    "|=": "or", "^=": "xor", "<<=": "shl", ">>=": "shr"}
        if op_tok.text == "=":
            rhs = self.parse_expr()
        elif op_tok.text in compound:
            rhs = ast.Binary(compound[op_tok.text], _copy_lvalue(lvalue), self.parse_expr(),
                             line=op_tok.line, col=op_tok.col)
        else:
            raise self.err("expected assignment", op_tok)
        self.expect(";")
        self.fn.note_write(unique)
        return ast.Assign(lvalue, rhs, line=name_tok.line, col=name_tok.col)

    def _incdec(self, name_tok: Token, op: str) -> ast.HirStmt:
        if name_tok.kind != "id":
            raise self.err("expected variable", name_tok)
        res = self.fn.resolve(name_tok.text)
        if res is None:
            raise errors.UseBeforeDecl(
                f"{name_tok.text!r} used before declaration",
                line=name_tok.line, col=name_tok.col, path=self.path)
        self.fn.note_write(res[0])
        v = ast.Var(res[0], line=name_tok.line, col=name_tok.col)
        one = ast.Const(1, line=name_tok.line, col=name_tok.col)
        kind = "add" if op == "++" else "sub"
        return ast.Assign(
            _copy_lvalue(v), ast.Binary(kind, v, one, line=name_tok.line, col=name_tok.col),
            line=name_tok.line, col=name_tok.col)

    # -- expressions ---------------------------------------------------------------

    def parse_expr(self) -> ast.HirExpr:
        # logical || / && desugar to bitwise ops over nonzero tests
        e = self.parse_logical_and()
        while self.at("||"):
            tok = self.next()
            rhs = self.parse_logical_and()
            e = ast.Binary("or", _nonzero(e), _nonzero(rhs), line=tok.line, col=tok.col)
        if self.at("?"):
            raise self.unsupported("ternary operator")
        return e

    def parse_logical_and(self) -> ast.HirExpr:
        e = self.parse_binary(0)
        while self.at("&&"):
            tok = self.next()
            rhs = self.parse_binary(0)
            e = ast.Binary("and", _nonzero(e), _nonzero(rhs), line=tok.line, col=tok.col)
        return e

    def parse_binary(self, level: int) -> ast.HirExpr:
        if level >= len(_LEVELS):
            return self.parse_unary()
        e = self.parse_binary(level + 1)
        while True:
            tok = self.peek()
            matched = None
            for text, op in _LEVELS[level]:
                if tok.kind == "punct" and tok.text == text:
                    matched = op
                    break
            if matched is None:
                return e
            self.next()
            if matched == "div":
                raise self.unsupported("division", tok)
            if matched == "mod":
                raise self.unsupported("modulo", tok)
            rhs = self.parse_binary(level + 1)
            e = ast.Binary(matched, e, rhs, line=tok.line, col=tok.col)

    def parse_unary(self) -> ast.HirExpr:
        tok = self.peek()
        if self.accept("-"):
            operand = self.parse_unary()
            if isinstance(operand, ast.Const) and operand.type is None:
                return ast.Const(-operand.value, line=tok.line, col=tok.col)
            return ast.Unary("neg", operand, line=tok.line, col=tok.col)
        if self.accept("+"):
            return self.parse_unary()
        if self.accept("~"):
            return ast.Unary("not", self.parse_unary(), line=tok.line, col=tok.col)
        if self.accept("!"):
            operand = self.parse_unary()
            return ast.Binary("eq", operand, ast.Const(0, line=tok.line, col=tok.col),
                              line=tok.line, col=tok.col)
        if self.at("*"):
            raise self.unsupported("pointer dereference", tok)
        if self.at("&"):
            raise self.unsupported("address-of", tok)
        return self.parse_primary()

    def parse_primary(self) -> ast.HirExpr:
        tok = self.peek()
        if tok.kind == "num":
            self.next()
            return ast.Const(tok.value, line=tok.line, col=tok.col)
        if tok.text == "(":
            self.next()
            if self.looks_like_type():  # type names are reserved, so this is a cast
                ty = self.parse_scalar_type()
                if ty is None:
                    raise self.err("cast to void", tok)
                self.expect(")")
                operand = self.parse_unary()
                return ast.Cast("", ty, operand, line=tok.line, col=tok.col)
            e = self.parse_expr()
            self.expect(")")
            return e
        if tok.kind == "id":
            self.next()
            res = self.fn.resolve(tok.text)
            if self.at("("):
                raise self.unsupported("function call", tok)
            if res is None:
                raise errors.UseBeforeDecl(
                    f"{tok.text!r} used before declaration",
                    line=tok.line, col=tok.col, path=self.path)
            if self.at("["):
                return self.parse_index(tok, res[0])
            return ast.Var(res[0], line=tok.line, col=tok.col)
        raise self.err(f"expected an expression, found {tok.text or 'end of input'!r}", tok)

    def parse_index(self, name_tok: Token, unique: str) -> ast.Index:
        """a[i] / a[i][j]... with row-major linearization against declared dims."""
        dims = self.fn.dims_of(unique)
        if not dims:
            raise errors.TypeMismatch(
                f"{name_tok.text!r} is not an array",
                line=name_tok.line, col=name_tok.col, path=self.path)
        idxs: list[ast.HirExpr] = []
        while self.accept("["):
            idxs.append(self.parse_expr())
            self.expect("]")
        if len(idxs) != len(dims):
            raise self.err(
                f"array {name_tok.text!r} has {len(dims)} dimension(s), got {len(idxs)} index(es)",
                name_tok)
        flat = idxs[0]
        for d, idx in zip(dims[1:], idxs[1:]):
            scale = ast.Const(d, line=name_tok.line, col=name_tok.col)
            flat = ast.Binary("add", ast.Binary("mul", flat, scale), idx,
                              line=name_tok.line, col=name_tok.col)
        return ast.Index(unique, flat, line=name_tok.line, col=name_tok.col)


class _FnCtx:
    """Per-function parse state: lexical scopes, array dims, write tracking.

    Sibling scopes may reuse a name (C allows it; the second binding gets a
    __K suffix in the AST so the validated function stays shadow-free), but
    redeclaring a name that is still live is rejected.
    """

    def __init__(self, name: str):
        self.name = name
        self.params: list[ast.Param] = []
        self.locals: list[tuple[str, ast.HirType]] = []
        self.bindings: dict[str, tuple[str, ast.HirType]] = {}  # source -> (unique, type)
        self.scopes: list[list[str]] = [[]]
        self.counts: dict[str, int] = {}
        self.dims: dict[str, list[int]] = {}  # by unique name
        self.written: dict[str, bool] = {}
        self.saw_return = False

    def push_scope(self) -> None:
        self.scopes.append([])

    def pop_scope(self) -> None:
        for src in self.scopes.pop():
            del self.bindings[src]

    def declare(self, name: str, ty: ast.HirType, dims: list[int], p: Parser, tok: Token) -> str:
        if name in self.bindings:
            raise errors.DuplicateDefinition(
                f"{name!r} already declared", line=tok.line, col=tok.col, path=p.path)
        if _width_name(name):
            raise errors.SyntaxError(
                f"{name!r} is a reserved type name", line=tok.line, col=tok.col, path=p.path)
        n = self.counts.get(name, 0)
        self.counts[name] = n + 1
        unique = name if n == 0 else f"{name}__{n + 1}"
        self.bindings[name] = (unique, ty)
        self.scopes[-1].append(name)
        self.dims[unique] = dims if dims else ([ty.length] if ty.is_array else [])
        return unique

    def resolve(self, name: str) -> tuple[str, ast.HirType] | None:
        return self.bindings.get(name)

    def dims_of(self, unique: str) -> list[int] | None:
        return self.dims.get(unique)

    def note_write(self, unique: str) -> None:
        self.written[unique] = True


def _nonzero(e: ast.HirExpr) -> ast.HirExpr:
    return ast.Binary("ne", e, ast.Const(0, line=e.line, col=e.col), line=e.line, col=e.col)


def _copy_lvalue(e: ast.HirExpr) -> ast.HirExpr:
    if isinstance(e, ast.Var):
        return ast.Var(e.name, line=e.line, col=e.col)
    if isinstance(e, ast.Index):
        return ast.Index(e.array, e.index, line=e.line, col=e.col)
    raise TypeError


def fold_literal(e: ast.HirExpr) -> int | None:
    """Fold an expression of untyped literals to a plain int (macro values,
    array dimensions). Returns None when anything non-literal appears."""
    if isinstance(e, ast.Const) and e.type is None:
        return e.value
    if isinstance(e, ast.Unary) and e.op == "neg":
        v = fold_literal(e.operand)
        return None if v is None else -v
    if isinstance(e, ast.Binary):
        a = fold_literal(e.lhs)
        b = fold_literal(e.rhs)
        if a is None or b is None:
            return None
        if e.op == "add":
            return a + b
        if e.op == "sub":
            return a - b
        if e.op == "mul":
            return a * b
        if e.op == "shl":
            return a << b if 0 <= b <= 64 else None
        if e.op in ("shr", "lshr"):
            return a >> b if 0 <= b <= 64 else None
        if e.op == "and":
            return a & b
        if e.op == "or":
            return a | b
        if e.op == "xor":
            return a ^ b
        if e.op == "eq":
            return int(a == b)
        if e.op == "ne":
            return int(a != b)
        if e.op == "lt":
            return int(a < b)
        if e.op == "le":
            return int(a <= b)
        if e.op == "gt":
            return int(a > b)
        if e.op == "ge":
            return int(a >= b)
    return None


def _fold_macros(defines: list[tuple[str, str, int]], path: str | None) -> dict[str, int]:
    macros: dict[str, int] = {}
    for name, text, line in defines:
        toks = tokenize(text, path, first_line=line)
        sub = Parser(toks, path, macros)
        try:
            e = sub.parse_expr()
        except errors.SyntaxError:
            raise errors.UnsupportedConstruct(
                f"non-integer macro {name!r}", line=line, col=1, path=path)
        if sub.peek().kind != "eof":
            raise errors.UnsupportedConstruct(
                f"non-integer macro {name!r}", line=line, col=1, path=path)
        v = fold_literal(e)
        if v is None:
            raise errors.UnsupportedConstruct(
                f"non-constant macro {name!r}", line=line, col=1, path=path)
        if name in macros:
            raise errors.DuplicateDefinition(f"macro {name!r} redefined", line=line, col=1, path=path)
        macros[name] = v
    return macros


def parse_mini_c(source: str, path: str | None = None) -> ast.HirProgram:
    """Parse source text into an (unvalidated) HIR program."""
    code, defines = split_directives(source, path)
    macros = _fold_macros(defines, path)
    toks = tokenize(code, path)
    parser = Parser(toks, path, macros)
    return parser.parse_program()
