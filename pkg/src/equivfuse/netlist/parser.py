"""Structural Verilog subset parser.

Accepts the shape a synthesizer writes for a mapped netlist: module headers
(ANSI or classic port lists), wire/input/output declarations with ranges,
named-port cell instances, and assigns whose sides are identifiers,
bit-selects, part-selects, concatenations or sized constants. Attributes
`(* ... *)` and comments are skipped. Behavioral constructs are rejected
with UnsupportedConstruct rather than misparsed.

Modules whose names collide with a library cell (the simulation models that
usually ride along in cmos_cells.v) are skipped wholesale with a warning;
the built-in library semantics win. Their bodies may therefore use the full
language, since we never look inside.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

from equivfuse import errors
from equivfuse.netlist.cells import DEFAULT_LIBRARY, CellLibrary

_BEHAVIORAL = {
    "always", "initial", "reg", "parameter", "localparam", "generate",
    "genvar", "inout", "tri", "specify", "function", "task", "defparam",
    "integer", "real", "event", "casez", "casex", "supply0", "supply1",
    "if", "else", "begin", "end", "case", "endcase", "posedge", "negedge",
    "for", "while", "repeat", "forever", "wait", "fork", "join",
}

# single-char operators tokenize so that skipped cell-model bodies lex
# cleanly; the parser rejects them where the subset does not allow them
_PUNCT = ("<=", "(", ")", "[", "]", "{", "}", ":", ";", ",", ".", "=", "*",
          "@", "#", "~", "&", "|", "^", "+", "-", "/", "<", ">", "?", "!")


@dataclass(frozen=True)
class Tok:
    kind: str  # "id" | "num" | "const" | "punct" | "eof"
    text: str
    line: int
    col: int
    value: int = 0
    width: int = 0  # sized constants only


def tokenize(source: str, path: str | None = None) -> list[Tok]:
    toks: list[Tok] = []
    i, line, col = 0, 1, 1
    n = len(source)

    def error(msg, l=None, c=None):
        return errors.SyntaxError(msg, line=l or line, col=c or col, path=path)

    def advance(text: str):
        nonlocal line, col
        for ch in text:
            if ch == "\n":
                line += 1
                col = 1
            else:
                col += 1

    while i < n:
        c = source[i]
        if c in " \t\r\n\f":
            advance(c)
            i += 1
            continue
        if source.startswith("//", i):
            j = source.find("\n", i)
            i = n if j < 0 else j
            continue
        if source.startswith("/*", i):
            j = source.find("*/", i + 2)
            if j < 0:
                raise error("unterminated comment")
            advance(source[i:j + 2])
            i = j + 2
            continue
        if source.startswith("(*", i) and not source.startswith("(*)", i):
            # attribute; contents skipped, quoted strings may hide "*)"
            j = i + 2
            while j < n:
                if source[j] == '"':
                    k = source.find('"', j + 1)
                    if k < 0:
                        raise error("unterminated string in attribute")
                    j = k + 1
                elif source.startswith("*)", j):
                    break
                else:
                    j += 1
            if j >= n:
                raise error("unterminated attribute")
            advance(source[i:j + 2])
            i = j + 2
            continue
        if c == "\\":
            raise errors.UnsupportedConstruct(
                "escaped identifier", line=line, col=col, path=path)
        if c == "`":
            raise errors.UnsupportedConstruct(
                "compiler directive", line=line, col=col, path=path)
        if c.isalpha() or c in "_$":
            j = i
            while j < n and (source[j].isalnum() or source[j] in "_$"):
                j += 1
            toks.append(Tok("id", source[i:j], line, col))
            advance(source[i:j])
            i = j
            continue
        if c.isdigit() or c == "'":
            start_line, start_col = line, col
            j = i
            while j < n and (source[j].isdigit() or source[j] == "_"):
                j += 1
            if j < n and source[j] == "'":
                size_txt = source[i:j].replace("_", "")
                if not size_txt:
                    raise error("based constant needs an explicit size")
                j += 1
                if j >= n or source[j] not in "bBoOdDhH":
                    if j < n and source[j] in "xXzZ":
                        raise errors.UnsupportedConstruct(
                            "x/z constant", line=line, col=col, path=path)
                    raise error("bad base in sized constant")
                base = {"b": 2, "o": 8, "d": 10, "h": 16}[source[j].lower()]
                j += 1
                k = j
                while k < n and (source[k].isalnum() or source[k] == "_"):
                    k += 1
                digits = source[j:k].replace("_", "")
                if any(ch in "xXzZ?" for ch in digits):
                    raise errors.UnsupportedConstruct(
                        "x/z constant", line=line, col=col, path=path)
                try:
                    value = int(digits, base)
                except ValueError:
                    raise error(f"bad digits in sized constant {source[i:k]!r}")
                width = int(size_txt)
                if width < 1:
                    raise error("zero-width constant")
                toks.append(Tok("const", source[i:k], start_line, start_col,
                                value=value & ((1 << width) - 1), width=width))
                advance(source[i:k])
                i = k
                continue
            text = source[i:j].replace("_", "")
            if not text:
                raise error("unsized based constant")
            toks.append(Tok("num", source[i:j], line, col, value=int(text)))
            advance(source[i:j])
            i = j
            continue
        for p in _PUNCT:
            if source.startswith(p, i):
                toks.append(Tok("punct", p, line, col))
                advance(p)
                i += len(p)
                break
        else:
            raise error(f"unexpected character {c!r}")
    toks.append(Tok("eof", "", line, col))
    return toks


# --- syntax tree ---------------------------------------------------------------


@dataclass(frozen=True)
class Ref:
    name: str
    line: int = 0
    col: int = 0


@dataclass(frozen=True)
class BitSel:
    name: str
    index: int
    line: int = 0
    col: int = 0


@dataclass(frozen=True)
class PartSel:
    name: str
    msb: int
    lsb: int
    line: int = 0
    col: int = 0


@dataclass(frozen=True)
class ConstBits:
    width: int
    value: int
    line: int = 0
    col: int = 0


@dataclass(frozen=True)
class Concat:
    parts: tuple  # MSB-first, as written
    line: int = 0
    col: int = 0


NetExpr = Ref | BitSel | PartSel | ConstBits | Concat


@dataclass
class PortDecl:
    name: str
    msb: int
    lsb: int
    direction: str  # "in" | "out"
    line: int = 0

    @property
    def width(self) -> int:
        return self.msb - self.lsb + 1


@dataclass
class WireDecl:
    name: str
    msb: int
    lsb: int

    @property
    def width(self) -> int:
        return self.msb - self.lsb + 1


@dataclass
class Instance:
    cell: str
    name: str
    pins: dict[str, NetExpr | None]  # None = explicitly unconnected .P()
    line: int = 0
    col: int = 0


@dataclass
class AssignStmt:
    lhs: NetExpr
    rhs: NetExpr
    line: int = 0
    col: int = 0


@dataclass
class NetlistModule:
    name: str
    ports: list[PortDecl] = field(default_factory=list)
    wires: list[WireDecl] = field(default_factory=list)
    instances: list[Instance] = field(default_factory=list)
    assigns: list[AssignStmt] = field(default_factory=list)

    def port(self, name: str) -> PortDecl | None:
        for p in self.ports:
            if p.name == name:
                return p
        return None


# --- parser --------------------------------------------------------------------


class _Parser:
    def __init__(self, toks: list[Tok], path: str | None):
        self.toks = toks
        self.pos = 0
        self.path = path

    def peek(self) -> Tok:
        return self.toks[self.pos]

    def next(self) -> Tok:
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def at(self, text: str) -> bool:
        t = self.peek()
        return t.text == text and t.kind in ("punct", "id")

    def eat(self, text: str) -> bool:
        if self.at(text):
            self.pos += 1
            return True
        return False

    def expect(self, text: str) -> Tok:
        t = self.next()
        if t.text != text:
            raise self.error(f"expected {text!r}, found {t.text or 'end of file'!r}", t)
        return t

    def error(self, msg: str, t: Tok | None = None):
        t = t or self.peek()
        return errors.SyntaxError(msg, line=t.line, col=t.col, path=self.path)

    def unsupported(self, what: str, t: Tok | None = None):
        t = t or self.peek()
        return errors.UnsupportedConstruct(what, line=t.line, col=t.col, path=self.path)

    def ident(self, what: str = "identifier") -> Tok:
        t = self.next()
        if t.kind != "id":
            raise self.error(f"expected {what}, found {t.text or 'end of file'!r}", t)
        if t.text in _BEHAVIORAL:
            raise self.unsupported(t.text, t)
        return t

    def number(self) -> int:
        t = self.next()
        if t.kind != "num":
            raise self.error("expected a plain number", t)
        return t.value

    # -- module structure -------------------------------------------------------

    def parse_modules(self, lib: CellLibrary) -> list[NetlistModule]:
        mods: list[NetlistModule] = []
        while self.peek().kind != "eof":
            t = self.peek()
            if t.text != "module":
                if t.kind == "id" and t.text in _BEHAVIORAL:
                    raise self.unsupported(t.text, t)
                raise self.error("expected 'module'", t)
            self.next()
            name_tok = self.ident("module name")
            if name_tok.text in lib:
                self.skip_module()
                warnings.warn(
                    f"module {name_tok.text!r} collides with a library cell; "
                    "using library semantics", stacklevel=3)
                continue
            mods.append(self.parse_module(name_tok.text))
        return mods

    def skip_module(self) -> None:
        while True:
            t = self.next()
            if t.kind == "eof":
                raise self.error("missing 'endmodule'", t)
            if t.kind == "id" and t.text == "endmodule":
                return

    def parse_module(self, name: str) -> NetlistModule:
        m = NetlistModule(name)
        header: list[str] = []
        if self.eat("("):
            if not self.at(")"):
                while True:
                    header.append(self.parse_header_port(m))
                    if not self.eat(","):
                        break
            self.expect(")")
        self.expect(";")
        while not self.eat("endmodule"):
            self.parse_item(m, header)
        for p in m.ports:
            if p.direction == "":
                raise self.error(f"port {p.name!r} has no direction")
        return m

    def parse_header_port(self, m: NetlistModule) -> str:
        t = self.peek()
        if t.text in ("input", "output"):
            self.next()
            direction = "in" if t.text == "input" else "out"
            msb, lsb = self.parse_range()
            name = self.ident("port name").text
            if m.port(name):
                raise self.error(f"port {name!r} declared twice", t)
            m.ports.append(PortDecl(name, msb, lsb, direction, line=t.line))
            return name
        name = self.ident("port name").text
        if m.port(name):
            raise self.error(f"port {name!r} declared twice", t)
        m.ports.append(PortDecl(name, 0, 0, "", line=t.line))  # range set later
        return name

    def parse_range(self) -> tuple[int, int]:
        if not self.eat("["):
            return 0, 0
        t = self.peek()
        msb = self.number()
        self.expect(":")
        lsb = self.number()
        self.expect("]")
        if msb < lsb:
            raise self.unsupported("ascending bit range", t)
        return msb, lsb

    def parse_item(self, m: NetlistModule, header: list[str]) -> None:
        t = self.peek()
        if t.kind == "eof":
            raise self.error("missing 'endmodule'", t)
        if t.kind != "id":
            raise self.error(f"unexpected {t.text!r}", t)
        if t.text in _BEHAVIORAL:
            raise self.unsupported(t.text, t)
        if t.text in ("input", "output"):
            self.parse_port_decl(m, header)
        elif t.text == "wire":
            self.parse_wire_decl(m)
        elif t.text == "assign":
            self.parse_assign(m)
        elif t.text == "module":
            raise self.error("nested module", t)
        else:
            self.parse_instance(m)

    def parse_port_decl(self, m: NetlistModule, header: list[str]) -> None:
        t = self.next()
        direction = "in" if t.text == "input" else "out"
        msb, lsb = self.parse_range()
        while True:
            name_tok = self.ident("port name")
            port = m.port(name_tok.text)
            if port is None or name_tok.text not in header:
                raise self.error(f"{name_tok.text!r} is not a module port", name_tok)
            if port.direction:
                raise self.error(f"port {name_tok.text!r} declared twice", name_tok)
            port.msb, port.lsb, port.direction = msb, lsb, direction
            if not self.eat(","):
                break
        self.expect(";")

    def parse_wire_decl(self, m: NetlistModule) -> None:
        self.next()
        msb, lsb = self.parse_range()
        declared = {w.name for w in m.wires}
        while True:
            name_tok = self.ident("wire name")
            name = name_tok.text
            port = m.port(name)
            if port is not None:
                # redundant wire decl for a port is legal if ranges agree
                if port.direction and (port.msb, port.lsb) != (msb, lsb):
                    raise self.error(
                        f"wire {name!r} conflicts with port range", name_tok)
            elif name in declared:
                raise self.error(f"wire {name!r} declared twice", name_tok)
            else:
                declared.add(name)
                m.wires.append(WireDecl(name, msb, lsb))
            if not self.eat(","):
                break
        self.expect(";")

    def parse_assign(self, m: NetlistModule) -> None:
        t = self.next()
        lhs = self.parse_net_expr(lvalue=True)
        self.expect("=")
        rhs = self.parse_net_expr()
        self.expect(";")
        m.assigns.append(AssignStmt(lhs, rhs, line=t.line, col=t.col))

    def parse_instance(self, m: NetlistModule) -> None:
        cell_tok = self.ident("cell name")
        if self.at("#"):
            raise self.unsupported("parameter expression")
        inst_tok = self.ident("instance name")
        self.expect("(")
        pins: dict[str, NetExpr | None] = {}
        if not self.at(")"):
            if not self.at("."):
                raise self.unsupported("positional port connection")
            while True:
                self.expect(".")
                pin = self.ident("pin name").text
                self.expect("(")
                conn = None if self.at(")") else self.parse_net_expr()
                self.expect(")")
                if pin in pins:
                    raise self.error(f"pin {pin!r} connected twice")
                pins[pin] = conn
                if not self.eat(","):
                    break
        self.expect(")")
        self.expect(";")
        m.instances.append(Instance(cell_tok.text, inst_tok.text, pins,
                                    line=cell_tok.line, col=cell_tok.col))

    def parse_net_expr(self, lvalue: bool = False) -> NetExpr:
        t = self.peek()
        if t.text == "{":
            self.next()
            if self.peek().kind == "num":
                raise self.unsupported("replication", t)
            parts = [self.parse_net_expr(lvalue)]
            while self.eat(","):
                parts.append(self.parse_net_expr(lvalue))
            self.expect("}")
            return Concat(tuple(parts), t.line, t.col)
        if t.kind == "const":
            if lvalue:
                raise self.error("constant cannot be assigned to", t)
            self.next()
            return ConstBits(t.width, t.value, t.line, t.col)
        if t.kind == "id":
            if t.text in _BEHAVIORAL:
                raise self.unsupported(t.text, t)
            self.next()
            if self.eat("["):
                first = self.number()
                if self.eat(":"):
                    lsb = self.number()
                    self.expect("]")
                    if first < lsb:
                        raise self.unsupported("ascending bit range", t)
                    return PartSel(t.text, first, lsb, t.line, t.col)
                self.expect("]")
                return BitSel(t.text, first, t.line, t.col)
            return Ref(t.text, t.line, t.col)
        if t.kind == "num":
            raise self.error("constants need an explicit size here", t)
        raise self.unsupported("expression in assign", t)


def parse_structural_verilog(
    sources: list[str],
    paths: list[str] | None = None,
    lib: CellLibrary = DEFAULT_LIBRARY,
) -> list[NetlistModule]:
    """Parse one or more source texts; later files may supply submodules."""
    if isinstance(sources, str):
        sources = [sources]
    modules: list[NetlistModule] = []
    seen: set[str] = set()
    for k, text in enumerate(sources):
        path = paths[k] if paths else None
        p = _Parser(tokenize(text, path), path)
        for m in p.parse_modules(lib):
            if m.name in seen:
                raise errors.DuplicateDefinition(f"module {m.name!r} defined twice")
            seen.add(m.name)
            modules.append(m)
    return modules
