"""Tokenizer for the algorithmic source subset.

Handles // and /* */ comments and a one-line preprocessor: object-like
integer #define macros are collected for the parser, #include/#pragma are
ignored, everything else behind '#' is rejected. Line numbers are 1-based.
"""

from __future__ import annotations

from dataclasses import dataclass

from equivfuse import errors

PUNCT = [
    "<<=", ">>=",
    "<<", ">>", "<=", ">=", "==", "!=", "&&", "||", "++", "--",
    "+=", "-=", "*=", "&=", "|=", "^=",
    "(", ")", "[", "]", "{", "}", ",", ";", "=", "+", "-", "*", "/", "%",
    "<", ">", "&", "|", "^", "~", "!", ":", "?", ".",
]


@dataclass(frozen=True)
class Token:
    kind: str  # "id" | "num" | "str" | "punct" | "eof"
    text: str
    value: int | None
    line: int
    col: int


def split_directives(source: str, path: str | None = None) -> tuple[str, list[tuple[str, str, int]]]:
    """Blank out preprocessor lines, returning (code, [(name, replacement, line)])
    for each #define. Unknown directives are rejected."""
    out_lines: list[str] = []
    defines: list[tuple[str, str, int]] = []
    for i, line in enumerate(source.splitlines(), start=1):
        stripped = line.lstrip()
        if not stripped.startswith("#"):
            out_lines.append(line)
            continue
        body = stripped[1:].strip()
        if body.startswith("define"):
            rest = body[len("define"):].strip()
            parts = rest.split(None, 1)
            if not parts:
                raise errors.SyntaxError("empty #define", line=i, col=1, path=path)
            name = parts[0]
            if "(" in name:
                raise errors.UnsupportedConstruct(
                    "function-like macro", line=i, col=1, path=path)
            defines.append((name, parts[1] if len(parts) > 1 else "", i))
        elif body.startswith(("include", "pragma")) or body == "":
            pass
        else:
            word = body.split(None, 1)[0]
            raise errors.UnsupportedConstruct(f"#{word}", line=i, col=1, path=path)
        out_lines.append("")  # keep line numbering stable
    return "\n".join(out_lines), defines


def tokenize(source: str, path: str | None = None, first_line: int = 1) -> list[Token]:
    toks: list[Token] = []
    i = 0
    line = first_line
    col = 1
    n = len(source)

    def error(msg: str):
        return errors.SyntaxError(msg, line=line, col=col, path=path)

    while i < n:
        c = source[i]
        if c == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if c in " \t\r\f":
            i += 1
            col += 1
            continue
        if source.startswith("//", i):
            while i < n and source[i] != "\n":
                i += 1
            continue
        if source.startswith("/*", i):
            end = source.find("*/", i + 2)
            if end < 0:
                raise error("unterminated comment")
            for ch in source[i:end + 2]:
                if ch == "\n":
                    line += 1
                    col = 1
                else:
                    col += 1
            i = end + 2
            continue
        if c == '"':
            end = source.find('"', i + 1)
            if end < 0 or "\n" in source[i + 1:end]:
                raise error("unterminated string literal")
            toks.append(Token("str", source[i + 1:end], None, line, col))
            col += end + 1 - i
            i = end + 1
            continue
        if c.isdigit():
            start = i
            start_col = col
            if source.startswith(("0x", "0X"), i):
                i += 2
                while i < n and (source[i].isalnum()):
                    i += 1
                text = source[start:i]
                digits = text[2:].rstrip("uUlL")
                try:
                    value = int(digits, 16)
                except ValueError:
                    raise error(f"bad hex literal {text!r}")
            elif source.startswith(("0b", "0B"), i):
                i += 2
                while i < n and source[i].isalnum():
                    i += 1
                text = source[start:i]
                try:
                    value = int(text[2:].rstrip("uUlL"), 2)
                except ValueError:
                    raise error(f"bad binary literal {text!r}")
            else:
                while i < n and source[i].isalnum():
                    i += 1
                text = source[start:i]
                digits = text.rstrip("uUlL")
                if not digits.isdigit():
                    if any(ch in "eE" for ch in digits):
                        raise errors.UnsupportedConstruct(
                            "float literal", line=line, col=start_col, path=path)
                    raise error(f"bad literal {text!r}")
                value = int(digits, 10)
            if i < n and source[i] == ".":
                raise errors.UnsupportedConstruct(
                    "float literal", line=line, col=start_col, path=path)
            toks.append(Token("num", source[start:i], value, line, start_col))
            col += i - start
            continue
        if c.isalpha() or c == "_":
            start = i
            start_col = col
            while i < n and (source[i].isalnum() or source[i] == "_"):
                i += 1
            toks.append(Token("id", source[start:i], None, line, start_col))
            col += i - start
            continue
        for p in PUNCT:
            if source.startswith(p, i):
                toks.append(Token("punct", p, None, line, col))
                i += len(p)
                col += len(p)
                break
        else:
            raise error(f"unexpected character {c!r}")
    toks.append(Token("eof", "", None, line, col))
    return toks
