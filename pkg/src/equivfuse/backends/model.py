"""Parsing solver output back into verdicts and counterexamples.

Accepts z3-style SMT models, BTOR2 witnesses, and DIMACS v-lines.  The
symbol table from emission drives the reverse mapping; any input the
solver left unassigned defaults to 0 and is recorded as defaulted.  Output
that fits no known shape raises ParseFailure: the caller downgrades to an
Unknown verdict, never invents one.
"""

from __future__ import annotations

import re

from equivfuse import errors
from equivfuse.backends.base import Counterexample

_SMT_VALUE = re.compile(
    r"\(define-fun\s+(?P<sym>\S+)\s+\(\)\s+\(_\s+BitVec\s+\d+\s*\)\s*"
    r"(?P<val>#b[01]+|#x[0-9a-fA-F]+|\(_\s+bv\d+\s+\d+\s*\))",
    re.S)
_SMT_BV = re.compile(r"\(_\s+bv(\d+)\s+\d+\s*\)")


def _empty_cex(symbols: dict[str, dict], n_frames: int) -> Counterexample:
    cex = Counterexample.empty(n_frames)
    for entry in symbols.values():
        fr = cex.frames[entry["frame"]]
        fr.setdefault(entry["port"], 0)
    return cex


def _smt_value(text: str) -> int:
    if text.startswith("#b"):
        return int(text[2:], 2)
    if text.startswith("#x"):
        return int(text[2:], 16)
    m = _SMT_BV.fullmatch(text)
    if m:
        return int(m.group(1))
    raise errors.ParseFailure(text[:80])


def _parse_smt(stdout: str, symbols: dict[str, dict], n_frames: int):
    verdict = None
    for line in stdout.splitlines():
        if line.strip() in ("sat", "unsat", "unknown"):
            verdict = line.strip()
            break
    if verdict is None:
        raise errors.ParseFailure(stdout[:200])
    if verdict != "sat":
        return verdict, None
    assigned = {m.group("sym"): _smt_value(m.group("val"))
                for m in _SMT_VALUE.finditer(stdout)}
    cex = _empty_cex(symbols, n_frames)
    for sym, entry in symbols.items():
        if sym in assigned:
            cex.set_bits(entry["port"], entry["frame"], entry["bit"], assigned[sym])
        else:
            cex.defaulted.append(sym)
    return "sat", cex


def _parse_btor2(stdout: str, symbols: dict[str, dict], n_frames: int):
    lines = stdout.splitlines()
    verdict = None
    for line in lines:
        if line.strip() in ("sat", "unsat", "unknown"):
            verdict = line.strip()
            break
    if verdict is None:
        raise errors.ParseFailure(stdout[:200])
    if verdict != "sat":
        return verdict, None
    cex = _empty_cex(symbols, n_frames)
    seen = set()
    in_inputs = False
    for line in lines:
        line = line.strip()
        if line.startswith("@"):
            in_inputs = True
            continue
        if line.startswith(("#", "b", "j")) or line in ("sat", ""):
            continue
        if line == ".":
            break
        if not in_inputs:
            continue
        parts = line.split()
        if len(parts) < 2 or not parts[0].isdigit():
            raise errors.ParseFailure(line[:80])
        entry = symbols.get(parts[0])
        if entry is None:
            continue
        bits = parts[1]
        if any(c not in "01x" for c in bits):
            raise errors.ParseFailure(line[:80])
        if "x" in bits:
            cex.defaulted.append(parts[0])
        value = int(bits.replace("x", "0"), 2)
        cex.set_bits(entry["port"], entry["frame"], entry["bit"], value)
        seen.add(parts[0])
    cex.defaulted.extend(sorted(set(symbols) - seen, key=lambda s: int(s)))
    return "sat", cex


def _parse_dimacs(stdout: str, symbols: dict[str, dict], n_frames: int):
    verdict = None
    true_vars: set[int] = set()
    seen_vars: set[int] = set()
    for line in stdout.splitlines():
        line = line.strip()
        if line.startswith("s "):
            word = line[2:].strip()
            verdict = {"SATISFIABLE": "sat", "UNSATISFIABLE": "unsat"}.get(word, "unknown")
        elif line.startswith("v "):
            for tok in line[2:].split():
                n = int(tok)
                if n == 0:
                    continue
                seen_vars.add(abs(n))
                if n > 0:
                    true_vars.add(n)
    if verdict is None:
        raise errors.ParseFailure(stdout[:200])
    if verdict != "sat":
        return verdict, None
    cex = _empty_cex(symbols, n_frames)
    for var, entry in symbols.items():
        v = int(var)
        if v not in seen_vars:
            cex.defaulted.append(var)
        cex.set_bits(entry["port"], entry["frame"], entry["bit"],
                     1 if v in true_vars else 0)
    return "sat", cex


_PARSERS = {"smtlib": _parse_smt, "btor2": _parse_btor2, "dimacs": _parse_dimacs}


def parse_model(format: str, stdout: str, symbols: dict[str, dict],
                n_frames: int = 1) -> tuple[str, Counterexample | None]:
    """Returns (verdict, counterexample): verdict is sat/unsat/unknown and
    the counterexample accompanies sat only."""
    parser = _PARSERS.get(format)
    if parser is None:
        raise errors.ParseFailure(f"no model parser for format {format!r}")
    return parser(stdout, symbols, n_frames)
