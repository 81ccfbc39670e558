"""DIMACS CNF emission via Tseitin encoding of an AIG.

AIG variable numbering carries over directly to CNF variables.  Each AND
gate g = x & y contributes three clauses (~g|x)(~g|y)(g|~x|~y) with
negations folded into the literals, plus one unit clause asserting the
output.  A constant output degenerates to a trivially sat or unsat file.
Comment lines record the input-variable map for human readers; the symbol
table is the machine-readable mapping.
"""

from __future__ import annotations

from equivfuse import errors
from equivfuse.backends.base import EmittedProblem, split_frame, symbol_entry
from equivfuse.backends.aiger import _bit_split
from equivfuse.core.aig import FALSE, TRUE, Aig


def _cnf_lit(aig_lit: int) -> int:
    var = aig_lit >> 1
    return -var if aig_lit & 1 else var


def emit_dimacs(aig: Aig, suffixed: bool = True, n_frames: int = 1) -> EmittedProblem:
    if len(aig.outputs) != 1:
        raise errors.MultiOutput(len(aig.outputs))
    out_lit = aig.outputs[0][1]

    symbols: dict[str, dict] = {}
    comments = []
    for name, lit in aig.inputs:
        port_name, bit = _bit_split(name)
        base, frame = split_frame(port_name, suffixed)
        symbols[str(lit >> 1)] = symbol_entry(base, frame, bit, 1)
        comments.append(f"c var {lit >> 1} = {name}")

    clauses: list[tuple[int, ...]] = []
    if out_lit == FALSE:
        # Unsatisfiable by construction: force a contradiction on var 1.
        clauses = [(1,), (-1,)]
        n_vars = max(1, aig.num_vars)
    elif out_lit == TRUE:
        n_vars = aig.num_vars
    else:
        for lhs, a, b in aig.ands:
            g, x, y = _cnf_lit(lhs), _cnf_lit(a), _cnf_lit(b)
            clauses.append((-g, x))
            clauses.append((-g, y))
            clauses.append((g, -x, -y))
        clauses.append((_cnf_lit(out_lit),))
        n_vars = aig.num_vars

    lines = comments
    lines.append(f"p cnf {n_vars} {len(clauses)}")
    lines.extend(" ".join(map(str, c)) + " 0" for c in clauses)
    return EmittedProblem("dimacs", "\n".join(lines) + "\n", symbols, ".cnf",
                          n_frames=n_frames)
