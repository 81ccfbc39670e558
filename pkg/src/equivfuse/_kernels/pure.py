"""Pure-Python kernels.

Same contract as the compiled extension: a tape evaluator, an exhaustive
input enumerator, and a CDCL SAT solver. The compiled module is a direct
port of this file, so the two backends stay result-identical; any change
here must be mirrored there.
"""

from __future__ import annotations

from equivfuse._kernels.tape import (
    OP_ADD, OP_AND, OP_ASHR, OP_CONCAT, OP_CONST, OP_EQ, OP_EXTRACT, OP_INPUT,
    OP_LSHR, OP_MUL, OP_MUX, OP_NOT, OP_OR, OP_SEXT, OP_SHL, OP_SLE, OP_SLT,
    OP_SUB, OP_ULE, OP_ULT, OP_XOR, OP_ZEXT, STRIDE, Tape,
)

BACKEND = "pure"


def eval_tape(tape: Tape, v: int) -> dict:
    """Run the tape once on packed input word ``v``; map output name to value."""
    s = [0] * tape.n_slots
    code, consts, masks = tape.code, tape.consts, tape.masks
    for base in range(0, len(code), STRIDE):
        op, dst, a, b, c, imm = code[base:base + STRIDE]
        m = masks[dst]
        if op == OP_CONST:
            r = consts[imm]
        elif op == OP_INPUT:
            r = (v >> a) & m
        elif op == OP_ADD:
            r = (s[a] + s[b]) & m
        elif op == OP_SUB:
            r = (s[a] - s[b]) & m
        elif op == OP_MUL:
            r = (s[a] * s[b]) & m
        elif op == OP_AND:
            r = s[a] & s[b]
        elif op == OP_OR:
            r = s[a] | s[b]
        elif op == OP_XOR:
            r = s[a] ^ s[b]
        elif op == OP_NOT:
            r = ~s[a] & m
        elif op == OP_SHL:
            r = (s[a] << s[b]) & m if s[b] < imm else 0
        elif op == OP_LSHR:
            r = s[a] >> s[b] if s[b] < imm else 0
        elif op == OP_ASHR:
            w = imm
            amt = s[b] if s[b] < w else w - 1
            r = (s[a] >> amt) & m
            if s[a] >> (w - 1):
                r |= m ^ (m >> amt)
        elif op == OP_EQ:
            r = int(s[a] == s[b])
        elif op == OP_ULT:
            r = int(s[a] < s[b])
        elif op == OP_ULE:
            r = int(s[a] <= s[b])
        elif op == OP_SLT or op == OP_SLE:
            w = imm
            top = 1 << (w - 1)
            sa = s[a] - (1 << w) if s[a] & top else s[a]
            sb = s[b] - (1 << w) if s[b] & top else s[b]
            r = int(sa < sb) if op == OP_SLT else int(sa <= sb)
        elif op == OP_MUX:
            r = s[b] if s[a] else s[c]
        elif op == OP_CONCAT:
            r = (s[a] << imm) | s[b]
        elif op == OP_EXTRACT:
            r = (s[a] >> imm) & m
        elif op == OP_ZEXT:
            r = s[a]
        elif op == OP_SEXT:
            r = s[a] | (m ^ ((1 << imm) - 1)) if s[a] >> (imm - 1) else s[a]
        else:
            raise ValueError(f"bad opcode {op}")
        s[dst] = r
    return {name: s[slot] for name, slot in tape.out_slots.items()}


def _expr(op, a, b, c, imm, m):
    sa, sb, sc = f"s{a}", f"s{b}", f"s{c}"
    if op == OP_INPUT:
        return f"(v >> {a}) & {m}"
    if op == OP_ADD:
        return f"({sa} + {sb}) & {m}"
    if op == OP_SUB:
        return f"({sa} - {sb}) & {m}"
    if op == OP_MUL:
        return f"({sa} * {sb}) & {m}"
    if op == OP_AND:
        return f"{sa} & {sb}"
    if op == OP_OR:
        return f"{sa} | {sb}"
    if op == OP_XOR:
        return f"{sa} ^ {sb}"
    if op == OP_NOT:
        return f"{sa} ^ {m}"
    if op == OP_SHL:
        return f"(({sa} << {sb}) & {m} if {sb} < {imm} else 0)"
    if op == OP_LSHR:
        return f"({sa} >> {sb} if {sb} < {imm} else 0)"
    if op == OP_ASHR:
        w = imm
        amt = f"({sb} if {sb} < {w} else {w - 1})"
        sx = f"({sa} - {1 << w} if {sa} >> {w - 1} else {sa})"
        return f"({sx} >> {amt}) & {m}"
    if op == OP_EQ:
        return f"+({sa} == {sb})"
    if op == OP_ULT:
        return f"+({sa} < {sb})"
    if op == OP_ULE:
        return f"+({sa} <= {sb})"
    if op in (OP_SLT, OP_SLE):
        w = imm
        xa = f"({sa} - {1 << w} if {sa} >> {w - 1} else {sa})"
        xb = f"({sb} - {1 << w} if {sb} >> {w - 1} else {sb})"
        return f"+({xa} {'<' if op == OP_SLT else '<='} {xb})"
    if op == OP_MUX:
        return f"({sb} if {sa} else {sc})"
    if op == OP_CONCAT:
        return f"({sa} << {imm}) | {sb}"
    if op == OP_EXTRACT:
        return f"({sa} >> {imm}) & {m}"
    if op == OP_ZEXT:
        return sa
    if op == OP_SEXT:
        return f"({sa} | {m ^ ((1 << imm) - 1)} if {sa} >> {imm - 1} else {sa})"
    raise ValueError(f"bad opcode {op}")


def enum_first_diff(tape: Tape, out_slot: int, start: int, stop: int) -> int:
    """First packed input word in [start, stop) that drives the slot nonzero,
    or -1. Generates a specialized loop so the scan runs at full interpreter
    speed rather than dispatching per instruction."""
    code = tape.code
    lines = ["def _enum(start, stop):", "    for v in range(start, stop):"]
    for base in range(0, len(code), STRIDE):
        op, dst, a, b, c, imm = code[base:base + STRIDE]
        m = tape.masks[dst]
        if op == OP_CONST:
            lines.append(f"        s{dst} = {tape.consts[imm]}")
        else:
            lines.append(f"        s{dst} = {_expr(op, a, b, c, imm, m)}")
    lines.append(f"        if s{out_slot}:")
    lines.append("            return v")
    lines.append("    return -1")
    ns: dict = {}
    exec(compile("\n".join(lines), "<enum>", "exec"), ns)
    return ns["_enum"](start, stop)


# --- CDCL ---------------------------------------------------------------------
#
# Two watched literals, first-UIP learning, phase saving, Luby restarts, and
# integer variable activities (no floats, so the compiled port is bit-exact).

_RESTART_UNIT = 64
_ACT_RESCALE = 1 << 52


def _luby(i: int) -> int:
    """Luby sequence value for 0-indexed i, as a power of two."""
    size, seq = 1, 0
    while size < i + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != i:
        size = (size - 1) >> 1
        seq -= 1
        i = i % size
    return 1 << seq


def sat_solve(n_vars: int, clauses, conflict_limit: int = -1):
    """Solve a CNF over DIMACS-style clauses (lists of nonzero ints).

    Returns ("sat", model) with model[v] in {0, 1} for variables 1..n_vars,
    ("unsat", None), or ("unknown", None) once conflict_limit is exceeded.
    Fully deterministic.
    """
    assigns = [-1] * n_vars            # per var: -1 unassigned, else 0/1
    level = [0] * n_vars
    reason = [-1] * n_vars             # clause id, -1 for decisions/units
    saved = [0] * n_vars               # phase memory
    act = [0] * n_vars
    var_inc = 1

    arena: list[int] = []              # all clause literals, back to back
    cstart: list[int] = []
    clen: list[int] = []
    watches: list[list[int]] = [[] for _ in range(2 * n_vars)]

    trail: list[int] = []
    trail_lim: list[int] = []
    qhead = 0

    # indexed max-heap on (activity, -var); holds candidate decision vars
    heap = list(range(n_vars))
    hpos = list(range(n_vars))

    def _less(u, w):
        return act[u] > act[w] or (act[u] == act[w] and u < w)

    def _up(i):
        v = heap[i]
        while i > 0:
            p = (i - 1) >> 1
            if _less(v, heap[p]):
                heap[i] = heap[p]
                hpos[heap[i]] = i
                i = p
            else:
                break
        heap[i] = v
        hpos[v] = i

    def _down(i):
        v = heap[i]
        n = len(heap)
        while True:
            l = 2 * i + 1
            if l >= n:
                break
            r = l + 1
            child = r if r < n and _less(heap[r], heap[l]) else l
            if _less(heap[child], v):
                heap[i] = heap[child]
                hpos[heap[i]] = i
                i = child
            else:
                break
        heap[i] = v
        hpos[v] = i

    def heap_insert(v):
        if hpos[v] < 0:
            hpos[v] = len(heap)
            heap.append(v)
            _up(hpos[v])

    def heap_pop():
        v = heap[0]
        last = heap.pop()
        hpos[v] = -1
        if heap:
            heap[0] = last
            hpos[last] = 0
            _down(0)
        return v

    def bump(v):
        nonlocal var_inc
        act[v] += var_inc
        if act[v] > _ACT_RESCALE:
            for u in range(n_vars):
                act[u] >>= 32
            var_inc = max(var_inc >> 32, 1)
            for i in range((len(heap) >> 1) - 1, -1, -1):
                _down(i)
        elif hpos[v] >= 0:
            _up(hpos[v])

    def lit_val(lit):
        a = assigns[lit >> 1]
        return a if a < 0 else a ^ (lit & 1)

    def enqueue(lit, r):
        v = lit >> 1
        assigns[v] = (lit & 1) ^ 1
        level[v] = len(trail_lim)
        reason[v] = r
        trail.append(lit)

    def propagate():
        nonlocal qhead
        while qhead < len(trail):
            fl = trail[qhead] ^ 1      # literal that just became false
            qhead += 1
            ws = watches[fl]
            i = j = 0
            n = len(ws)
            while i < n:
                cid = ws[i]
                i += 1
                st = cstart[cid]
                if arena[st] == fl:
                    arena[st] = arena[st + 1]
                    arena[st + 1] = fl
                first = arena[st]
                if lit_val(first) == 1:
                    ws[j] = cid
                    j += 1
                    continue
                end = st + clen[cid]
                k = st + 2
                moved = False
                while k < end:
                    q = arena[k]
                    if lit_val(q) != 0:
                        arena[st + 1] = q
                        arena[k] = fl
                        watches[q].append(cid)
                        moved = True
                        break
                    k += 1
                if moved:
                    continue
                ws[j] = cid
                j += 1
                if lit_val(first) == 0:
                    while i < n:       # conflict: keep remaining watchers
                        ws[j] = ws[i]
                        j += 1
                        i += 1
                    del ws[j:]
                    qhead = len(trail)
                    return cid
                enqueue(first, cid)
            del ws[j:]
        return -1

    def analyze(confl):
        seen = bytearray(n_vars)
        learnt = [-1]
        path = 0
        p = -1
        idx = len(trail) - 1
        cur = len(trail_lim)
        cid = confl
        while True:
            st = cstart[cid]
            for k in range(st + (0 if p < 0 else 1), st + clen[cid]):
                q = arena[k]
                v = q >> 1
                if not seen[v] and level[v] > 0:
                    seen[v] = 1
                    bump(v)
                    if level[v] >= cur:
                        path += 1
                    else:
                        learnt.append(q)
            while not seen[trail[idx] >> 1]:
                idx -= 1
            p = trail[idx]
            idx -= 1
            v = p >> 1
            cid = reason[v]
            seen[v] = 0
            path -= 1
            if path == 0:
                break
        learnt[0] = p ^ 1
        if len(learnt) == 1:
            return learnt, 0
        mi = 1
        for k in range(2, len(learnt)):
            if level[learnt[k] >> 1] > level[learnt[mi] >> 1]:
                mi = k
        learnt[1], learnt[mi] = learnt[mi], learnt[1]
        return learnt, level[learnt[1] >> 1]

    def cancel_until(lvl):
        nonlocal qhead
        if len(trail_lim) <= lvl:
            return
        for k in range(len(trail) - 1, trail_lim[lvl] - 1, -1):
            v = trail[k] >> 1
            saved[v] = assigns[v]
            assigns[v] = -1
            heap_insert(v)
        del trail[trail_lim[lvl]:]
        del trail_lim[lvl:]
        qhead = len(trail)

    def add_clause(lits):
        cid = len(cstart)
        cstart.append(len(arena))
        clen.append(len(lits))
        arena.extend(lits)
        watches[lits[0]].append(cid)
        watches[lits[1]].append(cid)
        return cid

    # load the problem
    for cl in clauses:
        lits = []
        drop = False
        seen_lits = set()
        for d in cl:
            lit = 2 * (abs(d) - 1) + (1 if d < 0 else 0)
            if lit ^ 1 in seen_lits:
                drop = True
                break
            if lit not in seen_lits:
                seen_lits.add(lit)
                lits.append(lit)
        if drop:
            continue
        if not lits:
            return "unsat", None
        if len(lits) == 1:
            lv = lit_val(lits[0])
            if lv == 0:
                return "unsat", None
            if lv < 0:
                enqueue(lits[0], -1)
        else:
            add_clause(lits)
    if propagate() >= 0:
        return "unsat", None

    conflicts = 0
    restart_idx = 0
    budget = _RESTART_UNIT * _luby(restart_idx)
    since_restart = 0
    while True:
        confl = propagate()
        if confl >= 0:
            conflicts += 1
            since_restart += 1
            if not trail_lim:
                return "unsat", None
            learnt, bt = analyze(confl)
            cancel_until(bt)
            if len(learnt) == 1:
                enqueue(learnt[0], -1)
            else:
                enqueue(learnt[0], add_clause(learnt))
            var_inc += max(var_inc >> 4, 1)
            if var_inc > _ACT_RESCALE:
                for u in range(n_vars):
                    act[u] >>= 32
                var_inc = max(var_inc >> 32, 1)
                for i in range((len(heap) >> 1) - 1, -1, -1):
                    _down(i)
            if 0 <= conflict_limit <= conflicts:
                return "unknown", None
            if since_restart >= budget:
                cancel_until(0)
                restart_idx += 1
                budget = _RESTART_UNIT * _luby(restart_idx)
                since_restart = 0
        else:
            v = -1
            while heap:
                v = heap_pop()
                if assigns[v] < 0:
                    break
                v = -1
            if v < 0:
                return "sat", assigns[:]
            trail_lim.append(len(trail))
            enqueue(2 * v + (saved[v] ^ 1), -1)
