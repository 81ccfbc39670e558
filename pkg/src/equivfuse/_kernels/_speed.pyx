# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: tape evaluation, input enumeration, CDCL search.

Direct port of pure.py onto C arrays. The two implementations must stay
result-identical; the test suite cross-checks them, so any change to one
side has to land on the other as well. Activities are integers specifically
so this port can match the pure solver bit for bit.
"""

from cpython.mem cimport PyMem_Free, PyMem_Malloc, PyMem_Realloc

from array import array as _array

BACKEND = "compiled"

cdef enum:
    OP_CONST = 0
    OP_INPUT = 1
    OP_ADD = 2
    OP_SUB = 3
    OP_MUL = 4
    OP_AND = 5
    OP_OR = 6
    OP_XOR = 7
    OP_NOT = 8
    OP_SHL = 9
    OP_LSHR = 10
    OP_ASHR = 11
    OP_EQ = 12
    OP_ULT = 13
    OP_SLT = 14
    OP_ULE = 15
    OP_SLE = 16
    OP_MUX = 17
    OP_CONCAT = 18
    OP_EXTRACT = 19
    OP_ZEXT = 20
    OP_SEXT = 21

ctypedef unsigned long long u64
ctypedef long long i64


# --- tape execution -----------------------------------------------------------

cdef inline void _step(int op, int a, int b, int c, int imm, u64 m,
                       u64* s, int dst, const u64* consts, u64 v) noexcept nogil:
    cdef u64 r = 0
    cdef u64 amt
    cdef i64 xa, xb
    cdef int w
    if op == OP_ADD:
        r = (s[a] + s[b]) & m
    elif op == OP_AND:
        r = s[a] & s[b]
    elif op == OP_XOR:
        r = s[a] ^ s[b]
    elif op == OP_OR:
        r = s[a] | s[b]
    elif op == OP_NOT:
        r = s[a] ^ m
    elif op == OP_INPUT:
        r = (v >> a) & m
    elif op == OP_CONST:
        r = consts[imm]
    elif op == OP_SUB:
        r = (s[a] - s[b]) & m
    elif op == OP_MUL:
        r = (s[a] * s[b]) & m
    elif op == OP_SHL:
        r = (s[a] << s[b]) & m if s[b] < <u64>imm else 0
    elif op == OP_LSHR:
        r = s[a] >> s[b] if s[b] < <u64>imm else 0
    elif op == OP_ASHR:
        w = imm
        amt = s[b] if s[b] < <u64>w else <u64>(w - 1)
        r = (s[a] >> amt) & m
        if s[a] >> (w - 1):
            r |= m ^ (m >> amt)
    elif op == OP_EQ:
        r = 1 if s[a] == s[b] else 0
    elif op == OP_ULT:
        r = 1 if s[a] < s[b] else 0
    elif op == OP_ULE:
        r = 1 if s[a] <= s[b] else 0
    elif op == OP_SLT or op == OP_SLE:
        w = imm
        xa = <i64>s[a]
        if s[a] >> (w - 1):
            xa -= (<i64>1) << w
        xb = <i64>s[b]
        if s[b] >> (w - 1):
            xb -= (<i64>1) << w
        if op == OP_SLT:
            r = 1 if xa < xb else 0
        else:
            r = 1 if xa <= xb else 0
    elif op == OP_MUX:
        r = s[b] if s[a] else s[c]
    elif op == OP_CONCAT:
        r = (s[a] << imm) | s[b]
    elif op == OP_EXTRACT:
        r = (s[a] >> imm) & m
    elif op == OP_ZEXT:
        r = s[a]
    elif op == OP_SEXT:
        r = s[a]
        if s[a] >> (imm - 1):
            r |= m ^ (((<u64>1) << imm) - 1)
    s[dst] = r


cdef void _run_tape(const int[::1] code, const u64[::1] consts,
                    const u64[::1] masks, u64* s, int n_instr, u64 v) noexcept nogil:
    cdef int t, base
    for t in range(n_instr):
        base = t * 6
        _step(code[base], code[base + 2], code[base + 3], code[base + 4],
              code[base + 5], masks[code[base + 1]], s, code[base + 1],
              &consts[0], v)


cdef i64 _enum_loop(const int[::1] code, const u64[::1] consts,
                    const u64[::1] masks, u64* s, int n_instr, int out_slot,
                    u64 start, u64 stop) noexcept nogil:
    cdef u64 v
    for v in range(start, stop):
        _run_tape(code, consts, masks, s, n_instr, v)
        if s[out_slot]:
            return <i64>v
    return -1


def eval_tape(tape, v):
    """Run the tape once on packed input word v; map output name to value."""
    if tape.n_bits > 63:
        from equivfuse._kernels import pure
        return pure.eval_tape(tape, v)
    cdef int n_slots = tape.n_slots
    if n_slots == 0:
        return {}
    consts_arr = tape.consts if len(tape.consts) else _array("Q", [0])
    cdef const int[::1] code = tape.code
    cdef const u64[::1] consts = consts_arr
    cdef const u64[::1] masks = tape.masks
    cdef u64* s = <u64*>PyMem_Malloc(n_slots * sizeof(u64))
    if s == NULL:
        raise MemoryError()
    try:
        _run_tape(code, consts, masks, s, len(code) // 6, <u64>v)
        return {name: s[slot] for name, slot in tape.out_slots.items()}
    finally:
        PyMem_Free(s)


def enum_first_diff(tape, out_slot, start, stop):
    """First packed input word in [start, stop) that drives the slot nonzero,
    or -1."""
    if tape.n_bits > 48:
        from equivfuse._kernels import pure
        return pure.enum_first_diff(tape, out_slot, start, stop)
    cdef int n_slots = tape.n_slots
    if n_slots == 0:
        return -1
    consts_arr = tape.consts if len(tape.consts) else _array("Q", [0])
    cdef const int[::1] code = tape.code
    cdef const u64[::1] consts = consts_arr
    cdef const u64[::1] masks = tape.masks
    cdef int n_instr = len(code) // 6
    cdef int oslot = out_slot
    cdef u64 lo = start, hi = stop
    cdef u64* s = <u64*>PyMem_Malloc(n_slots * sizeof(u64))
    if s == NULL:
        raise MemoryError()
    cdef i64 res
    try:
        with nogil:
            res = _enum_loop(code, consts, masks, s, n_instr, oslot, lo, hi)
        return res
    finally:
        PyMem_Free(s)


# --- CDCL ---------------------------------------------------------------------

cdef enum:
    RESTART_UNIT = 64

cdef i64 ACT_RESCALE = (<i64>1) << 52


cdef struct Sol:
    int n_vars
    signed char* assigns
    signed char* saved
    int* level
    int* reason
    i64* act
    i64 var_inc
    int* arena
    i64 arena_len
    i64 arena_cap
    i64* cstart
    int* clen
    int n_clauses
    int clause_cap
    int** wdata
    int* wlen
    int* wcap
    int* trail
    int trail_len
    int* trail_lim
    int n_lim
    int qhead
    int* heap
    int* hpos
    int heap_size


cdef inline bint _less(Sol* S, int u, int w) noexcept nogil:
    return S.act[u] > S.act[w] or (S.act[u] == S.act[w] and u < w)


cdef void _heap_up(Sol* S, int i) noexcept nogil:
    cdef int v = S.heap[i]
    cdef int p
    while i > 0:
        p = (i - 1) >> 1
        if _less(S, v, S.heap[p]):
            S.heap[i] = S.heap[p]
            S.hpos[S.heap[i]] = i
            i = p
        else:
            break
    S.heap[i] = v
    S.hpos[v] = i


cdef void _heap_down(Sol* S, int i) noexcept nogil:
    cdef int v = S.heap[i]
    cdef int n = S.heap_size
    cdef int l, r, child
    while True:
        l = 2 * i + 1
        if l >= n:
            break
        r = l + 1
        child = r if r < n and _less(S, S.heap[r], S.heap[l]) else l
        if _less(S, S.heap[child], v):
            S.heap[i] = S.heap[child]
            S.hpos[S.heap[i]] = i
            i = child
        else:
            break
    S.heap[i] = v
    S.hpos[v] = i


cdef inline void _heap_insert(Sol* S, int v) noexcept nogil:
    if S.hpos[v] < 0:
        S.hpos[v] = S.heap_size
        S.heap[S.heap_size] = v
        S.heap_size += 1
        _heap_up(S, S.hpos[v])


cdef int _heap_pop(Sol* S) noexcept nogil:
    cdef int v = S.heap[0]
    cdef int last = S.heap[S.heap_size - 1]
    S.heap_size -= 1
    S.hpos[v] = -1
    if S.heap_size > 0:
        S.heap[0] = last
        S.hpos[last] = 0
        _heap_down(S, 0)
    return v


cdef void _rescale(Sol* S) noexcept nogil:
    cdef int u, i
    for u in range(S.n_vars):
        S.act[u] >>= 32
    S.var_inc >>= 32
    if S.var_inc < 1:
        S.var_inc = 1
    for i in range((S.heap_size >> 1) - 1, -1, -1):
        _heap_down(S, i)


cdef inline void _bump(Sol* S, int v) noexcept nogil:
    S.act[v] += S.var_inc
    if S.act[v] > ACT_RESCALE:
        _rescale(S)
    elif S.hpos[v] >= 0:
        _heap_up(S, S.hpos[v])


cdef inline int _lit_val(Sol* S, int lit) noexcept nogil:
    cdef int a = S.assigns[lit >> 1]
    return a if a < 0 else a ^ (lit & 1)


cdef inline void _enqueue(Sol* S, int lit, int r) noexcept nogil:
    cdef int v = lit >> 1
    S.assigns[v] = <signed char>((lit & 1) ^ 1)
    S.level[v] = S.n_lim
    S.reason[v] = r
    S.trail[S.trail_len] = lit
    S.trail_len += 1


cdef int _watch_push(Sol* S, int lit, int cid) except -1 nogil:
    cdef int cap
    cdef int* nd
    if S.wlen[lit] == S.wcap[lit]:
        cap = S.wcap[lit] * 2 if S.wcap[lit] else 4
        with gil:
            nd = <int*>PyMem_Realloc(S.wdata[lit], cap * sizeof(int))
            if nd == NULL:
                raise MemoryError()
        S.wdata[lit] = nd
        S.wcap[lit] = cap
    S.wdata[lit][S.wlen[lit]] = cid
    S.wlen[lit] += 1
    return 0


cdef int _add_clause(Sol* S, int* lits, int n) except -2 nogil:
    cdef int cid = S.n_clauses
    cdef i64 cap
    cdef int* na
    cdef i64* ns
    cdef int* nl
    cdef int k
    if S.arena_len + n > S.arena_cap:
        cap = S.arena_cap
        while S.arena_len + n > cap:
            cap *= 2
        with gil:
            na = <int*>PyMem_Realloc(S.arena, cap * sizeof(int))
            if na == NULL:
                raise MemoryError()
        S.arena = na
        S.arena_cap = cap
    if S.n_clauses == S.clause_cap:
        cap = S.clause_cap * 2
        with gil:
            ns = <i64*>PyMem_Realloc(S.cstart, cap * sizeof(i64))
            nl = <int*>PyMem_Realloc(S.clen, cap * sizeof(int))
            if ns == NULL or nl == NULL:
                if ns != NULL:
                    S.cstart = ns
                if nl != NULL:
                    S.clen = nl
                raise MemoryError()
        S.cstart = ns
        S.clen = nl
        S.clause_cap = <int>cap
    S.cstart[cid] = S.arena_len
    S.clen[cid] = n
    for k in range(n):
        S.arena[S.arena_len] = lits[k]
        S.arena_len += 1
    S.n_clauses += 1
    _watch_push(S, lits[0], cid)
    _watch_push(S, lits[1], cid)
    return cid


cdef int _propagate(Sol* S) except -2 nogil:
    cdef int fl, i, j, n, cid, first, moved, q, k
    cdef i64 st, end
    cdef int* ws
    while S.qhead < S.trail_len:
        fl = S.trail[S.qhead] ^ 1
        S.qhead += 1
        ws = S.wdata[fl]
        i = 0
        j = 0
        n = S.wlen[fl]
        while i < n:
            cid = ws[i]
            i += 1
            st = S.cstart[cid]
            if S.arena[st] == fl:
                S.arena[st] = S.arena[st + 1]
                S.arena[st + 1] = fl
            first = S.arena[st]
            if _lit_val(S, first) == 1:
                ws[j] = cid
                j += 1
                continue
            end = st + S.clen[cid]
            k = 2
            moved = 0
            while st + k < end:
                q = S.arena[st + k]
                if _lit_val(S, q) != 0:
                    S.arena[st + 1] = q
                    S.arena[st + k] = fl
                    # q is not false, so q != fl and the cached ws stays valid
                    _watch_push(S, q, cid)
                    moved = 1
                    break
                k += 1
            if moved:
                continue
            ws[j] = cid
            j += 1
            if _lit_val(S, first) == 0:
                while i < n:
                    ws[j] = ws[i]
                    j += 1
                    i += 1
                S.wlen[fl] = j
                S.qhead = S.trail_len
                return cid
            _enqueue(S, first, cid)
        S.wlen[fl] = j
    return -1


cdef int _analyze(Sol* S, int confl, signed char* seen, int* learnt,
                  int* out_bt) except -2 nogil:
    cdef int n_learnt = 1
    cdef int path = 0
    cdef int p = -1
    cdef int idx = S.trail_len - 1
    cdef int cur = S.n_lim
    cdef int cid = confl
    cdef i64 st
    cdef int k, q, v, mi
    learnt[0] = -1
    while True:
        st = S.cstart[cid]
        k = 0 if p < 0 else 1
        while k < S.clen[cid]:
            q = S.arena[st + k]
            v = q >> 1
            if not seen[v] and S.level[v] > 0:
                seen[v] = 1
                _bump(S, v)
                if S.level[v] >= cur:
                    path += 1
                else:
                    learnt[n_learnt] = q
                    n_learnt += 1
            k += 1
        while not seen[S.trail[idx] >> 1]:
            idx -= 1
        p = S.trail[idx]
        idx -= 1
        v = p >> 1
        cid = S.reason[v]
        seen[v] = 0
        path -= 1
        if path == 0:
            break
    learnt[0] = p ^ 1
    for k in range(1, n_learnt):
        seen[learnt[k] >> 1] = 0
    if n_learnt == 1:
        out_bt[0] = 0
        return 1
    mi = 1
    for k in range(2, n_learnt):
        if S.level[learnt[k] >> 1] > S.level[learnt[mi] >> 1]:
            mi = k
    q = learnt[1]
    learnt[1] = learnt[mi]
    learnt[mi] = q
    out_bt[0] = S.level[learnt[1] >> 1]
    return n_learnt


cdef void _cancel_until(Sol* S, int lvl) noexcept nogil:
    cdef int k, v
    if S.n_lim <= lvl:
        return
    for k in range(S.trail_len - 1, S.trail_lim[lvl] - 1, -1):
        v = S.trail[k] >> 1
        S.saved[v] = S.assigns[v]
        S.assigns[v] = -1
        _heap_insert(S, v)
    S.trail_len = S.trail_lim[lvl]
    S.n_lim = lvl
    S.qhead = S.trail_len


cdef i64 _luby(i64 i) noexcept nogil:
    cdef i64 size = 1
    cdef int seq = 0
    while size < i + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != i:
        size = (size - 1) >> 1
        seq -= 1
        i = i % size
    return (<i64>1) << seq


def sat_solve(n_vars, clauses, conflict_limit=-1):
    """Solve a CNF over DIMACS-style clauses (lists of nonzero ints).

    Returns ("sat", model) with model[v] in {0, 1} for variables 1..n_vars,
    ("unsat", None), or ("unknown", None) once conflict_limit is exceeded.
    Result-identical to the pure implementation.
    """
    cdef int nv = n_vars
    cdef i64 climit = conflict_limit
    cdef Sol S
    cdef int v, lit, lv, n_lits, cid, confl, bt, n_learnt
    cdef i64 conflicts = 0, budget, since_restart = 0, restart_idx = 0
    cdef signed char* seen = NULL
    cdef int* lits_buf = NULL
    cdef bint dup, drop
    cdef int k

    if nv < 0:
        raise ValueError("negative variable count")

    S.assigns = NULL
    S.saved = NULL
    S.level = NULL
    S.reason = NULL
    S.act = NULL
    S.trail = NULL
    S.trail_lim = NULL
    S.heap = NULL
    S.hpos = NULL
    S.arena = NULL
    S.cstart = NULL
    S.clen = NULL
    S.wdata = NULL
    S.wlen = NULL
    S.wcap = NULL
    S.n_vars = nv
    S.var_inc = 1
    S.arena_len = 0
    S.arena_cap = 16
    S.n_clauses = 0
    S.clause_cap = 16
    S.trail_len = 0
    S.n_lim = 0
    S.qhead = 0
    S.heap_size = nv

    S.assigns = <signed char*>PyMem_Malloc(max(nv, 1) * sizeof(signed char))
    S.saved = <signed char*>PyMem_Malloc(max(nv, 1) * sizeof(signed char))
    S.level = <int*>PyMem_Malloc(max(nv, 1) * sizeof(int))
    S.reason = <int*>PyMem_Malloc(max(nv, 1) * sizeof(int))
    S.act = <i64*>PyMem_Malloc(max(nv, 1) * sizeof(i64))
    S.trail = <int*>PyMem_Malloc(max(nv, 1) * sizeof(int))
    S.trail_lim = <int*>PyMem_Malloc(max(nv, 1) * sizeof(int))
    S.heap = <int*>PyMem_Malloc(max(nv, 1) * sizeof(int))
    S.hpos = <int*>PyMem_Malloc(max(nv, 1) * sizeof(int))
    S.arena = <int*>PyMem_Malloc(S.arena_cap * sizeof(int))
    S.cstart = <i64*>PyMem_Malloc(S.clause_cap * sizeof(i64))
    S.clen = <int*>PyMem_Malloc(S.clause_cap * sizeof(int))
    S.wdata = <int**>PyMem_Malloc(max(2 * nv, 1) * sizeof(int*))
    S.wlen = <int*>PyMem_Malloc(max(2 * nv, 1) * sizeof(int))
    S.wcap = <int*>PyMem_Malloc(max(2 * nv, 1) * sizeof(int))
    seen = <signed char*>PyMem_Malloc(max(nv, 1) * sizeof(signed char))
    lits_buf = <int*>PyMem_Malloc(max(nv + 1, 1) * sizeof(int))
    if S.wdata != NULL:
        for v in range(2 * nv):
            S.wdata[v] = NULL
    if (S.assigns == NULL or S.saved == NULL or S.level == NULL
            or S.reason == NULL or S.act == NULL or S.trail == NULL
            or S.trail_lim == NULL or S.heap == NULL or S.hpos == NULL
            or S.arena == NULL or S.cstart == NULL or S.clen == NULL
            or S.wdata == NULL or S.wlen == NULL or S.wcap == NULL
            or seen == NULL or lits_buf == NULL):
        _free_solver(&S, seen, lits_buf)
        raise MemoryError()

    for v in range(nv):
        S.assigns[v] = -1
        S.saved[v] = 0
        S.level[v] = 0
        S.reason[v] = -1
        S.act[v] = 0
        S.heap[v] = v
        S.hpos[v] = v
        seen[v] = 0
    for v in range(2 * nv):
        S.wlen[v] = 0
        S.wcap[v] = 0

    try:
        # load the problem
        for cl in clauses:
            n_lits = 0
            drop = False
            seen_lits = set()
            for d in cl:
                lit = 2 * (abs(<int>d) - 1) + (1 if d < 0 else 0)
                if lit ^ 1 in seen_lits:
                    drop = True
                    break
                if lit not in seen_lits:
                    seen_lits.add(lit)
                    lits_buf[n_lits] = lit
                    n_lits += 1
            if drop:
                continue
            if n_lits == 0:
                return "unsat", None
            if n_lits == 1:
                lv = _lit_val(&S, lits_buf[0])
                if lv == 0:
                    return "unsat", None
                if lv < 0:
                    _enqueue(&S, lits_buf[0], -1)
            else:
                _add_clause(&S, lits_buf, n_lits)
        if _propagate(&S) >= 0:
            return "unsat", None

        budget = RESTART_UNIT * _luby(restart_idx)
        while True:
            confl = _propagate(&S)
            if confl >= 0:
                conflicts += 1
                since_restart += 1
                if S.n_lim == 0:
                    return "unsat", None
                n_learnt = _analyze(&S, confl, seen, lits_buf, &bt)
                _cancel_until(&S, bt)
                if n_learnt == 1:
                    _enqueue(&S, lits_buf[0], -1)
                else:
                    cid = _add_clause(&S, lits_buf, n_learnt)
                    _enqueue(&S, lits_buf[0], cid)
                S.var_inc += max(S.var_inc >> 4, 1)
                if S.var_inc > ACT_RESCALE:
                    _rescale(&S)
                if 0 <= climit <= conflicts:
                    return "unknown", None
                if since_restart >= budget:
                    _cancel_until(&S, 0)
                    restart_idx += 1
                    budget = RESTART_UNIT * _luby(restart_idx)
                    since_restart = 0
            else:
                v = -1
                while S.heap_size > 0:
                    v = _heap_pop(&S)
                    if S.assigns[v] < 0:
                        break
                    v = -1
                if v < 0:
                    return "sat", [S.assigns[k] for k in range(nv)]
                S.trail_lim[S.n_lim] = S.trail_len
                S.n_lim += 1
                _enqueue(&S, 2 * v + (S.saved[v] ^ 1), -1)
    finally:
        _free_solver(&S, seen, lits_buf)


cdef void _free_solver(Sol* S, signed char* seen, int* lits_buf):
    cdef int k
    if S.wdata != NULL:
        for k in range(2 * S.n_vars):
            PyMem_Free(S.wdata[k])
    PyMem_Free(S.assigns)
    PyMem_Free(S.saved)
    PyMem_Free(S.level)
    PyMem_Free(S.reason)
    PyMem_Free(S.act)
    PyMem_Free(S.trail)
    PyMem_Free(S.trail_lim)
    PyMem_Free(S.heap)
    PyMem_Free(S.hpos)
    PyMem_Free(S.arena)
    PyMem_Free(S.cstart)
    PyMem_Free(S.clen)
    PyMem_Free(S.wdata)
    PyMem_Free(S.wlen)
    PyMem_Free(S.wcap)
    PyMem_Free(seen)
    PyMem_Free(lits_buf)
