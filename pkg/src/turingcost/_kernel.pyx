# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled run loop.  Must mirror _kernel_py.run_loop exactly.

Tapes are converted from sparse dicts to windowed C buffers for the duration
of the loop and converted back on exit.  The window grows geometrically when
a head leaves it, so unbounded two-way tapes keep working.
"""

from libc.stdlib cimport calloc, free
from libc.string cimport memcpy


cdef struct CTape:
    long long* val
    unsigned char* leased
    long long lo      # tape position held in buffer slot 0
    long long cap
    long long head
    long long used


cdef inline int bitlen(unsigned long long x) nogil:
    cdef int b = 0
    while x:
        b += 1
        x >>= 1
    return b


cdef int tape_reserve(CTape* tp, long long pos) except -1:
    """Widen the window so ``pos`` is addressable."""
    if tp.cap > 0 and tp.lo <= pos < tp.lo + tp.cap:
        return 0
    cdef long long slack = tp.cap if tp.cap > 64 else 64
    cdef long long newlo = tp.lo if tp.cap > 0 else pos
    cdef long long newhi = tp.lo + tp.cap if tp.cap > 0 else pos + 1
    if pos < newlo:
        newlo = pos - slack
    if pos >= newhi:
        newhi = pos + slack + 1
    cdef long long newcap = newhi - newlo
    cdef long long* nval = <long long*> calloc(newcap, sizeof(long long))
    cdef unsigned char* nleased = <unsigned char*> calloc(newcap, 1)
    if nval == NULL or nleased == NULL:
        free(nval)
        free(nleased)
        raise MemoryError()
    cdef long long off
    if tp.cap > 0:
        off = tp.lo - newlo
        memcpy(nval + off, tp.val, tp.cap * sizeof(long long))
        memcpy(nleased + off, tp.leased, tp.cap)
        free(tp.val)
        free(tp.leased)
    tp.val = nval
    tp.leased = nleased
    tp.lo = newlo
    tp.cap = newcap
    return 0


def run_loop(enc, cells, heads, long long state, long long step_count,
             double budget, double start_total, long long max_steps, bint collect):
    """See _kernel_py.run_loop; same arguments, same results."""
    cdef long long t = enc.tape_count
    cdef long long N = enc.symbol_count
    cdef long long[::1] writes = enc.writes
    cdef long long[::1] moves = enc.moves
    cdef long long[::1] nexts = enc.nexts
    cdef unsigned char[::1] halt = enc.halt
    cdef double fixed = enc.fixed_bits
    cdef long long n_bits = enc.symbol_bits
    cdef double INF = float("inf")

    cdef CTape* tapes = <CTape*> calloc(t, sizeof(CTape))
    if tapes == NULL:
        raise MemoryError()

    cdef long long i, pos, lo, hi, u, idx, base, w
    cdef double total = start_total
    cdef double bits
    cdef long long head_pos_bits, tape_bits
    cdef int status = 0
    per_step = []

    try:
        for i in range(t):
            d = cells[i]
            tapes[i].head = heads[i]
            tapes[i].used = len(d)
            if d:
                lo = min(d)
                hi = max(d)
            else:
                lo = hi = tapes[i].head
            if tapes[i].head < lo:
                lo = tapes[i].head
            if tapes[i].head > hi:
                hi = tapes[i].head
            tape_reserve(&tapes[i], lo)
            tape_reserve(&tapes[i], hi)
            for pos, w in d.items():
                tapes[i].val[pos - tapes[i].lo] = w
                tapes[i].leased[pos - tapes[i].lo] = 1

        while True:
            if halt[state]:
                status = 1
                break
            if budget < INF and total >= budget:
                status = 2
                break
            if step_count >= max_steps:
                status = 0
                break

            idx = state
            for i in range(t):
                pos = tapes[i].head
                if tapes[i].lo <= pos < tapes[i].lo + tapes[i].cap:
                    idx = idx * N + tapes[i].val[pos - tapes[i].lo]
                else:
                    idx = idx * N
            base = idx * t

            bits = fixed
            head_pos_bits = 0
            tape_bits = 0
            for i in range(t):
                u = tapes[i].used
                pos = tapes[i].head
                if writes[base + i] != 0:
                    if not (tapes[i].lo <= pos < tapes[i].lo + tapes[i].cap
                            and tapes[i].leased[pos - tapes[i].lo]):
                        u += 1
                head_pos_bits += bitlen(<unsigned long long> u)
                tape_bits += u * n_bits
            bits += head_pos_bits + tape_bits
            if budget < INF and total + bits > budget:
                status = 2
                break

            for i in range(t):
                w = writes[base + i]
                pos = tapes[i].head
                tape_reserve(&tapes[i], pos)
                if w != 0 or tapes[i].leased[pos - tapes[i].lo]:
                    if not tapes[i].leased[pos - tapes[i].lo]:
                        tapes[i].used += 1
                        tapes[i].leased[pos - tapes[i].lo] = 1
                    tapes[i].val[pos - tapes[i].lo] = w
                tapes[i].head = pos + moves[base + i]
            state = nexts[idx]
            step_count += 1
            total += bits
            if collect:
                per_step.append((bits, head_pos_bits, tape_bits))
            if halt[state]:
                status = 1
                break

        out_heads = []
        for i in range(t):
            d = cells[i]
            d.clear()
            for pos in range(tapes[i].cap):
                if tapes[i].leased[pos]:
                    d[tapes[i].lo + pos] = tapes[i].val[pos]
            out_heads.append(tapes[i].head)
    finally:
        for i in range(t):
            free(tapes[i].val)
            free(tapes[i].leased)
        free(tapes)

    return status, state, step_count, out_heads, per_step
