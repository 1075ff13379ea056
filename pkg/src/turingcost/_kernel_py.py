"""Pure-Python twin of the compiled run loop.

Semantics here and in _kernel.pyx must stay bit-identical: budget admission
happens against the cost of the step's post-state, a write leases the cell
unless an unleased cell receives the blank, and step information is
fixed_bits plus, per tape, used*symbol_bits + ceil_log2(used+1).
"""

from __future__ import annotations

import math


def run_loop(enc, cells, heads, state, step_count, budget, start_total, max_steps, collect):
    """Run until halt, budget exhaustion, or the absolute step cap.

    Returns (status, state, step_count, heads, per_step) with status 0 when
    the step cap stopped a still-running machine, 1 on halt, 2 on budget
    exhaustion.  ``cells`` dicts are mutated in place.
    """
    t = enc.tape_count
    N = enc.symbol_count
    writes = enc.writes
    moves = enc.moves
    nexts = enc.nexts
    halt = enc.halt
    fixed = enc.fixed_bits
    n_bits = enc.symbol_bits
    inf = math.inf

    used = [len(c) for c in cells]
    heads = list(heads)
    total = start_total
    per_step = []
    status = 0

    while True:
        if halt[state]:
            status = 1
            break
        if budget != inf and total >= budget:
            status = 2
            break
        if step_count >= max_steps:
            status = 0
            break

        idx = state
        for i in range(t):
            idx = idx * N + cells[i].get(heads[i], 0)
        base = idx * t

        bits = fixed
        head_pos_bits = 0
        tape_bits = 0
        for i in range(t):
            u = used[i]
            if writes[base + i] != 0 and heads[i] not in cells[i]:
                u += 1
            head_pos_bits += u.bit_length()
            tape_bits += u * n_bits
        bits += head_pos_bits + tape_bits
        if budget != inf and total + bits > budget:
            status = 2
            break

        for i in range(t):
            w = writes[base + i]
            pos = heads[i]
            tape = cells[i]
            if w != 0 or pos in tape:
                if pos not in tape:
                    used[i] += 1
                tape[pos] = w
            heads[i] += moves[base + i]
        state = nexts[idx]
        step_count += 1
        total += bits
        if collect:
            per_step.append((bits, head_pos_bits, tape_bits))
        if halt[state]:
            status = 1
            break

    return status, state, step_count, heads, per_step
