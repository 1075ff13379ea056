"""Hot-loop execution engine with compiled/pure kernel selection.

Budgeted machine runs spend nearly all their time in the step-and-meter
loop.  That loop exists twice with identical semantics: a Cython extension
(turingcost._kernel) and a pure-Python twin (turingcost._kernel_py).  The
compiled kernel is used when it imported successfully and the configuration
is "plain" (work tapes only, no aliases, no write log); otherwise the pure
loop runs.  Set TURINGCOST_PURE=1 to force the pure kernel.
"""

from __future__ import annotations

import math
import os
import weakref
from array import array
from dataclasses import dataclass

from . import _kernel_py
from .machine import Configuration, MachineSpec, Status, Tape

try:  # compiled accelerator is optional
    from . import _kernel  # type: ignore[attr-defined]
except ImportError:  # pragma: no cover - depends on build environment
    _kernel = None

if os.environ.get("TURINGCOST_PURE") == "1":
    _kernel = None

KERNEL_COMPILED = _kernel is not None


def active_kernel_name() -> str:
    return "compiled" if KERNEL_COMPILED else "pure-python"


@dataclass
class EncodedMachine:
    """Array form of a machine's action table for the run loop."""

    state_count: int
    symbol_count: int
    tape_count: int
    writes: array
    moves: array
    nexts: array
    halt: array
    fixed_bits: float
    symbol_bits: int
    table_bits: int
    state_bits: int
    head_bits: int


_cache: "weakref.WeakKeyDictionary[MachineSpec, dict]" = weakref.WeakKeyDictionary()


def encode(spec: MachineSpec, options) -> EncodedMachine:
    from . import costs

    key = (options.table_mode, options.include_head)
    per_spec = _cache.setdefault(spec, {})
    enc = per_spec.get(key)
    if enc is not None:
        return enc

    M, N, t = spec.state_count, spec.symbol_count, spec.tape_count
    entries = M * N**t
    writes = array("q", bytes(8 * entries * t))
    moves = array("q", bytes(8 * entries * t))
    nexts = array("q", bytes(8 * entries))
    halt = array("B", bytes(M))
    for h in spec.halt_states:
        halt[h] = 1
    for (state, syms), (ws, mvs, nxt) in spec.table.items():
        idx = state
        for s in syms:
            idx = idx * N + s
        base = idx * t
        for i in range(t):
            writes[base + i] = ws[i]
            moves[base + i] = mvs[i]
        nexts[idx] = nxt
    consts = costs.cost_constants(spec, options)
    enc = EncodedMachine(
        state_count=M,
        symbol_count=N,
        tape_count=t,
        writes=writes,
        moves=moves,
        nexts=nexts,
        halt=halt,
        fixed_bits=float(consts.fixed_bits),
        symbol_bits=consts.symbol_bits,
        table_bits=consts.table_bits,
        state_bits=consts.state_bits,
        head_bits=consts.head_bits,
    )
    per_spec[key] = enc
    return enc


def kernel_eligible(config: Configuration) -> bool:
    if config.status is not Status.RUNNING or config.write_log is not None:
        return False
    for tape in config.tapes:
        if type(tape) is not Tape or tape.aliases:
            return False
    return True


def run_encoded(config, budget_bits, ledger, max_steps, options):
    """Run the hot loop on ``config`` and append per-step costs to ``ledger``."""
    enc = encode(config.machine, options)
    kern = _kernel if KERNEL_COMPILED else _kernel_py
    cells = [tape.cells for tape in config.tapes]
    heads = [tape.head for tape in config.tapes]
    cap = max_steps if max_steps is not None else 2**62
    status, state, steps, heads, per_step = kern.run_loop(
        enc,
        cells,
        heads,
        config.state,
        config.step_count,
        float(budget_bits) if budget_bits is not None else math.inf,
        ledger.total_bits,
        cap,
        True,
    )
    start = config.step_count
    config.state = state
    config.step_count = steps
    for tape, head in zip(config.tapes, heads):
        tape.head = head
    config.status = {0: Status.RUNNING, 1: Status.HALTED, 2: Status.BUDGET_EXCEEDED}[status]
    for i, (bits, head_pos_bits, tape_bits) in enumerate(per_step):
        breakdown = {
            "fsm": enc.table_bits,
            "state": enc.state_bits,
            "head": head_pos_bits,
            "tape": tape_bits,
        }
        if enc.head_bits:
            breakdown["head_cost"] = enc.head_bits
        ledger.add(start + i + 1, bits, breakdown)
    return config
