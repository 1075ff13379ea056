"""Instantaneous information and accumulated cost of machine runs.

The cost of a computation is the sum over executed steps of the information
stored in the machine after that step: action table, state register, head
positions and leased work-tape content.  Environment-facing tapes (run and
valuation bindings) are excluded.  Head operating cost is modeled separately
(counter-based) and only added to step costs when explicitly enabled.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .machine import Configuration, MachineSpec, Status, ceil_log2

FORMAT_VERSION = "1"


# ---------------------------------------------------------------------------
# Size formulas
# ---------------------------------------------------------------------------

def fsm_size(state_count: int, symbol_count: int, move_count: int, tape_count: int = 1) -> int:
    """Action-table-plus-state-register size in bits.

    Single tape: M*N*(m+n+d) + m.  The multi-tape generalization reads one
    symbol per tape and stores one write and one move per tape:
    M*N**t*(m + t*(n+d)) + m.
    """
    if min(state_count, symbol_count, move_count) < 1 or tape_count < 1:
        raise ValueError("fsm_size arguments must be positive")
    m = ceil_log2(state_count)
    n = ceil_log2(symbol_count)
    d = ceil_log2(move_count)
    return state_count * symbol_count**tape_count * (m + tape_count * (n + d)) + m


def packed_table_bits(spec: MachineSpec) -> int:
    """Bit width of the literal table encoding.

    Each explicit row is packed with just enough bits to distinguish the
    write symbols, moves and next states that actually occur, matching the
    hand-packed table sizes used for the reference game.
    """
    writes: list[set[int]] = [set() for _ in range(spec.tape_count)]
    moves: list[set[int]] = [set() for _ in range(spec.tape_count)]
    nexts: set[int] = set()
    entries = 0
    for (state, _), (ws, mvs, nxt) in spec.table.items():
        if state in spec.halt_states:
            continue
        entries += 1
        for i in range(spec.tape_count):
            writes[i].add(ws[i])
            moves[i].add(mvs[i])
        nexts.add(nxt)
    per_entry = sum(ceil_log2(len(s)) for s in writes)
    per_entry += sum(ceil_log2(len(s)) for s in moves)
    per_entry += ceil_log2(len(nexts))
    return entries * per_entry


def counter_cost(width: int) -> int:
    """Logic storage of a count-down counter plus zero comparator, 17w - 9."""
    if width < 1:
        raise ValueError("counter width must be at least 1")
    return 17 * width - 9


def head_cost_per_step(state_count: int, symbol_count: int, move_count: int) -> int:
    """Per-step cost of operating the read/write head.

    2n + M*(17m-9) + N*(17n-9) + D*(17d-9), valid when every width is at
    least one bit (all of M, N, D >= 2).
    """
    if min(state_count, symbol_count, move_count) < 2:
        raise ValueError("head cost model needs M, N, D >= 2")
    m = ceil_log2(state_count)
    n = ceil_log2(symbol_count)
    d = ceil_log2(move_count)
    return (
        2 * n
        + state_count * counter_cost(m)
        + symbol_count * counter_cost(n)
        + move_count * counter_cost(d)
    )


@dataclass(frozen=True)
class HeadCostModel:
    """Head-cost parameters pinned to the counter formula."""

    state_count: int
    symbol_count: int
    move_count: int

    @property
    def per_step_bits(self) -> int:
        return head_cost_per_step(self.state_count, self.symbol_count, self.move_count)


# ---------------------------------------------------------------------------
# Step information
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CostOptions:
    table_mode: str = "formula"  # "formula" or "packed"
    include_head: bool = False


def table_bits(spec: MachineSpec, mode: str = "formula") -> int:
    if mode == "formula":
        return fsm_size(spec.state_count, spec.symbol_count, spec.move_count, spec.tape_count)
    if mode == "packed":
        return packed_table_bits(spec)
    raise ValueError(f"unknown table mode {mode!r}")


@dataclass(frozen=True)
class CostConstants:
    table_bits: int
    state_bits: int
    symbol_bits: int
    head_bits: int

    @property
    def fixed_bits(self) -> int:
        return self.table_bits + self.state_bits + self.head_bits


def cost_constants(spec: MachineSpec, options: CostOptions = CostOptions()) -> CostConstants:
    head = 0
    if options.include_head:
        head = head_cost_per_step(spec.state_count, spec.symbol_count, spec.move_count)
    return CostConstants(
        table_bits=table_bits(spec, options.table_mode),
        state_bits=spec.state_bits,
        symbol_bits=spec.symbol_bits,
        head_bits=head,
    )


def _tape_terms(config: Configuration, symbol_bits: int) -> tuple[int, int]:
    head_bits = 0
    content_bits = 0
    for tape in config.tapes:
        if not tape.counts_cost:
            continue
        used = tape.leased_count()
        head_bits += ceil_log2(used + 1)
        content_bits += used * symbol_bits
    return head_bits, content_bits


def _breakdown(consts: CostConstants, head_pos_bits: int, tape_bits: int) -> dict:
    out = {
        "fsm": consts.table_bits,
        "state": consts.state_bits,
        "head": head_pos_bits,
        "tape": tape_bits,
    }
    if consts.head_bits:
        out["head_cost"] = consts.head_bits
    return out


def instantaneous_information(
    config: Configuration, options: CostOptions = CostOptions()
) -> tuple[float, dict]:
    """Information stored in the machine at its current configuration."""
    consts = cost_constants(config.machine, options)
    head_pos_bits, tape_bits = _tape_terms(config, consts.symbol_bits)
    bits = consts.fixed_bits + head_pos_bits + tape_bits
    return float(bits), _breakdown(consts, head_pos_bits, tape_bits)


def step_cost_preview(config: Configuration, options: CostOptions = CostOptions()) -> tuple[float, dict]:
    """Information of the post-state of the next step, without stepping.

    Mirrors the lease rule: a write leases the cell under the head unless it
    is an unleased cell receiving the blank.  Used for budget admission.
    """
    spec = config.machine
    consts = cost_constants(spec, options)
    syms = tuple(t.read(t.head) for t in config.tapes)
    writes, _, _ = spec.action(config.state, syms)
    head_pos_bits = 0
    tape_bits = 0
    for tape, w in zip(config.tapes, writes):
        if not tape.counts_cost:
            continue
        used = tape.leased_count()
        if w != 0 and not tape.is_leased(tape.head):
            used += 1
        head_pos_bits += ceil_log2(used + 1)
        tape_bits += used * consts.symbol_bits
    bits = consts.fixed_bits + head_pos_bits + tape_bits
    return float(bits), _breakdown(consts, head_pos_bits, tape_bits)


# ---------------------------------------------------------------------------
# Ledgers
# ---------------------------------------------------------------------------

@dataclass
class StepCost:
    step: int
    bits: float
    breakdown: dict


@dataclass
class CostLedger:
    """Per-step information records and their running total."""

    per_step: list[StepCost] = field(default_factory=list)
    total_bits: float = 0.0

    def add(self, step_index: int, bits: float, breakdown: dict) -> None:
        self.per_step.append(StepCost(step_index, bits, breakdown))
        self.total_bits += bits

    @property
    def steps(self) -> int:
        return len(self.per_step)

    def verify(self, rel_tol: float = 1e-9) -> bool:
        total = sum(s.bits for s in self.per_step)
        scale = max(abs(total), abs(self.total_bits), 1.0)
        return abs(total - self.total_bits) <= rel_tol * scale


def accumulate(
    trace: Iterable[Configuration], options: CostOptions = CostOptions()
) -> CostLedger:
    """Ledger for a trace of post-step configurations (sleep contributes nothing)."""
    ledger = CostLedger()
    for config in trace:
        if config.status is Status.SLEEPING:
            continue
        bits, breakdown = instantaneous_information(config, options)
        ledger.add(config.step_count, bits, breakdown)
    return ledger


# ---------------------------------------------------------------------------
# Multi-machine aggregation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SharedRegion:
    """A block of work-tape cells aliased between machines."""

    name: str
    cell_count: int
    symbol_bits: int


def ensemble_cost(
    ledgers: Mapping[int, CostLedger],
    shared_regions: Mapping[SharedRegion, Iterable[int]] | None = None,
) -> float:
    """Total cost of an ensemble with shared-memory attribution.

    Per-machine ledgers each count every cell their machine uses, including
    shared ones; each shared region is then attributed to the sharing
    machine with the most executed steps (ties to the lowest machine id) by
    removing the other sharers' per-step contributions for that region.
    """
    total = sum(ledger.total_bits for ledger in ledgers.values())
    for region, machines in (shared_regions or {}).items():
        ids = sorted(set(machines))
        for mid in ids:
            if mid not in ledgers:
                raise KeyError(f"shared region {region.name!r} references unknown machine {mid}")
        winner = max(ids, key=lambda mid: (ledgers[mid].steps, -mid))
        for mid in ids:
            if mid != winner:
                total -= region.cell_count * region.symbol_bits * ledgers[mid].steps
    return total


# ---------------------------------------------------------------------------
# Trace export
# ---------------------------------------------------------------------------

def trace_records(ledger: CostLedger, machine_id: int | str = 0):
    for entry in ledger.per_step:
        yield {
            "machine": machine_id,
            "lambda": entry.step,
            "bits": entry.bits,
            "breakdown": entry.breakdown,
        }


def trace_to_jsonl(ledger: CostLedger, machine_id: int | str = 0) -> str:
    lines = [json.dumps(rec, sort_keys=True) for rec in trace_records(ledger, machine_id)]
    return "\n".join(lines) + ("\n" if lines else "")


def trace_to_csv(ledger: CostLedger, machine_id: int | str = 0) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["machine", "lambda", "bits", "fsm", "state", "head", "tape", "head_cost"])
    for rec in trace_records(ledger, machine_id):
        b = rec["breakdown"]
        writer.writerow(
            [
                rec["machine"],
                rec["lambda"],
                rec["bits"],
                b.get("fsm", 0),
                b.get("state", 0),
                b.get("head", 0),
                b.get("tape", 0),
                b.get("head_cost", 0),
            ]
        )
    return buf.getvalue()
