"""Deterministic multi-tape Turing machines with relative-skip head moves.

A machine has M states, N symbols (symbol 0 is the blank), t tapes and a
maximal head skip Dmax, so each step may move every head by any integer in
[-Dmax, +Dmax].  Tapes are unbounded in both directions and sparse: a cell
is "leased" once a non-blank value has been written to it (or it was primed
as program content), and only leased cells count toward stored information.
Freeing a lease restores the cell to blank.

The action table is total over the non-halt states; rows for halt states
exist implicitly but are never executed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Mapping, Sequence

FORMAT_VERSION = "1"


class MachineError(Exception):
    """Malformed machine description or illegal operation on a machine."""


class StepRefused(MachineError):
    """step() called on a configuration that is not running."""


def ceil_log2(x: int) -> int:
    """Ceiling of log2 with the convention ceil_log2(1) == 0."""
    if x < 1:
        raise ValueError(f"ceil_log2 needs a positive argument, got {x}")
    return (x - 1).bit_length()


# ---------------------------------------------------------------------------
# Machine specification
# ---------------------------------------------------------------------------

Action = tuple[tuple[int, ...], tuple[int, ...], int]  # writes, moves, next state


@dataclass(frozen=True, eq=False)  # identity hash: specs are cache keys
class MachineSpec:
    """Finite control of a skip-move machine.

    ``table`` maps (state, read-vector) to (write-vector, move-vector,
    next-state) and must cover every non-halt state crossed with every
    symbol vector.  Halt states get synthesized no-op rows so the table is
    total over all states, as required by the configuration invariants.
    """

    state_count: int
    symbol_count: int
    tape_count: int
    max_skip: int
    table: Mapping[tuple[int, tuple[int, ...]], Action]
    initial_state: int
    halt_states: frozenset[int]
    state_names: tuple[str, ...] = ()
    symbol_names: tuple[str, ...] = ()
    explicit_entries: int = 0  # table rows given by the author (halt rows excluded)

    # -- derived sizes ----------------------------------------------------

    @property
    def move_count(self) -> int:
        """D: number of distinct head movements, 2*Dmax + 1."""
        return 2 * self.max_skip + 1

    @property
    def state_bits(self) -> int:
        return ceil_log2(self.state_count)

    @property
    def symbol_bits(self) -> int:
        return ceil_log2(self.symbol_count)

    @property
    def move_bits(self) -> int:
        return ceil_log2(self.move_count)

    def validate(self) -> None:
        M, N, t = self.state_count, self.symbol_count, self.tape_count
        if M < 1 or N < 1 or t < 1:
            raise MachineError("state, symbol and tape counts must be positive")
        if self.max_skip < 0:
            raise MachineError("max_skip must be non-negative")
        if not 0 <= self.initial_state < M:
            raise MachineError("initial state out of range")
        for h in self.halt_states:
            if not 0 <= h < M:
                raise MachineError("halt state out of range")
        want = (M - len(self.halt_states)) * N**t
        seen = 0
        for (state, syms), (writes, moves, nxt) in self.table.items():
            if state in self.halt_states:
                continue
            seen += 1
            if len(syms) != t or len(writes) != t or len(moves) != t:
                raise MachineError(f"row {(state, syms)}: vector lengths must equal tape count")
            if any(not 0 <= s < N for s in syms) or any(not 0 <= w < N for w in writes):
                raise MachineError(f"row {(state, syms)}: symbol out of range")
            if any(abs(mv) > self.max_skip for mv in moves):
                raise MachineError(f"row {(state, syms)}: move out of range [-{self.max_skip}, {self.max_skip}]")
            if not 0 <= nxt < M:
                raise MachineError(f"row {(state, syms)}: next state out of range")
        if seen != want:
            raise MachineError(f"partial table: {seen} rows for non-halt states, need {want}")

    def action(self, state: int, syms: tuple[int, ...]) -> Action:
        return self.table[(state, syms)]


def make_machine(
    state_count: int,
    symbol_count: int,
    tape_count: int,
    max_skip: int,
    table: Mapping[tuple[int, tuple[int, ...]], Action],
    initial_state: int = 0,
    halt_states: Iterable[int] = (),
    state_names: Sequence[str] = (),
    symbol_names: Sequence[str] = (),
) -> MachineSpec:
    """Build a validated MachineSpec, synthesizing rows for halt states."""
    halt = frozenset(halt_states)
    explicit = len(table)
    full = dict(table)
    for h in halt:
        for syms in _symbol_vectors(symbol_count, tape_count):
            full.setdefault((h, syms), (syms, (0,) * tape_count, h))
    spec = MachineSpec(
        state_count=state_count,
        symbol_count=symbol_count,
        tape_count=tape_count,
        max_skip=max_skip,
        table=full,
        initial_state=initial_state,
        halt_states=halt,
        state_names=tuple(state_names),
        symbol_names=tuple(symbol_names),
        explicit_entries=explicit,
    )
    spec.validate()
    return spec


def _symbol_vectors(symbol_count: int, tape_count: int):
    if tape_count == 0:
        yield ()
        return
    for rest in _symbol_vectors(symbol_count, tape_count - 1):
        for s in range(symbol_count):
            yield (s,) + rest


# ---------------------------------------------------------------------------
# Machine-spec documents
# ---------------------------------------------------------------------------

def load_machine(doc: Mapping) -> MachineSpec:
    """Parse and validate a machine-spec document (see machine_to_doc)."""
    try:
        state_names = list(doc["states"])
        symbol_names = list(doc["symbols"])
        tapes = int(doc["tapes"])
        max_skip = int(doc["max_skip"])
        initial = doc["initial_state"]
        rows = doc["table"]
    except (KeyError, TypeError) as exc:
        raise MachineError(f"malformed machine document: {exc}") from exc
    halt_names = list(doc.get("halt_states", []))
    sid = {name: i for i, name in enumerate(state_names)}
    yid = {name: i for i, name in enumerate(symbol_names)}
    if len(sid) != len(state_names) or len(yid) != len(symbol_names):
        raise MachineError("duplicate state or symbol names")
    try:
        halt = [sid[h] for h in halt_names]
        table = {}
        for row in rows:
            key = (sid[row["state"]], tuple(yid[s] for s in row["read"]))
            if key in table:
                raise MachineError(f"duplicate table row for {key}")
            table[key] = (
                tuple(yid[s] for s in row["write"]),
                tuple(int(m) for m in row["move"]),
                sid[row["next"]],
            )
        return make_machine(
            state_count=len(state_names),
            symbol_count=len(symbol_names),
            tape_count=tapes,
            max_skip=max_skip,
            table=table,
            initial_state=sid[initial],
            halt_states=halt,
            state_names=state_names,
            symbol_names=symbol_names,
        )
    except KeyError as exc:
        raise MachineError(f"unknown name in machine document: {exc}") from exc


def load_machine_file(path) -> MachineSpec:
    with open(path, encoding="utf-8") as fh:
        return load_machine(json.load(fh))


def machine_to_doc(spec: MachineSpec) -> dict:
    """Serialize a MachineSpec to the JSON document layout."""
    states = list(spec.state_names) or [f"s{i}" for i in range(spec.state_count)]
    symbols = list(spec.symbol_names) or [f"y{i}" for i in range(spec.symbol_count)]
    rows = []
    for (state, syms), (writes, moves, nxt) in sorted(spec.table.items()):
        if state in spec.halt_states:
            continue
        rows.append(
            {
                "state": states[state],
                "read": [symbols[s] for s in syms],
                "write": [symbols[w] for w in writes],
                "move": list(moves),
                "next": states[nxt],
            }
        )
    return {
        "format_version": FORMAT_VERSION,
        "states": states,
        "halt_states": [states[h] for h in sorted(spec.halt_states)],
        "symbols": symbols,
        "tapes": spec.tape_count,
        "max_skip": spec.max_skip,
        "initial_state": states[spec.initial_state],
        "table": rows,
    }


# ---------------------------------------------------------------------------
# Tapes
# ---------------------------------------------------------------------------

class Tape:
    """Sparse two-way-infinite tape.

    ``cells`` holds exactly the leased positions.  Writing the blank to an
    unleased cell is information-free and does not lease it; writing any
    symbol to a leased cell keeps the lease.  Positions may be aliased to
    cells of another tape (shared work-tape overlap): reads and writes at
    an aliased position are served by the owning tape.
    """

    __slots__ = ("cells", "head", "aliases")

    def __init__(self, content: Mapping[int, int] | None = None, head: int = 0):
        self.cells: dict[int, int] = {}
        self.head = head
        self.aliases: dict[int, tuple[Tape, int]] = {}
        if content:
            for pos, sym in content.items():
                self.prime(pos, sym)

    def prime(self, pos: int, sym: int) -> None:
        """Write during initialization: leases the cell even for blanks."""
        tape, p = self.physical(pos)
        tape.cells[p] = sym

    def physical(self, pos: int) -> tuple["Tape", int]:
        alias = self.aliases.get(pos)
        return (self, pos) if alias is None else alias

    def read(self, pos: int) -> int:
        tape, p = self.physical(pos)
        return tape.cells.get(p, 0)

    def write(self, pos: int, sym: int) -> None:
        tape, p = self.physical(pos)
        if sym != 0 or p in tape.cells:
            tape.cells[p] = sym

    def is_leased(self, pos: int) -> bool:
        tape, p = self.physical(pos)
        return p in tape.cells

    def free(self, pos: int) -> None:
        tape, p = self.physical(pos)
        tape.cells.pop(p, None)

    def leased_count(self) -> int:
        n = len(self.cells)
        for tape, p in self.aliases.values():
            if p in tape.cells:
                n += 1
        return n

    def attach_alias(self, start: int, other: "Tape", other_start: int, length: int) -> None:
        """Alias ``length`` cells from ``start`` onto another tape's cells."""
        for i in range(length):
            if other.aliases.get(other_start + i) is not None:
                raise MachineError("cannot alias onto an aliased cell")
            if start + i in self.cells:
                raise MachineError("cannot alias over a leased local cell")
            self.aliases[start + i] = (other, other_start + i)

    def copy(self) -> "Tape":
        t = Tape()
        t.cells = dict(self.cells)
        t.head = self.head
        t.aliases = dict(self.aliases)
        return t

    # Hooks used by environment-facing tape bindings; plain work tapes
    # never block and always count toward stored information.
    counts_cost = True

    def blocked(self, pos: int) -> bool:
        return False


class Status(Enum):
    RUNNING = "running"
    SLEEPING = "sleeping"
    HALTED = "halted"
    BUDGET_EXCEEDED = "budget_exceeded"


@dataclass
class Configuration:
    """Instantaneous machine state: control state, tapes, and step count."""

    machine: MachineSpec
    state: int
    tapes: list
    step_count: int = 0
    status: Status = Status.RUNNING
    write_log: list | None = None  # (tape_obj, pos, sym) per write when set

    def clone(self) -> "Configuration":
        return Configuration(
            machine=self.machine,
            state=self.state,
            tapes=[t.copy() for t in self.tapes],
            step_count=self.step_count,
            status=self.status,
        )


def initial_configuration(
    spec: MachineSpec,
    tape_contents: Sequence[Mapping[int, int] | None] | None = None,
    tapes: Sequence | None = None,
) -> Configuration:
    """Fresh configuration; program content passed per tape leases its cells."""
    if tapes is None:
        contents = list(tape_contents or [])
        contents += [None] * (spec.tape_count - len(contents))
        tapes = [Tape(c) for c in contents[: spec.tape_count]]
    if len(tapes) != spec.tape_count:
        raise MachineError("tape count mismatch")
    status = Status.HALTED if spec.initial_state in spec.halt_states else Status.RUNNING
    return Configuration(machine=spec, state=spec.initial_state, tapes=list(tapes), status=status)


# ---------------------------------------------------------------------------
# Step semantics
# ---------------------------------------------------------------------------

def step(config: Configuration) -> Configuration:
    """One read-write-move cycle.  Mutates and returns ``config``.

    Raises StepRefused unless the configuration is running.  If any blocking
    tape (run-tape binding) has an unwritten cell under its head the machine
    goes to sleep instead of stepping.
    """
    if config.status is not Status.RUNNING:
        raise StepRefused(f"cannot step a {config.status.value} configuration")
    for tape in config.tapes:
        if tape.blocked(tape.head):
            config.status = Status.SLEEPING
            return config
    spec = config.machine
    syms = tuple(t.read(t.head) for t in config.tapes)
    writes, moves, nxt = spec.action(config.state, syms)
    for tape, w, mv in zip(config.tapes, writes, moves):
        tape.write(tape.head, w)
        if config.write_log is not None:
            config.write_log.append((*tape.physical(tape.head), w))
        tape.head += mv
    config.state = nxt
    config.step_count += 1
    if nxt in spec.halt_states:
        config.status = Status.HALTED
    return config


def wake(config: Configuration) -> Configuration:
    if config.status is Status.SLEEPING:
        config.status = Status.RUNNING
    return config


def free_cells(config: Configuration, tape_index: int, count_from_head: int) -> Configuration:
    """End the lease on ``count_from_head`` cells starting at the head."""
    if not 0 <= tape_index < len(config.tapes):
        raise MachineError("tape index out of range")
    if count_from_head < 0:
        raise MachineError("count_from_head must be non-negative")
    tape = config.tapes[tape_index]
    for pos in range(tape.head, tape.head + count_from_head):
        tape.free(pos)
    return config


# ---------------------------------------------------------------------------
# Budgeted runs
# ---------------------------------------------------------------------------

def run(
    config: Configuration,
    budget_bits: float = float("inf"),
    ledger=None,
    max_steps: int | None = None,
    cost_options=None,
    use_kernel: bool = True,
):
    """Iterate step and cost accrual until halt, sleep, or budget exhaustion.

    A step is executed only when the accumulated cost plus the cost of the
    step's post-state stays within ``budget_bits``; otherwise the status
    becomes BUDGET_EXCEEDED with the configuration unchanged.  Returns the
    configuration; per-step information is appended to ``ledger`` (a
    costs.CostLedger, created when None).
    """
    from . import costs, engine

    if cost_options is None:
        cost_options = costs.CostOptions()
    if ledger is None:
        ledger = costs.CostLedger()
    config.ledger = ledger  # type: ignore[attr-defined]

    if use_kernel and engine.kernel_eligible(config):
        engine.run_encoded(config, budget_bits, ledger, max_steps, cost_options)
        return config

    while True:
        if config.status is not Status.RUNNING:
            break
        if budget_bits != float("inf") and ledger.total_bits >= budget_bits:
            config.status = Status.BUDGET_EXCEEDED
            break
        if max_steps is not None and config.step_count >= max_steps:
            break
        if any(t.blocked(t.head) for t in config.tapes):
            config.status = Status.SLEEPING
            break
        bits, breakdown = costs.step_cost_preview(config, cost_options)
        if budget_bits != float("inf") and ledger.total_bits + bits > budget_bits:
            config.status = Status.BUDGET_EXCEEDED
            break
        step(config)
        ledger.add(config.step_count, bits, breakdown)
    return config


# ---------------------------------------------------------------------------
# Skip elimination
# ---------------------------------------------------------------------------

def expand_skips(spec: MachineSpec) -> MachineSpec:
    """Mechanically derive an equivalent machine with max_skip 1.

    Each table entry moving by |v| > 1 is rewritten to move one cell and
    chain through fresh "move states" that write back what they read and
    keep moving toward the target state.  Single-tape machines only.
    """
    if spec.tape_count != 1:
        raise MachineError("skip elimination is implemented for single-tape machines")
    if spec.max_skip <= 1:
        return spec

    move_states: dict[tuple[int, int], int] = {}
    worklist: list[tuple[int, int, int]] = []
    next_id = spec.state_count

    def move_state(target: int, remaining: int) -> int:
        nonlocal next_id
        key = (target, remaining)
        if key not in move_states:
            move_states[key] = next_id
            worklist.append((next_id, target, remaining))
            next_id += 1
        return move_states[key]

    def hop(target: int, v: int) -> tuple[int, int]:
        """First unit move toward target, then either land or chain."""
        s = 1 if v > 0 else -1
        rest = v - s
        if rest == 0:
            return s, target
        return s, move_state(target, rest)

    table: dict[tuple[int, tuple[int, ...]], Action] = {}
    for (state, syms), (writes, moves, nxt) in spec.table.items():
        if state in spec.halt_states:
            continue
        v = moves[0]
        if abs(v) <= 1:
            table[(state, syms)] = (writes, moves, nxt)
        else:
            mv, tgt = hop(nxt, v)
            table[(state, syms)] = (writes, (mv,), tgt)

    # Move states write back the scanned symbol and keep moving; each hop
    # shrinks |remaining|, so the worklist closes.
    while worklist:
        ms, target, remaining = worklist.pop()
        for s in range(spec.symbol_count):
            mv, tgt = hop(target, remaining)
            table[(ms, (s,))] = ((s,), (mv,), tgt)

    return make_machine(
        state_count=next_id,
        symbol_count=spec.symbol_count,
        tape_count=1,
        max_skip=1,
        table=table,
        initial_state=spec.initial_state,
        halt_states=spec.halt_states,
    )
