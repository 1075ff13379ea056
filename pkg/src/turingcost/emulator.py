"""Dual-tape emulator for single-tape skip machines, with its cost bound.

The emulator UTM keeps the emulated machine's tape on T_a and its action
table on T_b, one three-field row per (state, symbol): {new symbol, move of
H_a, jump of H_b}.  H_b's resting position encodes the emulated state, and
each emulated read-write-move cycle costs exactly four emulator steps:

  1. read the scanned symbol from T_a and skip H_b to the matching row,
  2. copy the row's new symbol onto T_a,
  3. apply the row's H_a move,
  4. jump H_b to the row block of the successor state.

Transitions into an emulated halt state jump H_b to a dedicated halt cell,
where the next step 1 halts the emulator.  Every emulator built for the
same family limits shares one finite control; only the T_b program differs,
so a whole machine family can run on a single device.

The measured cost C' of an emulated run obeys

    C' <= gamma * (C + Lambda * (alpha + epsilon)) + beta,  gamma = 4

with alpha the emulator's fixed per-step information (its control plus the
stored program tape), epsilon the per-step rounding overhead of holding the
emulated symbols in the wider emulator alphabet (computed from the actual
encoding widths at the bundle's declared cell capacity), and beta the
start/halt overhead.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping

from . import costs
from .machine import (
    Configuration,
    MachineError,
    MachineSpec,
    Status,
    Tape,
    ceil_log2,
    initial_configuration,
    make_machine,
    run,
)

FORMAT_VERSION = "1"

GAMMA = 4

_P1, _P2, _P3, _P4, _HALT = 0, 1, 2, 3, 4
_STATE_NAMES = ("find_row", "write_symbol", "move_data_head", "jump_to_state", "done")


class EmulationError(MachineError):
    pass


@dataclass(frozen=True)
class FamilyLimits:
    """Largest machine shape the emulator accepts."""

    max_states: int
    max_symbols: int
    max_skip: int

    def admits(self, spec: MachineSpec) -> bool:
        return (
            spec.state_count <= self.max_states
            and spec.symbol_count <= self.max_symbols
            and spec.max_skip <= self.max_skip
        )


@dataclass(frozen=True)
class Coding:
    """Symbol coding and table geometry of the emulator for given limits."""

    limits: FamilyLimits

    @property
    def row_width(self) -> int:
        return 3

    @property
    def block_size(self) -> int:
        return self.row_width * self.limits.max_symbols

    @property
    def halt_cell(self) -> int:
        return self.block_size * self.limits.max_states

    @property
    def jump_max(self) -> int:
        return self.halt_cell + 2

    @property
    def halt_mark(self) -> int:
        return self.limits.max_symbols

    @property
    def amove_base(self) -> int:
        return self.limits.max_symbols + 1

    @property
    def bjump_base(self) -> int:
        return self.amove_base + 2 * self.limits.max_skip + 1

    @property
    def symbol_count(self) -> int:
        return self.bjump_base + 2 * self.jump_max + 1

    def block(self, state: int) -> int:
        return self.block_size * state

    def row(self, state: int, symbol: int) -> int:
        return self.block(state) + self.row_width * symbol

    def encode_amove(self, v: int) -> int:
        return self.amove_base + v + self.limits.max_skip

    def decode_amove(self, code: int) -> int:
        return code - self.amove_base - self.limits.max_skip

    def is_amove(self, code: int) -> bool:
        return self.amove_base <= code < self.bjump_base

    def encode_bjump(self, j: int) -> int:
        return self.bjump_base + j + self.jump_max

    def decode_bjump(self, code: int) -> int:
        return code - self.bjump_base - self.jump_max

    def is_bjump(self, code: int) -> bool:
        return self.bjump_base <= code < self.symbol_count


@dataclass(frozen=True)
class EmulatorConstants:
    alpha: float
    beta: float
    gamma: int
    epsilon: float
    cell_capacity: int


@dataclass
class EmulatorBundle:
    """A family emulator loaded with one emulated machine's program."""

    emulator: MachineSpec
    emulated: MachineSpec
    coding: Coding
    program: dict[int, int]  # T_b position -> code
    start_position: int
    layout: dict[tuple[int, int], int]  # (state, symbol) -> T_b row position
    constants: EmulatorConstants

    def to_doc(self) -> dict:
        from .machine import machine_to_doc

        return {
            "format_version": FORMAT_VERSION,
            "emulator": machine_to_doc(self.emulator),
            "constants": {
                "alpha": self.constants.alpha,
                "beta": self.constants.beta,
                "gamma": self.constants.gamma,
                "epsilon": self.constants.epsilon,
                "cell_capacity": self.constants.cell_capacity,
            },
            "start_position": self.start_position,
        }

    def layout_sidecar(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "rows": {f"{q},{s}": pos for (q, s), pos in sorted(self.layout.items())},
            "halt_cell": self.coding.halt_cell,
        }


# ---------------------------------------------------------------------------
# Emulator finite control (shared per family)
# ---------------------------------------------------------------------------

_spec_cache: dict[FamilyLimits, MachineSpec] = {}


def emulator_spec(limits: FamilyLimits) -> MachineSpec:
    """Finite control of the family emulator: 5 states over the unified
    code alphabet, with skips wide enough for the table jumps."""
    spec = _spec_cache.get(limits)
    if spec is not None:
        return spec
    coding = Coding(limits)
    nb = coding.symbol_count
    dmax = coding.jump_max
    table: dict = {}
    for a in range(nb):
        for b in range(nb):
            dead = ((a, b), (0, 0), _HALT)
            # step 1: skip to the row of the scanned symbol, or halt
            if b == coding.halt_mark:
                table[(_P1, (a, b))] = ((a, b), (0, 0), _HALT)
            elif a < limits.max_symbols:
                table[(_P1, (a, b))] = ((a, b), (0, coding.row_width * a), _P2)
            else:
                table[(_P1, (a, b))] = dead
            # step 2: copy the row's new symbol onto the data tape
            if b < limits.max_symbols:
                table[(_P2, (a, b))] = ((b, b), (0, 1), _P3)
            else:
                table[(_P2, (a, b))] = dead
            # step 3: move the data head by the stored amount
            if coding.is_amove(b):
                table[(_P3, (a, b))] = ((a, b), (coding.decode_amove(b), 1), _P4)
            else:
                table[(_P3, (a, b))] = dead
            # step 4: jump the program head to the successor state block
            if coding.is_bjump(b):
                table[(_P4, (a, b))] = ((a, b), (0, coding.decode_bjump(b)), _P1)
            else:
                table[(_P4, (a, b))] = dead
    spec = make_machine(
        state_count=5,
        symbol_count=nb,
        tape_count=2,
        max_skip=dmax,
        table=table,
        initial_state=_P1,
        halt_states={_HALT},
        state_names=_STATE_NAMES,
    )
    _spec_cache[limits] = spec
    return spec


# ---------------------------------------------------------------------------
# Bundles
# ---------------------------------------------------------------------------

def build_utm_emulator(
    target: MachineSpec,
    limits: FamilyLimits | None = None,
    cell_capacity: int = 64,
) -> EmulatorBundle:
    """Load ``target`` into a (possibly shared) family emulator."""
    if target.tape_count != 1:
        raise EmulationError("only single-tape machines can be emulated")
    if limits is None:
        limits = FamilyLimits(target.state_count, target.symbol_count, target.max_skip)
    if not limits.admits(target):
        raise EmulationError("target too large for the emulator alphabet")

    coding = Coding(limits)
    spec = emulator_spec(limits)

    program: dict[int, int] = {}
    layout: dict[tuple[int, int], int] = {}
    for (state, syms), (writes, moves, nxt) in target.table.items():
        if state in target.halt_states:
            continue
        row = coding.row(state, syms[0])
        layout[(state, syms[0])] = row
        dest = coding.halt_cell if nxt in target.halt_states else coding.block(nxt)
        program[row] = writes[0]
        program[row + 1] = coding.encode_amove(moves[0])
        program[row + 2] = coding.encode_bjump(dest - (row + 2))
    program[coding.halt_cell] = coding.halt_mark

    start = coding.halt_cell if target.initial_state in target.halt_states else coding.block(target.initial_state)

    n_b = spec.symbol_bits
    n_a = target.symbol_bits
    used_b = len(program)
    alpha = float(
        costs.fsm_size(spec.state_count, spec.symbol_count, spec.move_count, 2)
        + spec.state_bits
        + used_b * n_b
        + ceil_log2(used_b + 1)
    )
    epsilon = float(cell_capacity * (n_b - n_a))
    beta = alpha + cell_capacity * n_b + ceil_log2(cell_capacity + 1)
    constants = EmulatorConstants(
        alpha=alpha, beta=beta, gamma=GAMMA, epsilon=epsilon, cell_capacity=cell_capacity
    )
    return EmulatorBundle(
        emulator=spec,
        emulated=target,
        coding=coding,
        program=program,
        start_position=start,
        layout=layout,
        constants=constants,
    )


def cost_bound(total_cost: float, steps: int, constants: EmulatorConstants) -> float:
    """Emulated-cost ceiling: gamma*(C + Lambda*(alpha+epsilon)) + beta."""
    if total_cost < 0 or steps < 0:
        raise ValueError("cost and step count must be non-negative")
    return constants.gamma * (total_cost + steps * (constants.alpha + constants.epsilon)) + constants.beta


def emulate_run(
    bundle: EmulatorBundle,
    input_tape: Mapping[int, int] | None = None,
    budget_bits: float = float("inf"),
    max_cycles: int | None = None,
    cost_options: costs.CostOptions | None = None,
) -> tuple[Configuration, costs.CostLedger]:
    """Run the emulator on an input for the emulated machine.

    The returned configuration's first tape holds the emulated machine's
    final tape; the ledger is the emulator's own metered cost C'.
    """
    input_tape = dict(input_tape or {})
    for sym in input_tape.values():
        if not 0 <= sym < bundle.emulated.symbol_count:
            raise EmulationError("input does not fit the emulated machine's alphabet")
    if len(input_tape) > bundle.constants.cell_capacity:
        raise EmulationError("input exceeds the bundle's cell capacity")

    data = Tape(input_tape)
    table_tape = Tape(bundle.program)
    table_tape.head = bundle.start_position
    config = initial_configuration(bundle.emulator, tapes=[data, table_tape])
    ledger = costs.CostLedger()
    max_steps = None if max_cycles is None else GAMMA * max_cycles + 1
    run(config, budget_bits=budget_bits, ledger=ledger, max_steps=max_steps,
        cost_options=cost_options or costs.CostOptions())
    if config.tapes[0].leased_count() > bundle.constants.cell_capacity:
        raise EmulationError(
            "emulated tape outgrew the bundle's cell capacity; the cost bound "
            "is only guaranteed up to the declared capacity"
        )
    return config, ledger


def direct_run(
    target: MachineSpec,
    input_tape: Mapping[int, int] | None = None,
    budget_bits: float = float("inf"),
    max_steps: int | None = None,
    cost_options: costs.CostOptions | None = None,
) -> tuple[Configuration, costs.CostLedger]:
    """Reference run of the emulated machine itself (the oracle side)."""
    config = initial_configuration(target, tape_contents=[dict(input_tape or {})])
    ledger = costs.CostLedger()
    run(config, budget_bits=budget_bits, ledger=ledger, max_steps=max_steps,
        cost_options=cost_options or costs.CostOptions())
    return config, ledger


def write_bundle(bundle: EmulatorBundle, machine_path, sidecar_path) -> None:
    with open(machine_path, "w", encoding="utf-8") as fh:
        json.dump(bundle.to_doc(), fh, sort_keys=True, indent=2)
    with open(sidecar_path, "w", encoding="utf-8") as fh:
        json.dump(bundle.layout_sidecar(), fh, sort_keys=True, indent=2)
