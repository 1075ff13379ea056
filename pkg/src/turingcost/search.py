"""Least-cost programs and program/machine pairs by budgeted enumeration.

A program larger than C cannot run a single step within cost C, so running
a reference to learn its cost C makes the candidate set finite: every
initial work-tape content smaller than C, run with budget C, terminates by
halting or by exhausting the budget.  The cheapest accepted candidate is
the least-cost implementation.  Pair search repeats this over every machine
whose finite control fits the budget, hosting each candidate on the shared
family emulator.

A program here is the primed content of the work tape from position 0; its
size is cells * symbol_bits.  Ties break by enumeration order, which is
lexicographically smallest (machine encoding, then program encoding).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterator, Mapping

from . import costs, emulator
from .machine import (
    Configuration,
    MachineError,
    MachineSpec,
    Status,
    ceil_log2,
    initial_configuration,
    make_machine,
    run,
)

Oracle = Callable[[dict[int, int]], bool]


class SearchError(MachineError):
    pass


@dataclass(frozen=True)
class SearchSpace:
    """Declared enumeration bounds; kept with results for reproducibility."""

    mode: str  # "programs" | "pairs"
    size_bound_bits: float
    max_program_cells: int
    max_work_states: int = 0
    max_symbols: int = 0
    max_skip: int = 0


@dataclass
class SearchResult:
    best_program: tuple[int, ...] | None
    best_machine: MachineSpec | None
    best_cost: float
    candidates_examined: int
    all_terminated: bool
    space: SearchSpace

    def to_doc(self) -> dict:
        from .machine import machine_to_doc

        return {
            "format_version": "1",
            "mode": self.space.mode,
            "size_bound_bits": self.space.size_bound_bits,
            "candidates_examined": self.candidates_examined,
            "all_terminated": self.all_terminated,
            "best_cost": self.best_cost,
            "best_program": list(self.best_program) if self.best_program is not None else None,
            "best_machine": machine_to_doc(self.best_machine) if self.best_machine else None,
        }


def program_bits(program: tuple[int, ...], spec: MachineSpec) -> int:
    return len(program) * spec.symbol_bits


def _programs_under(spec: MachineSpec, budget: float, max_cells: int) -> Iterator[tuple[int, ...]]:
    n = spec.symbol_bits
    for cells in range(max_cells + 1):
        if n > 0 and cells * n >= budget:
            break
        if n == 0 and cells > 0:
            break  # width-0 alphabets admit only the empty program
        yield from itertools.product(range(spec.symbol_count), repeat=cells)


def _run_candidate(
    spec: MachineSpec,
    program: tuple[int, ...],
    budget: float,
    cost_options: costs.CostOptions,
    step_cap: int | None = None,
) -> tuple[Configuration, costs.CostLedger]:
    content = {i: sym for i, sym in enumerate(program)}  # blanks in a program still lease
    config = initial_configuration(spec, tape_contents=[content])
    ledger = costs.CostLedger()
    if step_cap is None:
        consts = costs.cost_constants(spec, cost_options)
        if consts.fixed_bits > 0 and budget != float("inf"):
            step_cap = int(budget // consts.fixed_bits) + 1
    run(config, budget_bits=budget, ledger=ledger, max_steps=step_cap, cost_options=cost_options)
    return config, ledger


def least_cost_program(
    reference: tuple[int, ...] | list[int],
    machine: MachineSpec,
    oracle: Oracle,
    max_program_cells: int = 12,
    reference_step_cap: int = 100_000,
    cost_options: costs.CostOptions | None = None,
) -> SearchResult:
    """Exhaustive search below the reference program's cost on one machine."""
    cost_options = cost_options or costs.CostOptions()
    reference = tuple(reference)
    ref_config, ref_ledger = _run_candidate(
        machine, reference, float("inf"), cost_options, step_cap=reference_step_cap
    )
    if ref_config.status is not Status.HALTED:
        raise SearchError("reference program did not halt within the safety cap")
    if not oracle(dict(ref_config.tapes[0].cells)):
        raise SearchError("reference program rejected by the oracle")
    budget = ref_ledger.total_bits

    space = SearchSpace("programs", budget, max_program_cells)
    best: tuple[float, tuple[int, ...]] | None = None
    examined = 0
    for program in _programs_under(machine, budget, max_program_cells):
        examined += 1
        config, ledger = _run_candidate(machine, program, budget, cost_options)
        if config.status is Status.RUNNING:
            raise SearchError("candidate exceeded the step cap without meeting its budget")
        if config.status is Status.HALTED and oracle(dict(config.tapes[0].cells)):
            if best is None or ledger.total_bits < best[0]:
                best = (ledger.total_bits, program)
    if best is None:
        # the reference qualifies by construction unless the cell cap cut it off
        best = (budget, reference)
    return SearchResult(
        best_program=best[1],
        best_machine=machine,
        best_cost=best[0],
        candidates_examined=examined,
        all_terminated=True,
        space=space,
    )


# ---------------------------------------------------------------------------
# Pair search
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PairFamily:
    """Finite machine family: up to ``max_work_states`` working states plus
    one halt state, a fixed symbol count, and skips up to ``max_skip``."""

    max_work_states: int
    symbol_count: int
    max_skip: int
    max_program_cells: int = 6

    def machine_count(self) -> int:
        total = 0
        for mw in range(1, self.max_work_states + 1):
            options = self.symbol_count * (2 * self.max_skip + 1) * (mw + 1)
            total += options ** (mw * self.symbol_count)
        return total


def enumerate_family(family: PairFamily) -> Iterator[MachineSpec]:
    """All machines in the family, lexicographically by encoding."""
    n = family.symbol_count
    for mw in range(1, family.max_work_states + 1):
        halt = mw
        keys = [(q, (s,)) for q in range(mw) for s in range(n)]
        cell_options = [
            (w, mv, nxt)
            for w in range(n)
            for mv in range(-family.max_skip, family.max_skip + 1)
            for nxt in range(mw + 1)
        ]
        for combo in itertools.product(cell_options, repeat=len(keys)):
            table = {
                key: ((w,), (mv,), nxt)
                for key, (w, mv, nxt) in zip(keys, combo)
            }
            yield make_machine(
                state_count=mw + 1,
                symbol_count=n,
                tape_count=1,
                max_skip=family.max_skip,
                table=table,
                initial_state=0,
                halt_states={halt},
            )


def _emulated_candidate_cost(
    bundle: emulator.EmulatorBundle,
    program: tuple[int, ...],
    budget: float,
    cost_options: costs.CostOptions,
) -> tuple[bool, float, dict[int, int]]:
    """Host one candidate on the emulator, metering the emulated machine's
    own cost against ``budget``.  Returns (halted, cost, final tape).

    The per-step admission mirrors a direct run exactly: an emulated cycle
    stands only if the emulated machine's post-step information still fits
    the budget, so accept sets and costs agree with direct enumeration.
    """
    from .machine import Tape

    target = bundle.emulated
    consts = costs.cost_constants(target, cost_options)
    data = Tape({i: s for i, s in enumerate(program)})
    table_tape = Tape(bundle.program)
    table_tape.head = bundle.start_position
    config = initial_configuration(bundle.emulator, tapes=[data, table_tape])
    scratch = costs.CostLedger()

    total = 0.0
    step_cap = int(budget // consts.fixed_bits) + 1 if consts.fixed_bits > 0 else None
    cycles = 0
    while True:
        if config.status is Status.HALTED:
            return True, total, dict(config.tapes[0].cells)
        if total >= budget:
            return False, total, dict(config.tapes[0].cells)
        if step_cap is not None and cycles > step_cap:
            raise SearchError("candidate exceeded the step cap without meeting its budget")
        run(config, ledger=scratch, max_steps=config.step_count + emulator.GAMMA,
            cost_options=cost_options)
        if config.status is Status.HALTED:
            # the cycle opened with the halt-entering step; no emulated step ran
            return True, total, dict(config.tapes[0].cells)
        used = config.tapes[0].leased_count()
        step_bits = float(
            consts.fixed_bits + used * target.symbol_bits + ceil_log2(used + 1)
        )
        if total + step_bits > budget:
            return False, total, dict(config.tapes[0].cells)
        total += step_bits
        cycles += 1


def least_cost_pair(
    family: PairFamily,
    budget_bits: float,
    oracle: Oracle,
    max_candidates: int = 200_000,
    cost_options: costs.CostOptions | None = None,
) -> SearchResult:
    """Search {program, machine} pairs below a shared cost bound.

    Machines are admitted when their control fits the budget (S <= C),
    programs when program bits plus S stay under C; every candidate runs on
    the family emulator.  Exceeding ``max_candidates`` is an error rather
    than a silent truncation.
    """
    cost_options = cost_options or costs.CostOptions()
    space = SearchSpace(
        "pairs",
        budget_bits,
        family.max_program_cells,
        family.max_work_states,
        family.symbol_count,
        family.max_skip,
    )
    limits = emulator.FamilyLimits(
        family.max_work_states + 1, family.symbol_count, family.max_skip
    )

    best: tuple[float, tuple[int, ...], MachineSpec] | None = None
    examined = 0
    admitted_machines = 0
    for spec in enumerate_family(family):
        fsm = costs.table_bits(spec, cost_options.table_mode)
        if fsm > budget_bits:
            continue
        admitted_machines += 1
        bundle = emulator.build_utm_emulator(spec, limits=limits,
                                             cell_capacity=family.max_program_cells + 64)
        for program in _programs_under(spec, budget_bits - fsm, family.max_program_cells):
            examined += 1
            if examined > max_candidates:
                raise SearchError(
                    f"candidate count exceeded the cap ({max_candidates}); "
                    "tighten the family limits"
                )
            halted, cost, tape = _emulated_candidate_cost(bundle, program, budget_bits, cost_options)
            if halted and oracle(tape):
                if best is None or cost < best[0]:
                    best = (cost, program, spec)
    if admitted_machines == 0:
        raise SearchError("empty family: no machine's control fits the budget")
    return SearchResult(
        best_program=best[1] if best else None,
        best_machine=best[2] if best else None,
        best_cost=best[0] if best else float("inf"),
        candidates_examined=examined,
        all_terminated=True,
        space=space,
    )
