"""Seeded generators for machine and net corpora.

Everything here takes an explicit random.Random so corpus runs are
reproducible; there is no wall-clock entropy anywhere.
"""

from __future__ import annotations

import random
from typing import Iterable

from .machine import MachineSpec, Status, initial_configuration, make_machine, run
from .neural import NeuralNetSpec, NodeRow, NodeSpec, SynapseRow, SynapseSpec


def random_machine(
    rng: random.Random,
    max_work_states: int = 3,
    max_symbols: int = 3,
    max_skip: int = 1,
    halt_prob: float = 0.25,
    force_max_skip: bool = False,
) -> MachineSpec:
    """A random single-tape machine with one halt state appended."""
    mw = rng.randint(1, max_work_states)
    n = rng.randint(2, max(2, max_symbols))
    dmax = rng.randint(1, max_skip)
    halt = mw
    table = {}
    for q in range(mw):
        for s in range(n):
            write = rng.randrange(n)
            move = rng.randint(-dmax, dmax)
            nxt = halt if rng.random() < halt_prob else rng.randrange(mw)
            table[(q, (s,))] = ((write,), (move,), nxt)
    if force_max_skip:
        q = rng.randrange(mw)
        s = rng.randrange(n)
        writes, _, nxt = table[(q, (s,))]
        table[(q, (s,))] = (writes, (rng.choice([-dmax, dmax]),), nxt)
    return make_machine(
        state_count=mw + 1,
        symbol_count=n,
        tape_count=1,
        max_skip=dmax,
        table=table,
        initial_state=0,
        halt_states={halt},
    )


def random_input(rng: random.Random, spec: MachineSpec, cells: int = 4) -> dict[int, int]:
    return {i: rng.randrange(spec.symbol_count) for i in range(cells)}


def random_halting_machine(
    rng: random.Random,
    max_work_states: int = 3,
    max_symbols: int = 3,
    max_skip: int = 1,
    input_cells: int = 4,
    step_cap: int = 40,
    max_tries: int = 500,
    force_max_skip: bool = False,
) -> tuple[MachineSpec, dict[int, int], int]:
    """Generate until a (machine, input) pair halts within ``step_cap``.

    Returns the pair plus its halting step count.
    """
    for _ in range(max_tries):
        spec = random_machine(rng, max_work_states, max_symbols, max_skip,
                              force_max_skip=force_max_skip)
        tape = random_input(rng, spec, input_cells)
        config = initial_configuration(spec, tape_contents=[dict(tape)])
        run(config, max_steps=step_cap)
        if config.status is Status.HALTED and config.step_count > 0:
            return spec, tape, config.step_count
    raise RuntimeError("could not find a halting machine within the retry cap")


def random_net(
    rng: random.Random,
    max_nodes: int = 4,
    max_fan_in: int = 3,
    max_synapse_states: int = 3,
    accumulator_bits: int = 8,
) -> NeuralNetSpec:
    """A random closed-transition net with activations in {-1, 0, 1}."""
    n = rng.randint(1, max_nodes)
    synapses: list[SynapseSpec] = []
    fan = [rng.randint(0, max_fan_in) for _ in range(n)]
    if not any(fan):
        fan[rng.randrange(n)] = 1
    for target in range(n):
        for _ in range(fan[target]):
            rows_n = rng.randint(1, max_synapse_states)
            rows = []
            for r in range(rows_n):
                rows.append(
                    SynapseRow(
                        activation=rng.choice((-1, 0, 1)),
                        move0=rng.randint(-r, rows_n - 1 - r),
                        move1=rng.randint(-r, rows_n - 1 - r),
                    )
                )
            synapses.append(
                SynapseSpec(
                    origin=rng.randrange(n),
                    target=target,
                    rows=tuple(rows),
                    initial_state=rng.randrange(rows_n),
                )
            )
    nodes = []
    for i in range(n):
        acts_lo = acts_hi = 0
        for syn in synapses:
            if syn.target == i:
                acts = [row.activation for row in syn.rows]
                acts_lo += min(acts)
                acts_hi += max(acts)
        base_lo = max(0, -acts_lo)
        base_span = rng.randint(1, 2)
        rows_n = base_lo + base_span + max(0, acts_hi)
        rows = []
        for r in range(rows_n):
            target_base = rng.randrange(base_lo, base_lo + base_span)
            rows.append(NodeRow(fire=rng.randint(0, 1), move=target_base - r))
        nodes.append(
            NodeSpec(
                rows=tuple(rows),
                initial_position=rng.randrange(base_lo, base_lo + base_span),
                initial_fire=rng.randint(0, 1),
            )
        )
    net = NeuralNetSpec(tuple(nodes), tuple(synapses), accumulator_bits)
    net.validate()
    return net
