"""Discrete neural nets: direct simulation and machine-ensemble emulation.

A net is a set of binary-firing nodes connected by stateful synapses.  Each
tick, every synapse reads its origin node's firing bit, steps its own state
table, and emits the new state's activation; every node then adds its
incoming activations to its table position, fires (or not) per the landed
row, and moves to the row's successor position.

The ensemble emulation recruits one dual-tape unit per node and per synapse
slot up to declared capacity bounds (unused slots are unconnected but still
cost machinery every tick).  Work-tape overlaps wire each synapse unit to
its origin's state field and its target's activation slot.  A plain tick
takes k+5 lockstep steps; with the fast accumulator the k-step integration
collapses to one step costing k*(19A-17) bits, for 6 lockstep steps total.

Complexities are charged as the action-table sizes of equivalent machines;
activations are A-bit two's-complement integers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from . import costs
from .machine import MachineError, Tape, ceil_log2

FORMAT_VERSION = "1"

PLAIN = "plain"
ACCUMULATOR = "accumulator"


class NeuralError(MachineError):
    pass


# ---------------------------------------------------------------------------
# Net specification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SynapseRow:
    activation: int
    move0: int  # state-table movement when the origin is quiet
    move1: int  # movement when the origin fires


@dataclass(frozen=True)
class SynapseSpec:
    origin: int
    target: int
    rows: tuple[SynapseRow, ...]
    initial_state: int = 0


@dataclass(frozen=True)
class NodeRow:
    fire: int  # 0 or 1
    move: int  # movement to the next base position


@dataclass(frozen=True)
class NodeSpec:
    rows: tuple[NodeRow, ...]
    initial_position: int = 0
    initial_fire: int = 0


@dataclass(frozen=True)
class NeuralNetSpec:
    nodes: tuple[NodeSpec, ...]
    synapses: tuple[SynapseSpec, ...]
    accumulator_bits: int = 8

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def fan_in(self) -> int:
        """k: the (uniform, padded) number of incoming slots per node."""
        counts = [0] * self.node_count
        for syn in self.synapses:
            counts[syn.target] += 1
        return max(counts, default=0)

    def incoming(self, node: int) -> list[int]:
        return [i for i, s in enumerate(self.synapses) if s.target == node]

    def validate(self) -> None:
        a_limit = 2 ** (self.accumulator_bits - 1)
        for i, syn in enumerate(self.synapses):
            if not 0 <= syn.origin < self.node_count:
                raise NeuralError(f"synapse {i} originates at unknown node {syn.origin}")
            if not 0 <= syn.target < self.node_count:
                raise NeuralError(f"synapse {i} targets unknown node {syn.target}")
            if not syn.rows:
                raise NeuralError(f"synapse {i} has an empty state table")
            if not 0 <= syn.initial_state < len(syn.rows):
                raise NeuralError(f"synapse {i} starts outside its table")
            for r, row in enumerate(syn.rows):
                if abs(row.activation) >= a_limit:
                    raise NeuralError(f"synapse {i} row {r}: activation exceeds {self.accumulator_bits}-bit range")
                for mv in (row.move0, row.move1):
                    if not 0 <= r + mv < len(syn.rows):
                        raise NeuralError(f"synapse {i} row {r}: movement leaves the table")
        for i, node in enumerate(self.nodes):
            if not node.rows:
                raise NeuralError(f"node {i} has an empty table")
            if node.initial_fire not in (0, 1):
                raise NeuralError(f"node {i}: initial firing state must be 0 or 1")
            rows = len(node.rows)
            if not 0 <= node.initial_position < rows:
                raise NeuralError(f"node {i} starts outside its table")
            for r, row in enumerate(node.rows):
                if row.fire not in (0, 1):
                    raise NeuralError(f"node {i} row {r}: fire must be 0 or 1")
            lo, hi = _activation_sum_range(self, i)
            bases = {node.initial_position}
            bases.update(r + row.move for r, row in enumerate(node.rows))
            for p in bases:
                if not 0 <= p + lo and p + hi < rows:
                    raise NeuralError(
                        f"node {i}: position {p} can leave the table for "
                        f"activation sums in [{lo}, {hi}] (not a closed system)"
                    )


def _activation_sum_range(net: NeuralNetSpec, node: int) -> tuple[int, int]:
    lo = hi = 0
    for s in net.incoming(node):
        acts = [row.activation for row in net.synapses[s].rows]
        lo += min(acts)
        hi += max(acts)
    return lo, hi


def load_net(doc) -> NeuralNetSpec:
    try:
        nodes = tuple(
            NodeSpec(
                rows=tuple(NodeRow(int(r["fire"]), int(r["move"])) for r in n["table"]),
                initial_position=int(n.get("initial_position", 0)),
                initial_fire=int(n.get("initial_fire", 0)),
            )
            for n in doc["nodes"]
        )
        synapses = tuple(
            SynapseSpec(
                origin=int(s["origin"]),
                target=int(s["target"]),
                rows=tuple(
                    SynapseRow(int(r["activation"]), int(r["move0"]), int(r["move1"]))
                    for r in s["table"]
                ),
                initial_state=int(s.get("initial", 0)),
            )
            for s in doc["synapses"]
        )
        net = NeuralNetSpec(nodes, synapses, int(doc.get("accumulator_bits", 8)))
    except (KeyError, TypeError, ValueError) as exc:
        raise NeuralError(f"malformed net document: {exc}") from exc
    net.validate()
    return net


def net_to_doc(net: NeuralNetSpec) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "accumulator_bits": net.accumulator_bits,
        "nodes": [
            {
                "table": [{"fire": r.fire, "move": r.move} for r in n.rows],
                "initial_position": n.initial_position,
                "initial_fire": n.initial_fire,
            }
            for n in net.nodes
        ],
        "synapses": [
            {
                "origin": s.origin,
                "target": s.target,
                "initial": s.initial_state,
                "table": [
                    {"activation": r.activation, "move0": r.move0, "move1": r.move1}
                    for r in s.rows
                ],
            }
            for s in net.synapses
        ],
    }


# ---------------------------------------------------------------------------
# Direct simulation
# ---------------------------------------------------------------------------

def simulate_direct(net: NeuralNetSpec, ticks: int, model: "NeuralCostModel | None" = None):
    """Reference trajectory plus cost: Lambda*N*(I_node + k*(I_syn + log2 N))."""
    net.validate()
    if model is None:
        model = cost_model(net)
    eta = [n.initial_fire for n in net.nodes]
    sigma = [s.initial_state for s in net.synapses]
    pos = [n.initial_position for n in net.nodes]
    incoming = [net.incoming(i) for i in range(net.node_count)]
    trajectory: list[tuple[int, ...]] = []
    for _ in range(ticks):
        acts = []
        for s, syn in enumerate(net.synapses):
            row = syn.rows[sigma[s]]
            sigma[s] += row.move1 if eta[syn.origin] else row.move0
            acts.append(syn.rows[sigma[s]].activation)
        new_eta = list(eta)
        for i, node in enumerate(net.nodes):
            p = pos[i] + sum(acts[s] for s in incoming[i])
            new_eta[i] = node.rows[p].fire
            pos[i] = p + node.rows[p].move
        eta = new_eta
        trajectory.append(tuple(eta))
    cost = eq_a3_cost(ticks, model.node_count, model.fan_in, model.i_node, model.i_syn, model.origin_population)
    return tuple(trajectory), cost


def eq_a3_cost(
    ticks: int,
    node_count: int,
    fan_in: int,
    i_node: float,
    i_syn: float,
    origin_population: int,
) -> float:
    """Direct network cost: Lambda * N * (I_node + k * (I_syn + log2(N)))."""
    wiring = math.log2(origin_population) if origin_population > 1 else 0.0
    return ticks * node_count * (i_node + fan_in * (i_syn + wiring))


# ---------------------------------------------------------------------------
# Cost modeling
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AccumulatorModel:
    """Fast parallel adder over A-bit two's-complement activations.

    Register and truth-table storage: 3A-1 register bits plus 16(A-1)
    truth-table bits, i.e. 19A-17 bits of logic.
    """

    width: int

    @property
    def cost_bits_per_step(self) -> int:
        if self.width < 1:
            raise NeuralError("accumulator width must be positive")
        return 19 * self.width - 17


@dataclass(frozen=True)
class NeuralCostModel:
    """Complexities and emulator constants of one net/ensemble pairing."""

    node_count: int
    origin_population: int
    fan_in: int
    n_max: int
    k_max: int
    accumulator_bits: int
    i_node: float
    i_syn: float
    i_a: float
    i_b: float
    alpha_b: float
    alpha_a: float
    alpha_syn: float
    eps_b: float
    eps_a: float
    eps_syn: float
    beta: float

    def __post_init__(self):
        if self.i_b < 0:
            raise NeuralError("accumulator split would make I_B negative")


def _equiv_fsm_bits(rows: int, width: int, movements: int) -> int:
    """Action-table size of the dual-tape machine equivalent to a unit."""
    return costs.fsm_size(rows, 2**width, max(movements, 1), 2)


def _synapse_step_bits(rows: int, width: int, movements: int) -> float:
    table = _equiv_fsm_bits(rows, width, movements)
    state = ceil_log2(rows)
    t_beta = 3 * rows * width + ceil_log2(3 * rows + 1)
    t_alpha = 2 * width + ceil_log2(3)
    return float(table + state + t_beta + t_alpha)


def _node_step_bits(rows: int, width: int, movements: int, fan_in: int) -> float:
    table = _equiv_fsm_bits(rows, width, movements)
    state = ceil_log2(rows)
    t_beta = 2 * rows * width + ceil_log2(2 * rows + 1)
    t_alpha = (fan_in + 1) * width + ceil_log2(fan_in + 2)
    return float(table + state + t_beta + t_alpha)


def cost_model(
    net: NeuralNetSpec,
    n_max: int | None = None,
    k_max: int | None = None,
    origin_population: int | None = None,
) -> NeuralCostModel:
    """Derive complexities and emulator constants from the construction."""
    n = net.node_count
    k = net.fan_in
    n_max = n if n_max is None else n_max
    k_max = k if k_max is None else k_max
    if n_max < n or k_max < k:
        raise NeuralError("net exceeds the declared ensemble bounds")
    pop = n if origin_population is None else origin_population
    a = net.accumulator_bits

    syn_rows = max((len(s.rows) for s in net.synapses), default=1)
    syn_moves = 1 + 2 * max(
        (max(abs(r.move0), abs(r.move1)) for s in net.synapses for r in s.rows),
        default=0,
    )
    node_rows = max((len(nd.rows) for nd in net.nodes), default=1)
    node_moves = 1 + 2 * max((abs(r.move) for nd in net.nodes for r in nd.rows), default=0)

    i_syn = float(_equiv_fsm_bits(syn_rows, a, syn_moves))
    i_node = float(_equiv_fsm_bits(node_rows, a, node_moves))
    i_a = float(AccumulatorModel(a).cost_bits_per_step)
    i_b = i_node - k * i_a

    alpha_machinery = float(_equiv_fsm_bits(1, a, 1))
    syn_step = _synapse_step_bits(syn_rows, a, syn_moves)
    node_step = _node_step_bits(node_rows, a, node_moves, k)
    wiring = math.log2(pop) if pop > 1 else 0.0

    return NeuralCostModel(
        node_count=n,
        origin_population=pop,
        fan_in=k,
        n_max=n_max,
        k_max=k_max,
        accumulator_bits=a,
        i_node=i_node,
        i_syn=i_syn,
        i_a=i_a,
        i_b=i_b,
        alpha_b=alpha_machinery,
        alpha_a=float(a),
        alpha_syn=alpha_machinery,
        eps_b=max(0.0, node_step - i_b),
        eps_a=0.0,
        eps_syn=max(0.0, syn_step - i_syn - wiring),
        beta=0.0,
    )


def neural_cost_bound(model: NeuralCostModel, ticks: int, mode: str = ACCUMULATOR):
    """Emulation-cost ceiling and its simplified form.

    Accumulator mode is the six-step bound; plain mode is the analogous
    (k+5)-step bound for the construction without the fast accumulator.
    Returns (bound, simplified_bound).
    """
    n, k = model.node_count, model.fan_in
    wiring = math.log2(model.origin_population) if model.origin_population > 1 else 0.0
    overhead = model.alpha_b + model.k_max * (model.alpha_a + model.alpha_syn)
    if mode == ACCUMULATOR:
        gamma = 6
        per_node = model.i_b + model.eps_b + k * (
            model.i_syn + wiring + model.i_a + model.eps_syn + model.eps_a
        )
        direct = eq_a3_cost(ticks, n, k, model.i_b + k * model.i_a, model.i_syn, model.origin_population)
        simplified = (
            gamma * direct
            + gamma * ticks * n * (model.eps_b + k * (model.eps_a + model.eps_syn))
            + gamma * ticks * model.n_max * overhead
            + model.beta
        )
    elif mode == PLAIN:
        gamma = k + 5
        per_node = model.i_node + model.eps_b + k * (model.i_syn + wiring + model.eps_syn)
        overhead = model.alpha_b + model.k_max * model.alpha_syn
        direct = eq_a3_cost(ticks, n, k, model.i_node, model.i_syn, model.origin_population)
        simplified = (
            gamma * direct
            + gamma * ticks * n * (model.eps_b + k * model.eps_syn)
            + gamma * ticks * model.n_max * overhead
            + model.beta
        )
    else:
        raise NeuralError(f"unknown emulation mode {mode!r}")
    bound = gamma * ticks * n * per_node + model.beta + gamma * ticks * model.n_max * overhead
    return bound, simplified


# ---------------------------------------------------------------------------
# Ensemble emulation
# ---------------------------------------------------------------------------

class _NodeUnit:
    """Dual-tape node machine: k activation slots plus a firing field on
    T_alpha, the {fire, move} table on T_beta."""

    def __init__(self, spec: NodeSpec, fan_in: int, width: int, step_bits: float,
                 padded_rows: int | None = None):
        self.spec = spec
        self.fan_in = fan_in
        self.step_bits = step_bits
        self.t_alpha = Tape()
        for slot in range(fan_in):
            self.t_alpha.prime(slot, 0)
        self.t_alpha.prime(fan_in, spec.initial_fire)
        self.t_beta = Tape()
        for r, row in enumerate(spec.rows):
            self.t_beta.prime(2 * r, row.fire)
            self.t_beta.prime(2 * r + 1, row.move)
        # tables are padded to the family maximum so every used unit carries
        # the same stored-table information each step
        for r in range(len(spec.rows), padded_rows or len(spec.rows)):
            self.t_beta.prime(2 * r, 0)
            self.t_beta.prime(2 * r + 1, 0)
        self.t_beta.head = 2 * spec.initial_position
        self.t_alpha.head = 0
        self.ledger = costs.CostLedger()
        self.steps = 0

    def _meter(self):
        self.steps += 1
        self.ledger.add(self.steps, self.step_bits, {"unit": "node"})

    def integrate_one(self, slot: int) -> None:
        act = self.t_alpha.read(slot)
        self.t_beta.head += 2 * act
        self.t_alpha.head = slot + 1
        self._meter()

    def read_and_fire(self, write_log) -> None:
        p_eff = self.t_beta.head // 2
        fire = self.t_beta.read(2 * p_eff)
        self.t_alpha.write(self.fan_in, fire)
        write_log.append(self.t_alpha.physical(self.fan_in))
        self.t_beta.head = 2 * p_eff + 1
        self._meter()

    def reset_heads(self) -> None:
        p_eff = (self.t_beta.head - 1) // 2
        move = self.t_beta.read(self.t_beta.head)
        self.t_beta.head = 2 * (p_eff + move)
        self.t_alpha.head = 0
        self._meter()

    @property
    def eta(self) -> int:
        return self.t_alpha.read(self.fan_in)


class _SynapseUnit:
    """Dual-tape synapse machine wired to its origin's firing field and its
    target's activation slot through T_alpha overlaps."""

    def __init__(self, spec: SynapseSpec, origin_unit: _NodeUnit, target_unit: _NodeUnit,
                 slot: int, width: int, step_bits: float, padded_rows: int | None = None):
        self.spec = spec
        self.step_bits = step_bits
        self.t_alpha = Tape()
        self.t_alpha.attach_alias(0, origin_unit.t_alpha, origin_unit.fan_in, 1)
        self.t_alpha.attach_alias(1, target_unit.t_alpha, slot, 1)
        self.t_beta = Tape()
        for r, row in enumerate(spec.rows):
            self.t_beta.prime(3 * r, row.activation)
            self.t_beta.prime(3 * r + 1, row.move0)
            self.t_beta.prime(3 * r + 2, row.move1)
        for r in range(len(spec.rows), padded_rows or len(spec.rows)):
            self.t_beta.prime(3 * r, 0)
            self.t_beta.prime(3 * r + 1, 0)
            self.t_beta.prime(3 * r + 2, 0)
        self.t_beta.head = 3 * spec.initial_state
        self.eta_read = 0
        self.ledger = costs.CostLedger()
        self.steps = 0

    def _meter(self):
        self.steps += 1
        self.ledger.add(self.steps, self.step_bits, {"unit": "synapse"})

    def read_origin(self) -> None:
        self.eta_read = self.t_alpha.read(0)
        base = (self.t_beta.head // 3) * 3
        self.t_beta.head = base + 1 + self.eta_read
        self.t_alpha.head = 1
        self._meter()

    def transition(self) -> None:
        move = self.t_beta.read(self.t_beta.head)
        row = self.t_beta.head // 3
        self.t_beta.head = 3 * (row + move)
        self._meter()

    def emit(self, write_log) -> None:
        act = self.t_beta.read(self.t_beta.head)
        self.t_alpha.write(1, act)
        write_log.append(self.t_alpha.physical(1))
        self.t_alpha.head = 0
        self._meter()


class _EmptyUnit:
    """Unconnected slot machinery: empty work tapes, nonzero step cost."""

    def __init__(self, kind: str, step_bits: float):
        self.kind = kind
        self.step_bits = step_bits
        self.ledger = costs.CostLedger()
        self.steps = 0

    def idle(self) -> None:
        self.steps += 1
        self.ledger.add(self.steps, self.step_bits, {"unit": self.kind})


class NeuralEnsemble:
    """Lockstep ensemble emulating a net, with per-unit cost ledgers."""

    def __init__(self, net: NeuralNetSpec, n_max: int | None = None,
                 k_max: int | None = None, accumulator: bool = True,
                 origin_population: int | None = None):
        net.validate()
        self.net = net
        self.accumulator = accumulator
        self.model = cost_model(net, n_max, k_max, origin_population)
        a = net.accumulator_bits
        k = self.model.fan_in

        syn_rows = max((len(s.rows) for s in net.synapses), default=1)
        syn_moves = 1 + 2 * max(
            (max(abs(r.move0), abs(r.move1)) for s in net.synapses for r in s.rows), default=0
        )
        node_rows = max((len(nd.rows) for nd in net.nodes), default=1)
        node_moves = 1 + 2 * max((abs(r.move) for nd in net.nodes for r in nd.rows), default=0)
        syn_step = _synapse_step_bits(syn_rows, a, syn_moves)
        node_step = _node_step_bits(node_rows, a, node_moves, k)

        self.nodes = [
            _NodeUnit(spec, k, a, node_step, padded_rows=node_rows) for spec in net.nodes
        ]
        self.spare_nodes = [
            _EmptyUnit("node", self.model.alpha_b) for _ in range(self.model.n_max - net.node_count)
        ]
        self.synapses: list[_SynapseUnit] = []
        self.spare_synapses: list[_EmptyUnit] = []
        for i in range(net.node_count):
            incoming = net.incoming(i)
            for slot in range(self.model.k_max):
                if slot < len(incoming):
                    syn = net.synapses[incoming[slot]]
                    self.synapses.append(
                        _SynapseUnit(syn, self.nodes[syn.origin], self.nodes[i], slot, a,
                                     syn_step, padded_rows=syn_rows)
                    )
                else:
                    self.spare_synapses.append(_EmptyUnit("synapse", self.model.alpha_syn))
        for _ in range(self.model.n_max - net.node_count):
            for _ in range(self.model.k_max):
                self.spare_synapses.append(_EmptyUnit("synapse", self.model.alpha_syn))
        self.accumulators = [
            _EmptyUnit("accumulator", k * self.model.i_a + self.model.alpha_a)
            for _ in range(net.node_count)
        ] + [
            _EmptyUnit("accumulator", self.model.alpha_a)
            for _ in range(self.model.n_max - net.node_count)
        ]
        self.ticks = 0

    @property
    def steps_per_tick(self) -> int:
        return 6 if self.accumulator else self.model.fan_in + 5

    def _check_single_writer(self, write_log) -> None:
        seen = {}
        for key in write_log:
            if key in seen:
                raise NeuralError(f"two units wrote the same shared field in one phase: {key}")
            seen[key] = True

    def tick(self) -> tuple[int, ...]:
        """One net tick; returns the firing vector after the tick."""
        k = self.model.fan_in
        # synapse phases (3 lockstep steps)
        log: list = []
        for unit in self.synapses:
            unit.read_origin()
        for unit in self.spare_synapses:
            unit.idle()
        for unit in self.synapses:
            unit.transition()
        for unit in self.spare_synapses:
            unit.idle()
        for unit in self.synapses:
            unit.emit(log)
        for unit in self.spare_synapses:
            unit.idle()
        self._check_single_writer(log)

        # integration: k node steps, or one accumulator step
        if self.accumulator:
            for i, node in enumerate(self.nodes):
                total = sum(node.t_alpha.read(slot) for slot in range(k))
                node.t_beta.head += 2 * total
                node.t_alpha.head = k
                self.accumulators[i].idle()
            for acc in self.accumulators[len(self.nodes):]:
                acc.idle()
        else:
            for slot in range(k):
                for node in self.nodes:
                    node.integrate_one(slot)
                for unit in self.spare_nodes:
                    unit.idle()

        # firing update and head reset (2 node steps)
        log = []
        for node in self.nodes:
            node.read_and_fire(log)
        for unit in self.spare_nodes:
            unit.idle()
        self._check_single_writer(log)
        for node in self.nodes:
            node.reset_heads()
        for unit in self.spare_nodes:
            unit.idle()

        self.ticks += 1
        return self.eta()

    def eta(self) -> tuple[int, ...]:
        return tuple(node.eta for node in self.nodes)

    def run(self, ticks: int) -> tuple[tuple[int, ...], ...]:
        return tuple(self.tick() for _ in range(ticks))

    def total_cost(self) -> float:
        units = (
            self.nodes + self.spare_nodes + self.synapses + self.spare_synapses + self.accumulators
        )
        return sum(u.ledger.total_bits for u in units)


def build_neural_emulator(
    net: NeuralNetSpec,
    n_max: int | None = None,
    k_max: int | None = None,
    accumulator: bool = True,
    origin_population: int | None = None,
) -> NeuralEnsemble:
    return NeuralEnsemble(net, n_max, k_max, accumulator, origin_population)
