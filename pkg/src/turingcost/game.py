"""System-versus-Environment games on a shared run tape.

The System is a machine whose first tape is bound to the run tape of a
GameBoard.  The Environment opens every turn by writing a two-cell string
(a coin-flip symbol, then its own move) just ahead of the System's head and
then wakes the System, which plays until it reaches an unwritten cell
(sleep) or halts.  Run and valuation tapes are free: they never enter cost
ledgers.  Whoever breaks a rule first loses; rule breaks are recorded, not
enforced mid-game, so later play cannot change the verdict.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from . import costs
from .machine import (
    Configuration,
    MachineError,
    MachineSpec,
    Status,
    Tape,
    initial_configuration,
    make_machine,
    run,
    wake,
)

FORMAT_VERSION = "1"

SYSTEM = "system"
ENVIRONMENT = "environment"


class GameError(MachineError):
    pass


# ---------------------------------------------------------------------------
# Board and tape bindings
# ---------------------------------------------------------------------------

@dataclass
class RunCell:
    symbol: int
    writer: str
    role: str  # "random" | "env_move" | "halt"


@dataclass
class Illegal:
    player: str
    turn: int
    reason: str


class GameBoard:
    """Run tape, valuation tape, and the rule ledger of one game."""

    def __init__(self, valuation: Sequence[int] = ()):
        self.run_tape: dict[int, RunCell] = {}
        self.valuation: tuple[int, ...] = tuple(valuation)
        self.illegal: list[Illegal] = []
        self.turn = 0

    def written(self, pos: int) -> bool:
        return pos in self.run_tape

    def env_write(self, pos: int, symbol: int, role: str, alphabet: int, halt_symbol: int) -> None:
        if not 0 <= symbol < alphabet:
            self.record_illegal(ENVIRONMENT, "symbol outside the alphabet")
        if pos in self.run_tape:
            self.record_illegal(ENVIRONMENT, "overwrote a written cell")
        if role == "env_move" and symbol == halt_symbol:
            self.record_illegal(ENVIRONMENT, "halt symbol in move cell")
        self.run_tape[pos] = RunCell(symbol, ENVIRONMENT, role)

    def record_illegal(self, player: str, reason: str) -> None:
        self.illegal.append(Illegal(player, self.turn, reason))

    @property
    def first_illegal(self) -> Illegal | None:
        return self.illegal[0] if self.illegal else None


class RunTapeBinding:
    """System-side view of the run tape.

    Reads of unwritten cells block (the System sleeps there), writes are
    checked against the overwrite rules, the head may never move backward,
    and nothing here counts toward stored information.
    """

    counts_cost = False

    def __init__(self, board: GameBoard):
        self.board = board
        self.head = 0
        self.writes: list[tuple[int, int]] = []

    def blocked(self, pos: int) -> bool:
        return not self.board.written(pos)

    def read(self, pos: int) -> int:
        cell = self.board.run_tape.get(pos)
        return 0 if cell is None else cell.symbol

    def write(self, pos: int, sym: int) -> None:
        cell = self.board.run_tape.get(pos)
        if cell is None:
            self.board.run_tape[pos] = RunCell(sym, SYSTEM, "system")
        elif cell.writer == ENVIRONMENT and cell.role == "env_move" and cell.symbol != sym:
            self.board.record_illegal(SYSTEM, "overwrote the Environment's move")
            cell.symbol = sym
        else:
            # the turn-opening cell is where the System is supposed to put
            # its own move, so overwriting it is sanctioned
            cell.symbol = sym
        self.writes.append((pos, sym))

    def is_leased(self, pos: int) -> bool:
        return self.board.written(pos)

    def leased_count(self) -> int:
        return 0

    def copy(self) -> "RunTapeBinding":
        raise GameError("run-tape bindings are not copyable")

    @property
    def aliases(self):
        return {}

    def __setattr__(self, name, value):
        if name == "head" and hasattr(self, "head") and value < self.head:
            # the run-tape head is a ratchet: record the attempt, refuse the move
            self.board.record_illegal(SYSTEM, "moved backward on the run tape")
            return
        object.__setattr__(self, name, value)


class ValuationBinding:
    """Read-only view of the valuation tape; writes are illegal moves."""

    counts_cost = False

    def __init__(self, board: GameBoard):
        self.board = board
        self.head = 0

    def blocked(self, pos: int) -> bool:
        return False

    def read(self, pos: int) -> int:
        vals = self.board.valuation
        return vals[pos] if 0 <= pos < len(vals) else 0

    def write(self, pos: int, sym: int) -> None:
        if sym != self.read(pos):
            self.board.record_illegal(SYSTEM, "wrote to the valuation tape")

    def is_leased(self, pos: int) -> bool:
        return 0 <= pos < len(self.board.valuation)

    def leased_count(self) -> int:
        return 0

    @property
    def aliases(self):
        return {}


# ---------------------------------------------------------------------------
# Environment strategies
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Turn:
    random_symbol: int | None
    move_symbol: int | None
    halt: bool = False


class ScriptStrategy:
    """Turn list parsed from the JSON game-script format."""

    def __init__(self, turns: Sequence[Turn]):
        self.turns = list(turns)

    def __iter__(self):
        return iter(self.turns)


def load_script(doc, symbol_names: Sequence[str]) -> ScriptStrategy:
    sid = {name: i for i, name in enumerate(symbol_names)}
    turns = []
    for item in doc:
        if item.get("halt"):
            turns.append(Turn(None, None, halt=True))
            break
        try:
            turns.append(Turn(sid[item["random"]], sid[item["move"]]))
        except KeyError as exc:
            raise GameError(f"bad game script entry {item!r}: {exc}") from exc
    return ScriptStrategy(turns)


def random_script(seed: int, turns: int, symbols: Sequence[int] = (0, 1)) -> ScriptStrategy:
    """Seeded coin-flip environment ending with a halt turn."""
    import random as _random

    rng = _random.Random(seed)
    out = [Turn(rng.choice(list(symbols)), rng.choice(list(symbols))) for _ in range(turns)]
    out.append(Turn(None, None, halt=True))
    return ScriptStrategy(out)


# ---------------------------------------------------------------------------
# Transcripts
# ---------------------------------------------------------------------------

@dataclass
class TurnRecord:
    environment_cells: list[tuple[int, int]] = field(default_factory=list)
    system_cells: list[tuple[int, int]] = field(default_factory=list)
    step_costs: list[float] = field(default_factory=list)

    @property
    def cost_bits(self) -> float:
        return sum(self.step_costs)


@dataclass
class GameTranscript:
    turns: list[TurnRecord]
    verdict: str  # "system_wins" | "environment_wins" | "unfinished"
    first_illegal: Illegal | None
    halted: bool
    budget_exceeded: bool
    total_bits: float
    ledger: costs.CostLedger

    def to_doc(self, symbol_names: Sequence[str] = ()) -> dict:
        def sym(s):
            return symbol_names[s] if symbol_names and 0 <= s < len(symbol_names) else s

        return {
            "format_version": FORMAT_VERSION,
            "verdict": self.verdict,
            "halted": self.halted,
            "budget_exceeded": self.budget_exceeded,
            "total_bits": self.total_bits,
            "first_illegal": (
                None
                if self.first_illegal is None
                else {
                    "player": self.first_illegal.player,
                    "turn": self.first_illegal.turn,
                    "reason": self.first_illegal.reason,
                }
            ),
            "turns": [
                {
                    "environment": [[p, sym(s)] for p, s in t.environment_cells],
                    "system": [[p, sym(s)] for p, s in t.system_cells],
                    "step_costs": t.step_costs,
                    "cost_bits": t.cost_bits,
                }
                for t in self.turns
            ],
        }


# ---------------------------------------------------------------------------
# Play and judge
# ---------------------------------------------------------------------------

def play(
    system: MachineSpec,
    environment: ScriptStrategy | Iterable[Turn],
    max_turns: int = 1000,
    budget_bits: float = float("inf"),
    cost_options: costs.CostOptions | None = None,
    valuation: Sequence[int] = (),
) -> GameTranscript:
    """Alternate environment turns and System wake-runs until the game ends.

    Cost accrues only on awake System steps, with the run and valuation
    tapes excluded.  The game ends when the System halts, the turn supply or
    ``max_turns`` runs out, or the budget is exhausted (verdict unfinished).
    """
    if cost_options is None:
        cost_options = costs.CostOptions(table_mode="packed")
    halt_symbol = _halt_symbol(system)
    board = GameBoard(valuation)
    run_binding = RunTapeBinding(board)
    tapes: list = [run_binding]
    if system.tape_count >= 2 and valuation:
        tapes.append(ValuationBinding(board))
    while len(tapes) < system.tape_count:
        tapes.append(Tape())
    config = initial_configuration(system, tapes=tapes)
    ledger = costs.CostLedger()

    records: list[TurnRecord] = []
    budget_hit = False
    next_cell = 0
    for turn_index, turn in enumerate(environment):
        if turn_index >= max_turns or config.status is Status.HALTED:
            break
        board.turn = turn_index
        record = TurnRecord()
        next_cell = max(next_cell, run_binding.head)
        if turn.halt:
            board.env_write(next_cell, halt_symbol, "halt", system.symbol_count, halt_symbol)
            record.environment_cells.append((next_cell, halt_symbol))
            next_cell += 1
        else:
            board.env_write(next_cell, turn.random_symbol, "random", system.symbol_count, halt_symbol)
            board.env_write(next_cell + 1, turn.move_symbol, "env_move", system.symbol_count, halt_symbol)
            record.environment_cells.append((next_cell, turn.random_symbol))
            record.environment_cells.append((next_cell + 1, turn.move_symbol))
            next_cell += 2

        wake(config)
        mark = len(run_binding.writes)
        before = ledger.steps
        run(config, budget_bits=budget_bits, ledger=ledger, cost_options=cost_options)
        record.system_cells = run_binding.writes[mark:]
        record.step_costs = [e.bits for e in ledger.per_step[before:]]
        records.append(record)
        if config.status is Status.BUDGET_EXCEEDED:
            budget_hit = True
            break
        if config.status is Status.HALTED:
            break

    transcript = GameTranscript(
        turns=records,
        verdict="unfinished",
        first_illegal=board.first_illegal,
        halted=config.status is Status.HALTED,
        budget_exceeded=budget_hit,
        total_bits=ledger.total_bits,
        ledger=ledger,
    )
    transcript.verdict = judge(transcript)
    return transcript


def judge(transcript: GameTranscript) -> str:
    """First illegal move loses; otherwise a completed (halted) game is won
    by the System, and anything cut short stays unfinished."""
    if transcript.first_illegal is not None:
        loser = transcript.first_illegal.player
        return "system_wins" if loser == ENVIRONMENT else "environment_wins"
    if transcript.halted:
        return "system_wins"
    return "unfinished"


def _halt_symbol(spec: MachineSpec) -> int:
    """The symbol the Environment writes to end the game.

    By convention the symbol named "H" when names are present, else the
    highest symbol id.
    """
    if "H" in spec.symbol_names:
        return spec.symbol_names.index("H")
    return spec.symbol_count - 1


# ---------------------------------------------------------------------------
# The reference player
# ---------------------------------------------------------------------------

def tit_for_tat_machine() -> MachineSpec:
    """The iterated-dilemma reference player: 4 states, 3 symbols, 9 rows.

    States c and d write the stored move and branch to the read state r,
    which echoes the opponent's move and adopts it as the next reply.  A
    scanned halt symbol stops play from any state.
    """
    C, D, H = 0, 1, 2
    c, d, r, h = 0, 1, 2, 3
    table = {
        (c, (C,)): ((C,), (1,), r),
        (c, (D,)): ((C,), (1,), r),
        (c, (H,)): ((C,), (0,), h),
        (d, (C,)): ((D,), (1,), r),
        (d, (D,)): ((D,), (1,), r),
        (d, (H,)): ((D,), (0,), h),
        (r, (C,)): ((C,), (1,), c),
        (r, (D,)): ((D,), (1,), d),
        (r, (H,)): ((C,), (0,), h),
    }
    return make_machine(
        state_count=4,
        symbol_count=3,
        tape_count=1,
        max_skip=1,
        table=table,
        initial_state=c,
        halt_states={h},
        state_names=("c", "d", "r", "h"),
        symbol_names=("C", "D", "H"),
    )


# ---------------------------------------------------------------------------
# Recruitment and lockstep ensembles
# ---------------------------------------------------------------------------

@dataclass
class Overlap:
    my_tape: int
    my_start: int
    other_machine: int
    other_tape: int
    other_start: int
    length: int


@dataclass
class RecruitmentRequest:
    """Everything needed to spawn a daughter device: the machine, its
    initial state, primed work-tape contents, head positions, and the
    declared work-tape overlaps with existing ensemble members."""

    spec: MachineSpec
    initial_state: int | None = None
    tape_contents: Sequence[Mapping[int, int] | None] = ()
    heads: Sequence[int] = ()
    overlaps: Sequence[Overlap] = ()


class Ensemble:
    """Deterministic lockstep collection of machines.

    One tick steps every awake machine once.  Any number of machines may
    read a shared cell in a tick, but two writes to the same physical cell
    in one tick are an error, checked after the tick so the result cannot
    depend on execution order.
    """

    def __init__(self, cost_options: costs.CostOptions | None = None):
        self.configs: list[Configuration] = []
        self.boards: list[GameBoard | None] = []
        self.ledgers: list[costs.CostLedger] = []
        self.cost_options = cost_options or costs.CostOptions()

    def add(self, config: Configuration, board: GameBoard | None = None) -> int:
        self.configs.append(config)
        self.boards.append(board)
        self.ledgers.append(costs.CostLedger())
        return len(self.configs) - 1

    def recruit(self, request: RecruitmentRequest, parent: int = 0) -> int:
        """Add a daughter machine; its run and valuation tapes are copies of
        the parent's board, and declared overlaps alias parent work cells."""
        spec = request.spec
        contents = list(request.tape_contents) + [None] * spec.tape_count
        tapes = [Tape(contents[i]) for i in range(spec.tape_count)]
        for i, head in enumerate(request.heads):
            tapes[i].head = head
        for ov in request.overlaps:
            if not 0 <= ov.other_machine < len(self.configs):
                raise GameError(f"overlap references unknown machine {ov.other_machine}")
            other = self.configs[ov.other_machine]
            if not 0 <= ov.other_tape < len(other.tapes):
                raise GameError("overlap references unknown tape")
            if not 0 <= ov.my_tape < len(tapes):
                raise GameError("overlap names a tape the daughter does not have")
            tapes[ov.my_tape].attach_alias(
                ov.my_start, other.tapes[ov.other_tape], ov.other_start, ov.length
            )
        config = initial_configuration(spec, tapes=tapes)
        if request.initial_state is not None:
            config.state = request.initial_state
        parent_board = self.boards[parent] if self.boards else None
        board = None
        if parent_board is not None:
            board = GameBoard(parent_board.valuation)
            board.run_tape = {pos: RunCell(c.symbol, c.writer, c.role) for pos, c in parent_board.run_tape.items()}
        return self.add(config, board)

    def tick(self) -> None:
        from .machine import step as machine_step

        writes: dict[tuple[int, int], list[int]] = {}
        for mid, config in enumerate(self.configs):
            if config.status is not Status.RUNNING:
                continue
            if any(t.blocked(t.head) for t in config.tapes):
                config.status = Status.SLEEPING
                continue
            bits, breakdown = costs.step_cost_preview(config, self.cost_options)
            config.write_log = []
            machine_step(config)
            for tape, pos, _ in config.write_log:
                writes.setdefault((id(tape), pos), []).append(mid)
            config.write_log = None
            self.ledgers[mid].add(config.step_count, bits, breakdown)
        for (_, pos), writers in writes.items():
            if len(writers) > 1:
                raise GameError(
                    f"machines {sorted(writers)} wrote the same cell (pos {pos}) in one tick"
                )

    def total_cost(self, shared_regions=None) -> float:
        return costs.ensemble_cost(dict(enumerate(self.ledgers)), shared_regions)
