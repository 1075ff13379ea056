import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from turingcost import costs
from turingcost.game import tit_for_tat_machine
from turingcost.machine import (
    MachineError,
    Status,
    StepRefused,
    Tape,
    ceil_log2,
    expand_skips,
    free_cells,
    initial_configuration,
    load_machine,
    machine_to_doc,
    make_machine,
    run,
    step,
)
from turingcost.random_specs import random_halting_machine, random_input, random_machine


def test_ceil_log2_convention():
    assert ceil_log2(1) == 0
    assert ceil_log2(2) == 1
    assert ceil_log2(3) == 2
    assert ceil_log2(256) == 8
    with pytest.raises(ValueError):
        ceil_log2(0)


class TestLoadMachine:
    def test_tit_for_tat_document_roundtrip(self):
        doc = machine_to_doc(tit_for_tat_machine())
        spec = load_machine(doc)
        assert spec.state_count == 4
        assert spec.symbol_count == 3
        assert spec.tape_count == 1
        assert spec.explicit_entries == 9
        assert spec.state_bits == 2 and spec.symbol_bits == 2

    def test_degenerate_single_state_single_symbol(self):
        doc = {
            "states": ["s"],
            "halt_states": [],
            "symbols": ["blank"],
            "tapes": 1,
            "max_skip": 1,
            "initial_state": "s",
            "table": [{"state": "s", "read": ["blank"], "write": ["blank"], "move": [0], "next": "s"}],
        }
        spec = load_machine(doc)
        assert spec.state_count == 1 and spec.symbol_count == 1
        assert spec.state_bits == 0 and spec.symbol_bits == 0

    def test_partial_table_rejected(self):
        doc = machine_to_doc(tit_for_tat_machine())
        doc["table"] = doc["table"][:-1]
        with pytest.raises(MachineError, match="partial table"):
            load_machine(doc)

    def test_move_out_of_range_rejected(self):
        doc = machine_to_doc(tit_for_tat_machine())
        doc["table"][0]["move"] = [5]
        with pytest.raises(MachineError, match="move out of range"):
            load_machine(doc)

    def test_malformed_document(self):
        with pytest.raises(MachineError, match="malformed"):
            load_machine({"states": ["a"]})


class TestStep:
    def test_write_and_skip(self, write_and_skip):
        config = initial_configuration(write_and_skip)
        step(config)
        tape = config.tapes[0]
        assert tape.head == 3
        assert tape.read(0) == 1 and tape.is_leased(0)
        assert config.step_count == 1

    def test_tit_for_tat_row(self):
        # state c scanning C: write C, move +1, continue in the read state
        spec = tit_for_tat_machine()
        config = initial_configuration(spec, tape_contents=[{0: 0}])
        step(config)
        assert config.tapes[0].read(0) == 0
        assert config.tapes[0].head == 1
        assert config.state == spec.state_names.index("r")

    def test_step_refused_when_halted(self, write_and_skip):
        config = initial_configuration(write_and_skip)
        step(config)  # both rows transition straight into the halt state
        assert config.status is Status.HALTED
        with pytest.raises(StepRefused):
            step(config)
        assert config.status is Status.HALTED


class TestRun:
    def test_budget_zero_executes_nothing(self, write_and_skip):
        config = initial_configuration(write_and_skip)
        run(config, budget_bits=0.0)
        assert config.status is Status.BUDGET_EXCEEDED
        assert config.step_count == 0

    def test_constant_information_budget_cuts_at_step_ten(self, loop_machine):
        ledger = costs.CostLedger()
        probe = initial_configuration(loop_machine)
        run(probe, max_steps=1, ledger=ledger)
        per_step = ledger.total_bits
        assert per_step > 0

        config = initial_configuration(loop_machine)
        ledger = costs.CostLedger()
        run(config, budget_bits=10 * per_step, ledger=ledger)
        assert config.status is Status.BUDGET_EXCEEDED
        assert config.step_count == 10
        assert ledger.total_bits == pytest.approx(10 * per_step)

    def test_budget_soundness_oversized_first_step(self, write_and_skip):
        ledger = costs.CostLedger()
        config = initial_configuration(write_and_skip)
        probe = initial_configuration(write_and_skip)
        first, _ = costs.step_cost_preview(probe)
        run(config, budget_bits=first - 1, ledger=ledger)
        assert config.step_count == 0
        assert config.status is Status.BUDGET_EXCEEDED

    def test_kernel_and_pure_loop_agree(self, rng):
        for _ in range(25):
            spec = random_machine(rng, max_work_states=3, max_symbols=3, max_skip=2)
            tape = random_input(rng, spec, cells=4)
            a = initial_configuration(spec, tape_contents=[dict(tape)])
            b = initial_configuration(spec, tape_contents=[dict(tape)])
            la, lb = costs.CostLedger(), costs.CostLedger()
            run(a, budget_bits=2500.0, ledger=la, max_steps=60, use_kernel=True)
            run(b, budget_bits=2500.0, ledger=lb, max_steps=60, use_kernel=False)
            assert a.status == b.status
            assert a.step_count == b.step_count
            assert a.state == b.state
            assert dict(a.tapes[0].cells) == dict(b.tapes[0].cells)
            assert la.total_bits == pytest.approx(lb.total_bits)
            assert [e.bits for e in la.per_step] == [e.bits for e in lb.per_step]


class TestFreeCells:
    def _leased_config(self, cells):
        spec = make_machine(
            1, 4, 1, 1, {(0, (s,)): ((s,), (0,), 0) for s in range(4)}, initial_state=0
        )
        return initial_configuration(spec, tape_contents=[{i: 1 for i in range(cells)}])

    def test_free_all_from_head(self):
        config = self._leased_config(5)
        free_cells(config, 0, 5)
        assert config.tapes[0].leased_count() == 0
        assert config.tapes[0].read(2) == 0

    def test_free_zero_is_identity(self):
        config = self._leased_config(5)
        free_cells(config, 0, 0)
        assert config.tapes[0].leased_count() == 5

    def test_cost_drop_is_cells_times_width_plus_head_change(self):
        config = self._leased_config(10)
        before, _ = costs.instantaneous_information(config)
        free_cells(config, 0, 4)
        after, _ = costs.instantaneous_information(config)
        n = config.machine.symbol_bits
        head_change = ceil_log2(10 + 1) - ceil_log2(6 + 1)
        assert before - after == pytest.approx(4 * n + head_change)

    def test_bad_tape_index(self):
        config = self._leased_config(1)
        with pytest.raises(MachineError):
            free_cells(config, 2, 1)


class TestDeterminism:
    def test_identical_runs_trace_identically(self, rng):
        spec = random_machine(rng, max_work_states=4, max_symbols=3, max_skip=2)
        tape = random_input(rng, spec, cells=5)
        traces = []
        for _ in range(2):
            config = initial_configuration(spec, tape_contents=[dict(tape)])
            snapshots = []
            for _ in range(30):
                if config.status is not Status.RUNNING:
                    break
                step(config)
                snapshots.append((config.state, config.tapes[0].head,
                                  tuple(sorted(config.tapes[0].cells.items()))))
            traces.append(snapshots)
        assert traces[0] == traces[1]


@given(
    symbols=st.integers(min_value=1, max_value=3),
    writes=st.lists(st.tuples(st.integers(0, 5), st.integers(0, 2)), max_size=20),
)
@settings(max_examples=60, deadline=None)
def test_lease_monotonicity(symbols, writes):
    """The leased set only grows under writes (frees are the only shrink)."""
    tape = Tape()
    seen = 0
    for pos, sym in writes:
        tape.write(pos, sym % (symbols + 1))
        now = tape.leased_count()
        assert now >= seen
        assert now - seen in (0, 1)
        seen = now


class TestSkipElimination:
    def test_equivalence_and_growth(self):
        rng = random.Random(7)
        for _ in range(8):
            spec, tape, steps = random_halting_machine(
                rng, max_work_states=3, max_symbols=3, max_skip=3,
                input_cells=4, step_cap=40, force_max_skip=True,
            )
            flat = expand_skips(spec)
            assert flat.max_skip == 1
            a = initial_configuration(spec, tape_contents=[dict(tape)])
            b = initial_configuration(flat, tape_contents=[dict(tape)])
            run(a, max_steps=200)
            run(b, max_steps=200 * spec.max_skip + 50)
            assert a.status is Status.HALTED and b.status is Status.HALTED
            assert dict(a.tapes[0].cells) == dict(b.tapes[0].cells)
            assert b.step_count <= spec.max_skip * a.step_count
            assert flat.state_count <= spec.state_count * (2 * spec.max_skip + 1)

    def test_unit_skip_machine_unchanged(self):
        spec = tit_for_tat_machine()
        assert expand_skips(spec) is spec
