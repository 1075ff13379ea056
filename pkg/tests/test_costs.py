import math
import random

import pytest

from turingcost import costs
from turingcost.costs import (
    CostLedger,
    CostOptions,
    SharedRegion,
    accumulate,
    counter_cost,
    ensemble_cost,
    fsm_size,
    head_cost_per_step,
    instantaneous_information,
    packed_table_bits,
)
from turingcost.game import load_script, play, tit_for_tat_machine
from turingcost.machine import Status, initial_configuration, make_machine, run, step
from turingcost.random_specs import random_input, random_machine


class TestFsmSize:
    def test_fully_eight_bit_machine(self):
        assert fsm_size(256, 256, 256, 1) == 1_572_872

    def test_all_widths_zero(self):
        assert fsm_size(1, 1, 1) == 0

    def test_reference_player_formula_vs_packed(self):
        # the formula charges full widths; the hand-packed table is smaller
        spec = tit_for_tat_machine()
        assert fsm_size(4, 3, 2, 1) == 62
        assert packed_table_bits(spec) == 36
        assert packed_table_bits(spec) + spec.state_bits == 38

    def test_multi_tape_generalization(self):
        # two tapes: M*N^2*(m + 2(n+d)) + m
        assert fsm_size(2, 2, 3, 2) == 2 * 4 * (1 + 2 * (1 + 2)) + 1


class TestInstantaneousInformation:
    def test_reference_player_packed_is_38(self):
        spec = tit_for_tat_machine()
        config = initial_configuration(spec)
        bits, breakdown = instantaneous_information(config, CostOptions(table_mode="packed"))
        assert bits == 38
        assert breakdown["fsm"] == 36 and breakdown["state"] == 2
        assert breakdown["tape"] == 0 and breakdown["head"] == 0

    def test_empty_work_tape_is_table_plus_state(self):
        spec = make_machine(
            2, 2, 1, 1,
            {(q, (s,)): ((s,), (0,), q) for q in range(2) for s in range(2)},
        )
        config = initial_configuration(spec)
        bits, _ = instantaneous_information(config)
        assert bits == fsm_size(2, 2, 3, 1) + 1

    def test_eight_cells_of_four_symbol_alphabet(self):
        spec = make_machine(
            1, 4, 1, 1, {(0, (s,)): ((s,), (0,), 0) for s in range(4)}
        )
        config = initial_configuration(spec, tape_contents=[{i: 1 for i in range(8)}])
        _, breakdown = instantaneous_information(config)
        assert breakdown["tape"] + breakdown["head"] == 20  # ceil(log2 9) + 8*2


class TestAccumulate:
    def _one_turn_script(self, turns):
        body = [{"random": "C", "move": "C"} for _ in range(turns)]
        return load_script(body + [{"halt": True}], ("C", "D", "H"))

    def test_single_turn_costs_76(self):
        transcript = play(tit_for_tat_machine(), self._one_turn_script(1))
        assert transcript.turns[0].cost_bits == 76

    def test_empty_trace_is_zero(self):
        assert accumulate([]).total_bits == 0

    def test_three_turns_cost_228_by_additivity(self):
        transcript = play(tit_for_tat_machine(), self._one_turn_script(3))
        assert sum(t.cost_bits for t in transcript.turns[:3]) == 228

    def test_accumulate_matches_run_ledger(self):
        rng = random.Random(3)
        spec = random_machine(rng, max_work_states=3, max_symbols=3)
        tape = random_input(rng, spec)
        config = initial_configuration(spec, tape_contents=[dict(tape)])
        ledger = CostLedger()
        run(config, ledger=ledger, max_steps=25)

        replay = initial_configuration(spec, tape_contents=[dict(tape)])
        trace = []
        for _ in range(config.step_count):
            step(replay)
            trace.append(replay.clone())
        again = accumulate(trace)
        assert again.total_bits == pytest.approx(ledger.total_bits)
        assert [e.bits for e in again.per_step] == [e.bits for e in ledger.per_step]


class TestHeadCost:
    def test_fully_eight_bit_head(self):
        assert head_cost_per_step(256, 256, 256) == 97_552
        ratio = head_cost_per_step(256, 256, 256) / fsm_size(256, 256, 256, 1)
        assert 0.055 <= ratio <= 0.07  # just over 6%

    def test_sixteen_bit_head_is_negligible(self):
        ratio = head_cost_per_step(65536, 65536, 65536) / fsm_size(65536, 65536, 65536, 1)
        assert ratio < 0.0003

    def test_reference_player_head_cost(self):
        # 2n + M(17m-9) + N(17n-9) + D(17d-9) at M=4, N=3, D=2
        assert head_cost_per_step(4, 3, 2) == 195

    def test_published_hand_count_discrepancy(self):
        # the worked example substitutes 1+2 for 2n and a fourth symbol-counter
        # term, totalling 219 per step; the formula value 195 is authoritative
        hand_count = 1 + 2 + 4 * 25 + 4 * 25 + 2 * 8
        assert hand_count == 219
        assert head_cost_per_step(4, 3, 2) != hand_count

    def test_width_zero_rejected(self):
        with pytest.raises(ValueError):
            head_cost_per_step(1, 256, 256)


class TestCounterCost:
    @pytest.mark.parametrize("width,expected", [(1, 8), (2, 25), (8, 127)])
    def test_counter_formula(self, width, expected):
        assert counter_cost(width) == expected

    def test_zero_width_rejected(self):
        with pytest.raises(ValueError):
            counter_cost(0)


class TestEnsembleCost:
    def _ledger(self, steps, bits_per_step):
        ledger = CostLedger()
        for i in range(steps):
            ledger.add(i + 1, bits_per_step, {})
        return ledger

    def test_no_sharing_is_plain_sum(self):
        ledgers = {0: self._ledger(4, 25.0), 1: self._ledger(2, 25.0)}
        assert ensemble_cost(ledgers) == 150

    def test_shared_region_charged_to_busier_machine(self):
        # both machines counted 4 shared cells of 2 bits in every step; the
        # 5-step machine's share is removed, the 10-step machine keeps its own
        ledgers = {0: self._ledger(10, 100.0), 1: self._ledger(5, 100.0)}
        region = SharedRegion("scratch", cell_count=4, symbol_bits=2)
        total = ensemble_cost(ledgers, {region: [0, 1]})
        double_counted = sum(l.total_bits for l in ledgers.values())
        assert total == double_counted - 5 * 8

    def test_tie_goes_to_lowest_machine_id(self):
        ledgers = {0: self._ledger(5, 10.0), 1: self._ledger(5, 10.0)}
        region = SharedRegion("scratch", cell_count=1, symbol_bits=1)
        assert ensemble_cost(ledgers, {region: [0, 1]}) == 100 - 5

    def test_single_machine_identity(self):
        ledger = self._ledger(7, 12.5)
        assert ensemble_cost({0: ledger}) == ledger.total_bits

    def test_unknown_machine_rejected(self):
        region = SharedRegion("scratch", 1, 1)
        with pytest.raises(KeyError):
            ensemble_cost({0: self._ledger(1, 1.0)}, {region: [0, 9]})


class TestCostProperties:
    def test_strict_monotonicity(self, rng):
        for _ in range(40):
            spec = random_machine(rng, max_work_states=3, max_symbols=3, max_skip=2)
            config = initial_configuration(spec, tape_contents=[random_input(rng, spec)])
            ledger = CostLedger()
            run(config, ledger=ledger, max_steps=30)
            running = 0.0
            for entry in ledger.per_step:
                assert entry.bits > 0
                running += entry.bits
            assert running == pytest.approx(ledger.total_bits, rel=1e-9)

    def test_serial_additivity(self, rng):
        spec = random_machine(rng, max_work_states=3, max_symbols=3)
        tapes = [random_input(rng, spec, cells=3) for _ in range(2)]
        separate = []
        for tape in tapes:
            config = initial_configuration(spec, tape_contents=[dict(tape)])
            ledger = CostLedger()
            run(config, ledger=ledger, max_steps=20)
            separate.append(ledger.total_bits)
        shared = CostLedger()
        for tape in tapes:
            config = initial_configuration(spec, tape_contents=[dict(tape)])
            run(config, ledger=shared, max_steps=20)
        assert shared.total_bits == pytest.approx(sum(separate), rel=1e-9)

    def test_parallel_additivity(self, rng):
        ledgers = {}
        total = 0.0
        for mid in range(4):
            spec = random_machine(rng, max_work_states=2, max_symbols=2)
            config = initial_configuration(spec, tape_contents=[random_input(rng, spec)])
            ledger = CostLedger()
            run(config, ledger=ledger, max_steps=15)
            ledgers[mid] = ledger
            total += ledger.total_bits
        assert ensemble_cost(ledgers) == pytest.approx(total, rel=1e-9)

    def test_budget_soundness(self, rng):
        for _ in range(20):
            spec = random_machine(rng, max_work_states=3, max_symbols=3)
            config = initial_configuration(spec, tape_contents=[random_input(rng, spec)])
            first, _ = costs.step_cost_preview(config)
            ledger = CostLedger()
            run(config, budget_bits=first - 0.5, ledger=ledger)
            assert config.step_count == 0
            assert config.status is Status.BUDGET_EXCEEDED


class TestTraceExport:
    def test_jsonl_and_csv_row_counts(self, rng, tmp_path):
        spec = random_machine(rng)
        config = initial_configuration(spec, tape_contents=[random_input(rng, spec)])
        ledger = CostLedger()
        run(config, ledger=ledger, max_steps=9)
        jsonl = costs.trace_to_jsonl(ledger, machine_id="m0")
        assert len([l for l in jsonl.splitlines() if l]) == ledger.steps
        csv_text = costs.trace_to_csv(ledger)
        assert len(csv_text.splitlines()) == ledger.steps + 1
