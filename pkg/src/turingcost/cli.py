"""Command-line front end.

Subcommands: run, game, emulate, nnsim, search, tradeoff, capacity.
All reports are deterministic for fixed inputs and seeds; randomness only
exists behind mandatory --seed flags.  Exit codes: 0 success, 2 bad input
(missing file, schema violation), 3 budget exhausted, 1 anything else.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

from . import capacity as cap
from . import costs, emulator, neural, search, tradeoff
from .machine import (
    MachineError,
    Status,
    initial_configuration,
    load_machine_file,
    machine_to_doc,
    run,
)
from . import game as game_mod

FORMAT_VERSION = "1"

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INPUT = 2
EXIT_BUDGET = 3


class BudgetExhausted(Exception):
    pass


def _dump(doc: dict, args) -> None:
    text = json.dumps(doc, sort_keys=True, indent=2) + "\n"
    if getattr(args, "output", None):
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _write_text(text: str, args) -> None:
    if getattr(args, "output", None):
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parse_tape(spec, text: str | None) -> dict[int, int]:
    if not text:
        return {}
    sym_id = {name: i for i, name in enumerate(spec.symbol_names)}

    def symbol(tok: str) -> int:
        if tok in sym_id:
            return sym_id[tok]
        return int(tok)

    cells: dict[int, int] = {}
    parts = [p for p in text.split(",") if p]
    for i, part in enumerate(parts):
        if ":" in part:
            pos, val = part.split(":", 1)
            cells[int(pos)] = symbol(val)
        else:
            cells[i] = symbol(part)
    return cells


def _cost_options(args) -> costs.CostOptions:
    return costs.CostOptions(
        table_mode=getattr(args, "table_mode", "formula"),
        include_head=getattr(args, "include_head", False),
    )


def _parse_expect(text: str) -> dict[int, int]:
    cells = {}
    for part in [p for p in text.split(",") if p]:
        pos, val = part.split(":", 1)
        cells[int(pos)] = int(val)
    return cells


def _expect_oracle(cells: dict[int, int]):
    def oracle(tape: dict[int, int]) -> bool:
        return all(tape.get(pos, 0) == sym for pos, sym in cells.items())

    return oracle


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_run(args) -> int:
    spec = load_machine_file(args.machine)
    options = _cost_options(args)
    config = initial_configuration(spec, tape_contents=[_parse_tape(spec, args.tape)])
    ledger = costs.CostLedger()
    budget = math.inf if args.budget is None else args.budget
    run(config, budget_bits=budget, ledger=ledger, max_steps=args.max_steps,
        cost_options=options)
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as fh:
            if args.trace.endswith(".csv"):
                fh.write(costs.trace_to_csv(ledger))
            else:
                fh.write(costs.trace_to_jsonl(ledger))
    doc = {
        "format_version": FORMAT_VERSION,
        "status": config.status.value,
        "steps": config.step_count,
        "total_bits": ledger.total_bits,
        "final_state": config.state,
        "tapes": [sorted(t.cells.items()) for t in config.tapes],
    }
    _dump(doc, args)
    if config.status is Status.BUDGET_EXCEEDED:
        raise BudgetExhausted()
    return EXIT_OK


def cmd_game(args) -> int:
    if args.system == "titfortat":
        spec = game_mod.tit_for_tat_machine()
    else:
        spec = load_machine_file(args.system)
    if args.script:
        with open(args.script, encoding="utf-8") as fh:
            strategy = game_mod.load_script(json.load(fh), spec.symbol_names)
    else:
        if args.seed is None:
            raise MachineError("--seed is required with --random-turns")
        strategy = game_mod.random_script(args.seed, args.random_turns)
    options = costs.CostOptions(table_mode=args.table_mode, include_head=args.include_head)
    budget = math.inf if args.budget is None else args.budget
    transcript = game_mod.play(spec, strategy, max_turns=args.max_turns,
                               budget_bits=budget, cost_options=options)
    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as fh:
            fh.write(costs.trace_to_jsonl(transcript.ledger))
    _dump(transcript.to_doc(spec.symbol_names), args)
    if transcript.budget_exceeded:
        raise BudgetExhausted()
    return EXIT_OK


def cmd_emulate(args) -> int:
    spec = load_machine_file(args.machine)
    limits = None
    if args.limits:
        m, n, d = (int(x) for x in args.limits.split(","))
        limits = emulator.FamilyLimits(m, n, d)
    bundle = emulator.build_utm_emulator(spec, limits=limits, cell_capacity=args.capacity)
    if args.export_bundle:
        emulator.write_bundle(bundle, args.export_bundle,
                              args.export_layout or args.export_bundle + ".layout.json")
    tape = _parse_tape(spec, args.tape)
    direct_cfg, direct_ledger = emulator.direct_run(spec, tape, max_steps=args.max_cycles)
    budget = math.inf if args.budget is None else args.budget
    em_cfg, em_ledger = emulator.emulate_run(bundle, tape, budget_bits=budget,
                                             max_cycles=args.max_cycles)
    bound = emulator.cost_bound(direct_ledger.total_bits, direct_cfg.step_count, bundle.constants)
    doc = {
        "format_version": FORMAT_VERSION,
        "direct": {
            "status": direct_cfg.status.value,
            "steps": direct_cfg.step_count,
            "total_bits": direct_ledger.total_bits,
            "tape": sorted(direct_cfg.tapes[0].cells.items()),
        },
        "emulated": {
            "status": em_cfg.status.value,
            "steps": em_cfg.step_count,
            "total_bits": em_ledger.total_bits,
            "tape": sorted(em_cfg.tapes[0].cells.items()),
        },
        "tapes_equal": dict(direct_cfg.tapes[0].cells) == dict(em_cfg.tapes[0].cells),
        "cost_bound": bound,
        "bound_holds": em_ledger.total_bits <= bound,
        "constants": {
            "alpha": bundle.constants.alpha,
            "beta": bundle.constants.beta,
            "gamma": bundle.constants.gamma,
            "epsilon": bundle.constants.epsilon,
        },
    }
    _dump(doc, args)
    if em_cfg.status is Status.BUDGET_EXCEEDED:
        raise BudgetExhausted()
    return EXIT_OK


def cmd_nnsim(args) -> int:
    with open(args.net, encoding="utf-8") as fh:
        net = neural.load_net(json.load(fh))
    doc: dict = {"format_version": FORMAT_VERSION, "ticks": args.ticks}
    if args.mode in ("direct", "both"):
        trajectory, cost = neural.simulate_direct(net, args.ticks)
        doc["direct"] = {"trajectory": [list(t) for t in trajectory], "cost_bits": cost}
    if args.mode in ("ensemble", "both"):
        ens = neural.build_neural_emulator(
            net, n_max=args.n_max, k_max=args.k_max,
            accumulator=not args.plain_integration,
        )
        trajectory = ens.run(args.ticks)
        bound, simplified = neural.neural_cost_bound(
            ens.model, args.ticks,
            neural.ACCUMULATOR if not args.plain_integration else neural.PLAIN,
        )
        doc["ensemble"] = {
            "trajectory": [list(t) for t in trajectory],
            "cost_bits": ens.total_cost(),
            "steps_per_tick": ens.steps_per_tick,
            "cost_bound": bound,
            "cost_bound_simplified": simplified,
            "bound_holds": ens.total_cost() <= bound,
        }
    if args.mode == "both":
        doc["trajectories_equal"] = doc["direct"]["trajectory"] == doc["ensemble"]["trajectory"]
    _dump(doc, args)
    return EXIT_OK


def cmd_search(args) -> int:
    oracle = _expect_oracle(_parse_expect(args.expect))
    options = _cost_options(args)
    if args.family:
        m, n, d = (int(x) for x in args.family.split(","))
        family = search.PairFamily(m, n, d, max_program_cells=args.max_cells)
        result = search.least_cost_pair(family, args.budget, oracle,
                                        cost_options=options)
    else:
        if not args.machine:
            raise MachineError("search needs --machine (program mode) or --family (pair mode)")
        spec = load_machine_file(args.machine)
        cells = _parse_tape(spec, args.reference)
        reference = tuple(cells[i] for i in range(len(cells)))
        result = search.least_cost_program(reference, spec, oracle,
                                           max_program_cells=args.max_cells,
                                           cost_options=options)
    _dump(result.to_doc(), args)
    return EXIT_OK


def cmd_tradeoff(args) -> int:
    doc: dict = {
        "format_version": FORMAT_VERSION,
        "state_bits": args.m,
        "symbol_bits": args.n,
    }
    if args.omega is not None:
        doc["omega"] = args.omega
        doc["optimal_delta"] = tradeoff.optimal_delta(args.omega, args.m, args.n)
    s = args.s if args.s is not None else 1.0
    ieff = args.ieff if args.ieff is not None else (args.omega or 1.0) * s
    lo, hi, step = (float(x) for x in args.deltas.split(":"))
    deltas = []
    d = lo
    while d <= hi + 1e-12:
        deltas.append(round(d, 12))
        d += step
    rows = tradeoff.ratio_table(s, ieff, args.m, args.n, deltas)
    doc["table"] = [{"delta": d, "cost_ratio": r} for d, r in rows]
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["delta", "cost_ratio"])
        writer.writerows(rows)
        if args.omega is not None:
            writer.writerow(["optimal_delta", doc["optimal_delta"]])
        _write_text(buf.getvalue(), args)
    else:
        _dump(doc, args)
    return EXIT_OK


def cmd_capacity(args) -> int:
    doc = cap.load_fixture(args.fixture)
    rounding = None
    if args.paper_rounding:
        rounding = True
    if args.exact:
        rounding = False
    report = cap.fixture_report(doc, paper_rounding=rounding)
    if args.format == "text":
        _write_text("\n".join(cap.report_lines(report)) + "\n", args)
    elif args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(["fixture", "quantity", "value", "published"])
        writer.writerows(cap.report_csv_rows(report))
        _write_text(buf.getvalue(), args)
    else:
        _dump(report, args)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="turingcost",
        description="Cost-metered machines, games, emulators, and capacity reports.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--output", help="write the JSON report here instead of stdout")
        p.add_argument("--format", choices=("json", "csv", "text"), default="json")

    p = sub.add_parser("run", help="run a machine with a cost trace")
    p.add_argument("--machine", required=True)
    p.add_argument("--tape", default="", help="initial tape: '1,0,2' or '0:1,5:2' (names allowed)")
    p.add_argument("--budget", type=float)
    p.add_argument("--max-steps", type=int)
    p.add_argument("--table-mode", choices=("formula", "packed"), default="formula")
    p.add_argument("--include-head", action="store_true", help="add head operating cost per step")
    p.add_argument("--trace", help="write per-step cost records (.jsonl or .csv)")
    add_common(p)
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("game", help="play a System-vs-Environment game")
    p.add_argument("--system", default="titfortat", help="'titfortat' or a machine-spec path")
    p.add_argument("--script", help="game script JSON path")
    p.add_argument("--random-turns", type=int, default=0)
    p.add_argument("--seed", type=int, help="required with --random-turns")
    p.add_argument("--budget", type=float)
    p.add_argument("--max-turns", type=int, default=1000)
    p.add_argument("--table-mode", choices=("formula", "packed"), default="packed")
    p.add_argument("--include-head", action="store_true")
    p.add_argument("--trace")
    add_common(p)
    p.set_defaults(fn=cmd_game)

    p = sub.add_parser("emulate", help="build an emulator bundle and verify a run")
    p.add_argument("--machine", required=True)
    p.add_argument("--tape", default="")
    p.add_argument("--limits", help="family limits 'M,N,Dmax' (default: the machine's own)")
    p.add_argument("--capacity", type=int, default=64)
    p.add_argument("--budget", type=float)
    p.add_argument("--max-cycles", type=int, default=10000)
    p.add_argument("--export-bundle")
    p.add_argument("--export-layout")
    add_common(p)
    p.set_defaults(fn=cmd_emulate)

    p = sub.add_parser("nnsim", help="simulate a net directly and/or as an ensemble")
    p.add_argument("--net", required=True)
    p.add_argument("--ticks", type=int, required=True)
    p.add_argument("--mode", choices=("direct", "ensemble", "both"), default="both")
    p.add_argument("--plain-integration", action="store_true",
                   help="emulate without the fast accumulator (k+5 steps per tick)")
    p.add_argument("--n-max", type=int)
    p.add_argument("--k-max", type=int)
    add_common(p)
    p.set_defaults(fn=cmd_nnsim)

    p = sub.add_parser("search", help="least-cost program or pair search")
    p.add_argument("--machine", help="machine-spec path (program mode)")
    p.add_argument("--reference", default="", help="reference program cells (program mode)")
    p.add_argument("--family", help="'max_work_states,symbols,max_skip' (pair mode)")
    p.add_argument("--budget", type=float, help="cost bound for pair mode")
    p.add_argument("--expect", required=True, help="accepting tape cells 'pos:sym,...'")
    p.add_argument("--max-cells", type=int, default=6)
    p.add_argument("--table-mode", choices=("formula", "packed"), default="formula")
    add_common(p)
    p.set_defaults(fn=cmd_search)

    p = sub.add_parser("tradeoff", help="cost-ratio table and optimal word-width factor")
    p.add_argument("--m", type=int, required=True, help="state bits")
    p.add_argument("--n", type=int, required=True, help="symbol bits")
    p.add_argument("--omega", type=float, help="tape-to-control ratio I_eff/S")
    p.add_argument("--s", type=float, help="control bits S")
    p.add_argument("--ieff", type=float, help="effective tape bits")
    p.add_argument("--deltas", default="0.5:2.0:0.1", help="lo:hi:step grid")
    add_common(p)
    p.set_defaults(fn=cmd_tradeoff)

    p = sub.add_parser("capacity", help="evaluate a capacity case-study fixture")
    p.add_argument("--fixture", required=True,
                   help=f"bundled name ({', '.join(cap.FIXTURE_NAMES)}) or a JSON path")
    p.add_argument("--paper-rounding", action="store_true",
                   help="force the published byte-rounded descriptor values")
    p.add_argument("--exact", action="store_true", help="force exact descriptor bits")
    add_common(p)
    p.set_defaults(fn=cmd_capacity)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except BudgetExhausted:
        sys.stderr.write(json.dumps({"error": {"type": "budget_exceeded"}}) + "\n")
        return EXIT_BUDGET
    except FileNotFoundError as exc:
        sys.stderr.write(json.dumps({"error": {"type": "file_not_found", "message": str(exc)}}) + "\n")
        return EXIT_INPUT
    except (MachineError, cap.CapacityError, json.JSONDecodeError, KeyError, ValueError) as exc:
        sys.stderr.write(
            json.dumps({"error": {"type": type(exc).__name__, "message": str(exc)}}) + "\n"
        )
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
