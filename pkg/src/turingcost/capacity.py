"""Capacity estimation for silicon and neural hardware, in bytes per second.

A device's capacity is its information content (memory bytes plus
transistor-equivalent bytes at roughly 8 bits per transistor, connection
freedom folded in) multiplied by its step frequency.  Rates are also
reported on a decibel scale relative to 10^12 byte/s, the ballpark of the
original IBM PC.

Bundled JSON fixtures hold the case studies (desktop/GPU silicon, a
brute-force key-search machine, whole-brain and nematode nervous systems);
each records the model inputs and, separately, the published values they
are checked against.  Published values never feed the computation.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from importlib import resources
from typing import Iterable, Sequence

FORMAT_VERSION = "1"

DB_REFERENCE = 1e12  # byte/s

FIXTURE_NAMES = (
    "amd64_x2",
    "ibm_pc",
    "geforce_8800gt",
    "pentium_ii_1998",
    "eff_des_cracker",
    "human_brain_static",
    "human_brain_dynamic",
    "c_elegans",
    "human_neuron",
)


class CapacityError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Silicon
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SiliconSubsystem:
    label: str
    kind: str  # "logic" | "memory"
    clock_hz: float
    transistor_count: float = 0.0
    bits_per_transistor: float = 8.0
    capacity_bytes: float = 0.0
    units: int = 1

    def content_bytes(self) -> float:
        if self.kind == "logic":
            return self.transistor_count * self.bits_per_transistor / 8.0
        if self.kind == "memory":
            return self.capacity_bytes
        raise CapacityError(f"unknown subsystem kind {self.kind!r}")

    def rate(self) -> float:
        if self.clock_hz <= 0 or self.units < 1:
            raise CapacityError("clock and unit count must be positive")
        return self.units * self.content_bytes() * self.clock_hz


def silicon_capacity(subsystems: Sequence[SiliconSubsystem]) -> float:
    """Total byte/s over the subsystems (additive)."""
    if not subsystems:
        raise CapacityError("at least one subsystem is required")
    return sum(s.rate() for s in subsystems)


def db_scale(rate: float) -> float:
    """10*log10(rate / 10^12 byte/s)."""
    if rate <= 0:
        raise CapacityError("rate must be positive")
    return 10.0 * math.log10(rate / DB_REFERENCE)


def db_to_rate(db: float) -> float:
    return DB_REFERENCE * 10.0 ** (db / 10.0)


def workload_total(rate: float, duration_seconds: float) -> float:
    """Bytes (steps) delivered by running at ``rate`` for a duration."""
    if rate < 0 or duration_seconds < 0:
        raise CapacityError("rate and duration must be non-negative")
    return rate * duration_seconds


def keys_per_second(device_rate: float, per_key_cost_bytes: float) -> float:
    if per_key_cost_bytes <= 0:
        raise CapacityError("per-key cost must be positive")
    return device_rate / per_key_cost_bytes


def per_key_cost(cycles: float, transistor_count: float, units_sharing: float,
                 bits_per_transistor: float = 8.0) -> float:
    """Bytes of computation per key for a search unit etched in silicon."""
    if units_sharing <= 0:
        raise CapacityError("unit count must be positive")
    return cycles * (transistor_count * bits_per_transistor / 8.0) / units_sharing


# ---------------------------------------------------------------------------
# Neural populations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SynapsePopulation:
    label: str
    synapse_count: float
    rate_hz: float
    origin_bits: float = 0.0
    position_bits: float = 0.0
    pre_state_bits: float = 0.0
    post_state_bits: float = 0.0
    timing_bits: float = 0.0
    dynamic_complexity_bytes: float = 0.0
    paper_descriptor_bytes: float | None = None  # published byte rounding


def synapse_descriptor_bits(p: SynapsePopulation) -> float:
    """Bits to uniquely describe one synapse (static fields plus, for the
    dynamic model, the synaptic device complexity)."""
    static = p.origin_bits + p.position_bits + p.pre_state_bits + p.post_state_bits + p.timing_bits
    return static + 8.0 * p.dynamic_complexity_bytes


def descriptor_bytes(p: SynapsePopulation, paper_rounding: bool = False) -> float:
    if paper_rounding and p.paper_descriptor_bytes is not None:
        return p.paper_descriptor_bytes + p.dynamic_complexity_bytes
    return synapse_descriptor_bits(p) / 8.0


def neural_capacity(p: SynapsePopulation, paper_rounding: bool = False) -> float:
    """synapse count x descriptor bytes x step rate."""
    if p.rate_hz <= 0:
        raise CapacityError("rate must be positive")
    return p.synapse_count * descriptor_bytes(p, paper_rounding) * p.rate_hz


# ---------------------------------------------------------------------------
# Fixtures and reports
# ---------------------------------------------------------------------------

def load_fixture(name_or_path) -> dict:
    name = str(name_or_path)
    if name in FIXTURE_NAMES:
        text = resources.files("turingcost").joinpath(f"fixtures/{name}.json").read_text()
        return json.loads(text)
    with open(name_or_path, encoding="utf-8") as fh:
        return json.load(fh)


def _subsystems(doc: dict) -> list[SiliconSubsystem]:
    out = []
    for sub in doc.get("subsystems", []):
        out.append(
            SiliconSubsystem(
                label=sub["label"],
                kind=sub["kind"],
                clock_hz=float(sub["clock_hz"]),
                transistor_count=float(sub.get("transistor_count", 0)),
                bits_per_transistor=float(sub.get("bits_per_transistor", 8)),
                capacity_bytes=float(sub.get("capacity_bytes", 0)),
                units=int(sub.get("units", 1)),
            )
        )
    return out


def _population(doc: dict) -> SynapsePopulation:
    p = doc["population"]
    return SynapsePopulation(
        label=doc.get("name", "population"),
        synapse_count=float(p["synapse_count"]),
        rate_hz=float(p["rate_hz"]),
        origin_bits=float(p.get("origin_bits", 0)),
        position_bits=float(p.get("position_bits", 0)),
        pre_state_bits=float(p.get("pre_state_bits", 0)),
        post_state_bits=float(p.get("post_state_bits", 0)),
        timing_bits=float(p.get("timing_bits", 0)),
        dynamic_complexity_bytes=float(p.get("dynamic_complexity_bytes", 0)),
        paper_descriptor_bytes=(
            float(p["paper_descriptor_bytes"]) if "paper_descriptor_bytes" in p else None
        ),
    )


def fixture_report(doc: dict, paper_rounding: bool | None = None) -> dict:
    """Evaluate one case-study fixture into a flat report."""
    if paper_rounding is None:
        paper_rounding = bool(doc.get("paper_rounding", False))
    report: dict = {
        "format_version": FORMAT_VERSION,
        "name": doc.get("name", "unnamed"),
        "kind": doc.get("kind", "silicon"),
        "values": {},
        "paper_values": doc.get("paper_values", {}),
        "notes": doc.get("notes", []),
    }
    values = report["values"]
    if doc.get("kind") == "neural":
        pop = _population(doc)
        values["descriptor_bits"] = synapse_descriptor_bits(pop)
        values["descriptor_bytes"] = descriptor_bytes(pop, paper_rounding)
        values["state_bytes"] = pop.synapse_count * descriptor_bytes(pop, paper_rounding)
        values["rate_bytes_per_second"] = neural_capacity(pop, paper_rounding)
    else:
        subsystems = _subsystems(doc)
        total = silicon_capacity(subsystems)
        for sub in subsystems:
            values[f"rate_{sub.label}"] = sub.rate()
        values["rate_bytes_per_second"] = total
    rate = values["rate_bytes_per_second"]
    values["db"] = db_scale(rate)
    if "workload" in doc:
        wl = doc["workload"]
        units = float(wl.get("units", 1))
        duration = float(wl["duration_seconds"])
        scope = wl.get("rate_of", "rate_bytes_per_second")
        values["workload_bytes"] = workload_total(units * values[scope], duration)
    if "per_key" in doc:
        pk = doc["per_key"]
        values["per_key_bytes"] = per_key_cost(
            float(pk["cycles"]),
            float(pk["transistor_count"]),
            float(pk["units_sharing"]),
            float(pk.get("bits_per_transistor", 8)),
        )
    return report


def report_lines(report: dict) -> list[str]:
    """Plain-text table for one report."""
    lines = [f"{report['name']}  ({report['kind']})"]
    paper = report.get("paper_values", {})
    for key, value in report["values"].items():
        line = f"  {key:28s} {value:.6g}"
        if key in paper:
            line += f"   [published: {paper[key]:.6g}]"
        lines.append(line)
    for extra, value in paper.items():
        if extra not in report["values"]:
            lines.append(f"  {extra:28s} (published only) {value:.6g}")
    for note in report.get("notes", []):
        lines.append(f"  note: {note}")
    return lines


def report_csv_rows(report: dict) -> Iterable[list]:
    paper = report.get("paper_values", {})
    for key, value in report["values"].items():
        yield [report["name"], key, value, paper.get(key, "")]
