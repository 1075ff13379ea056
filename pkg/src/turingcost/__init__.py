"""Cost-metered Turing machines, emulators, and capacity estimators."""

from .machine import (
    Configuration,
    MachineSpec,
    MachineError,
    Status,
    StepRefused,
    Tape,
    ceil_log2,
    expand_skips,
    free_cells,
    initial_configuration,
    load_machine,
    load_machine_file,
    machine_to_doc,
    make_machine,
    run,
    step,
)
from .costs import (
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

__version__ = "0.1.0"

__all__ = [
    "Configuration",
    "CostLedger",
    "CostOptions",
    "MachineError",
    "MachineSpec",
    "SharedRegion",
    "Status",
    "StepRefused",
    "Tape",
    "accumulate",
    "ceil_log2",
    "counter_cost",
    "ensemble_cost",
    "expand_skips",
    "free_cells",
    "fsm_size",
    "head_cost_per_step",
    "initial_configuration",
    "instantaneous_information",
    "load_machine",
    "load_machine_file",
    "machine_to_doc",
    "make_machine",
    "packed_table_bits",
    "run",
    "step",
]
