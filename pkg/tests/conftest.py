import random

import pytest

from turingcost.machine import make_machine


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)


@pytest.fixture
def write_and_skip():
    """On blank: write 1, skip +3, halt.  On 1: write 1, stay, halt."""
    return make_machine(
        2, 2, 1, 3,
        {
            (0, (0,)): ((1,), (3,), 1),
            (0, (1,)): ((1,), (0,), 1),
        },
        initial_state=0,
        halt_states={1},
    )


@pytest.fixture
def loop_machine():
    """Single-state scanner: writes back what it reads, moves right forever."""
    return make_machine(
        1, 2, 1, 1,
        {
            (0, (0,)): ((0,), (1,), 0),
            (0, (1,)): ((1,), (1,), 0),
        },
        initial_state=0,
    )
