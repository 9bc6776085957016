import math

import numpy as np
import pytest
from hypothesis import strategies as st

from xrealign.states import XState

ENSEMBLE_SEED = 20261016
ENSEMBLE_SIZE = 100_000

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def acceptance_log():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def _assemble(weights, u1, u2, phi14, phi23):
    w = np.asarray(weights, dtype=float)
    w = w / w.sum()
    r11, r22, r33, r44 = (float(v) for v in w)
    return XState(
        r11,
        r22,
        r33,
        r44,
        rho14=u1 * math.sqrt(r11 * r44) * complex(math.cos(phi14), math.sin(phi14)),
        rho23=u2 * math.sqrt(r22 * r33) * complex(math.cos(phi23), math.sin(phi23)),
    )


unit = st.floats(0.0, 1.0, allow_nan=False)
phase = st.floats(0.0, 2 * math.pi, allow_nan=False)

# Valid X-states with population weights bounded away from an all-zero draw.
x_states = st.builds(
    _assemble,
    st.lists(st.floats(1e-3, 1.0), min_size=4, max_size=4),
    unit,
    unit,
    phase,
    phase,
)
