import numpy as np
import pytest

from tactpwm.devices import SubthresholdParams
from tactpwm.neuron import NeuronConfig
from tactpwm.signal import TimingFrame

NS = 1e-9
FF = 1e-15

_acceptance_lines = []


@pytest.fixture
def frame():
    return TimingFrame(300 * NS, 300 * NS)


@pytest.fixture
def cfg(frame):
    return NeuronConfig(c_d=600 * FF, c_n=50 * FF, v_theta=0.2, v_dd=1.0, frame=frame)


@pytest.fixture
def ideal():
    return SubthresholdParams(ideal_off=True)


@pytest.fixture
def leaky():
    return SubthresholdParams(ideal_off=False)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def acceptance_log():
    """Record one summary line per acceptance criterion."""
    def record(number, name, ok, detail):
        status = "PASS" if ok else "FAIL"
        _acceptance_lines.append(f"[{status}] criterion {number}: {name} -- {detail}")
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_acceptance_lines, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
