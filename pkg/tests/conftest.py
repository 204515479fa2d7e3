import time

import numpy as np
import pytest

_CRITERIA = []


def record_criterion(name, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}"
    _CRITERIA.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in _CRITERIA:
            terminalreporter.write_line(line)


@pytest.fixture
def criterion():
    return record_criterion


@pytest.fixture(scope="session")
def certified_default_run():
    """Small-data run at the default resolution (nx=128, nz=64, dt=1e-4, t_end=1)."""
    from fsiplate.simulator import ChannelData, SimConfig, Simulator, certify_channel

    x = np.arange(128) / 128
    data = ChannelData(1 + 0.02 * np.cos(2 * np.pi * x), 0.02 * np.sin(2 * np.pi * x), 0.2)
    cfg = SimConfig(data)
    cert = certify_channel(cfg)
    sim = Simulator(cfg)
    t0 = time.perf_counter()
    series = sim.run()
    return cfg, cert, series, time.perf_counter() - t0
