import numpy as np
import pytest

from fracsys.harness import ExperimentConfig, FractionalSpec, run_sweep


def sweep_config(r, s, gamma=0.5, n=161, ps=(4.0, 8.0, 16.0, 32.0, 64.0)):
    cfg = ExperimentConfig()
    cfg.fractional = FractionalSpec(r=r, s=s, gamma=gamma)
    cfg.grid.n = n
    cfg.sweep = tuple(ps)
    return cfg


@pytest.fixture(scope="session")
def symmetric_sweep():
    return run_sweep(sweep_config(0.5, 0.5))


@pytest.fixture(scope="session")
def asymmetric_sweep():
    return run_sweep(sweep_config(0.3, 0.6))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


CRITERIA_LINES = []


@pytest.fixture
def report():
    """Record one PASS/FAIL line per acceptance criterion; echoed in the terminal summary."""

    def emit(number, title, passed, detail):
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number:2d} {title}: {detail}"
        CRITERIA_LINES.append(line)
        print(line)
        return passed

    return emit


def pytest_terminal_summary(terminalreporter):
    if CRITERIA_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(CRITERIA_LINES, key=lambda s: int(s.split()[2])):
            terminalreporter.write_line(line)
