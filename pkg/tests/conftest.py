import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from ssdkit.builtins import builtin_set, builtin_space
from ssdkit.grid import GridSpec

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

BANACH_BUILTINS = ["hilbert-identity(2)", "hilbert-identity(3)", "hilbert-negative(2)", "r3-swap",
                   "pairing(1)", "pairing(2)", "product(r3-swap,pairing(1))"]


@pytest.fixture
def pairing1():
    return builtin_space("pairing(1)")


@pytest.fixture
def swap3():
    return builtin_space("r3-swap")


@pytest.fixture
def hilbert2():
    return builtin_space("hilbert-identity(2)")


@pytest.fixture
def diagonal(pairing1):
    return builtin_set({"kind": "diagonal", "lo": -3.0, "hi": 3.0, "step": 0.05}, pairing1)


@pytest.fixture
def grid2():
    return GridSpec.from_step(-2.0, 2.0, 0.1, 2)


def rng(seed=0):
    return np.random.default_rng(seed)


# one summary line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE: dict[int, tuple[str, float, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        status, seconds, title = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:>2}: {status}  {seconds:6.2f}s  {title}")
