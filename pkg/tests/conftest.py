import numpy as np
import pytest

from privamp.dist import JointSubDistribution

# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE = {}


@pytest.fixture
def std():
    """The binary symmetric test source: P_{A|E} = (0.8, 0.2) for each e."""
    return JointSubDistribution([[0.4, 0.1], [0.1, 0.4]])


@pytest.fixture
def uniform22():
    return JointSubDistribution(np.full((2, 2), 0.25))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
