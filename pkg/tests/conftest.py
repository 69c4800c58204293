import numpy as np
import pytest

from sketchlab.linalg_core import Seed, sample_complex_gaussian


def rel_fro(a, b):
    return np.linalg.norm(a - b) / max(1.0, np.linalg.norm(b))


@pytest.fixture
def cgauss():
    """Complex Gaussian matrices from an independent default_rng stream."""
    rng = np.random.default_rng(12345)

    def draw(m, n):
        return (rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))) / np.sqrt(2)

    return draw


@pytest.fixture
def seeded():
    def draw(m, n, stream=0, master=99):
        return sample_complex_gaussian(m, n, Seed(master, stream))

    return draw


ACCEPTANCE_LOG = []


@pytest.fixture
def report():
    """Record one acceptance criterion outcome for the end-of-run summary."""

    def _report(criterion, passed, detail=""):
        ACCEPTANCE_LOG.append((criterion, bool(passed), detail))

    return _report


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LOG:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, passed, detail in sorted(ACCEPTANCE_LOG, key=lambda x: x[0]):
        terminalreporter.write_line(
            f"criterion {criterion:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
        )
