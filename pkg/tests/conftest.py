import numpy as np
import pytest

from nkmuddle.landscape import Landscape

# n=2, k=1 hand-built table; every expected value in the tests below is a
# direct lookup in these four rows.
L2_COLUMNS = [(0.10, 0.20, 0.35, 0.40), (0.50, 0.60, 0.70, 0.80)]

ACCEPTANCE_LINES = []


def make_l2() -> Landscape:
    return Landscape(
        n=2,
        k=1,
        neighbors=[[1], [0]],
        fitness_matrix=np.array(L2_COLUMNS).T,
    )


@pytest.fixture
def l2():
    return make_l2()


class ScriptedRng:
    """Stand-in for a Generator whose ``random`` output is fixed in advance."""

    def __init__(self, values):
        self.values = list(values)

    def random(self, size):
        out, self.values = self.values[:size], self.values[size:]
        out += [0.5] * (size - len(out))
        return np.asarray(out, dtype=float)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
