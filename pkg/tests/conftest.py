import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from dismantle._rng import seed_list  # noqa: E402
from dismantle.calibration import calibrate  # noqa: E402
from dismantle.planar import GenSpec, generate  # noqa: E402

# ten n=200 graphs spread over |E| in [250, 550]
CORPUS_EDGES = [250, 283, 317, 350, 383, 417, 450, 483, 517, 550]


@pytest.fixture(scope="session")
def corpus200():
    return {f"g{e}": generate(GenSpec(200, e, seed=100 + i)) for i, e in enumerate(CORPUS_EDGES)}


@pytest.fixture(scope="session")
def seeds50():
    return seed_list(0, 50)


@pytest.fixture(scope="session")
def calibrated200(corpus200, seeds50):
    model, sweep, alpha_recs = calibrate(corpus200, seeds50, (2, 10))
    return model, sweep, alpha_recs


def pytest_terminal_summary(terminalreporter):
    import _report

    if not _report.LINES:
        return
    terminalreporter.section("acceptance criteria")
    key = lambda c: (int("".join(ch for ch in c if ch.isdigit())), c)  # noqa: E731
    for crit in sorted(_report.LINES, key=key):
        terminalreporter.write_line(_report.LINES[crit])
