import pytest
from hypothesis import settings

from evidencekit.freq import LocationNormalData
from evidencekit.kernel import NormalParams
from evidencekit.relbelief import BayesInferenceBase

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture
def ex6_base():
    """n = 2 observations with mean 1.47, sigma0 = 1, prior N(0, 2**2), delta = 0.01."""
    return BayesInferenceBase(LocationNormalData(2, 1.47, 1.0), NormalParams(0.0, 2.0), 0.01)


# acceptance lines collected by tests/test_acceptance.py
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
