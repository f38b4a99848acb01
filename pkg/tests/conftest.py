import pytest

from gwbaseline.core import NoiseBudget


@pytest.fixture
def shot_noise():
    return NoiseBudget(loss_lambda=1.1e-3)


@pytest.fixture
def fixed_noise():
    return NoiseBudget(fixed_phase_uncertainty=1e-5)


def pytest_terminal_summary(terminalreporter):
    from acceptance_report import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(RESULTS, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
