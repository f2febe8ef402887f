import pytest

import acceptance_log
from affine_sv import models


@pytest.fixture(scope="session")
def heston():
    return models.preset("heston")


@pytest.fixture(scope="session")
def hp():
    return models.FIG_HESTON


@pytest.fixture(scope="session", params=list(models.PRESETS))
def any_model(request):
    return models.preset(request.param)


def pytest_terminal_summary(terminalreporter):
    if acceptance_log.LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(acceptance_log.LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
