import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "pinsker", deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("pinsker")


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


_VERDICTS = pytest.StashKey[list]()


@pytest.fixture
def criterion(request):
    """Record one acceptance verdict, print it, then assert it."""
    log = request.config.stash.setdefault(_VERDICTS, [])

    def report(number: int, title: str, ok: bool, detail: str) -> None:
        line = f"criterion {number} {'PASS' if ok else 'FAIL'}: {title} ({detail})"
        log.append((number, line))
        print(line)
        assert ok, line

    return report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    log = config.stash.get(_VERDICTS, [])
    if not log:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for _, line in sorted(log):
        terminalreporter.write_line(line)
