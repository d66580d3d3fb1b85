import numpy as np
import pytest

_ACCEPTANCE = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): exit criterion")


@pytest.fixture
def rng():
    return np.random.default_rng(20261017)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        detail = "; ".join(f"{k}={v}" for k, v in item.user_properties)
        _ACCEPTANCE.append((marker.args[0], marker.args[1], rep.outcome, detail))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, outcome, detail in sorted(_ACCEPTANCE):
        status = "PASS" if outcome == "passed" else "FAIL"
        line = f"[{status}] {number}. {title}"
        if detail:
            line += f" ({detail})"
        terminalreporter.write_line(line)
