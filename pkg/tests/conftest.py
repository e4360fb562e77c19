import pytest

from tsm_control.engine import run_scenario
from tsm_control.scenario import PRESETS


@pytest.fixture(scope="session")
def scenario_runs():
    """(trace, metrics, report) for each reference scenario, computed once."""
    return {name: run_scenario(make()) for name, make in PRESETS.items()}


@pytest.fixture(scope="session")
def baseline_run(scenario_runs):
    return scenario_runs["baseline"]


@pytest.fixture
def acceptance_line(request):
    """Print one ``CRITERION`` status line and keep it for the session summary."""
    lines = request.config.__dict__.setdefault("_acceptance_lines", [])

    def emit(label: str, ok: bool, detail: str) -> None:
        line = f"{label}: {'PASS' if ok else 'FAIL'} | {detail}"
        lines.append(line)
        print(line)

    return emit


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.__dict__.get("_acceptance_lines")
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
