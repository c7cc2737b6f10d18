"""Shared fixtures: the long default-configuration runs are computed once per session."""

import pytest

from dmnls.harness.config import RunConfig
from dmnls.harness.experiments import run_simulation

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def acceptance_report():
    """Record one PASS/FAIL line per acceptance criterion."""

    def report(number: int, ok: bool, detail: str) -> bool:
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def default_run_eps01(tmp_path_factory):
    out = tmp_path_factory.mktemp("eps01")
    return run_simulation(RunConfig(epsilon=0.1, output_dir=str(out)), write=False)


@pytest.fixture(scope="session")
def default_run_eps03(tmp_path_factory):
    out = tmp_path_factory.mktemp("eps03")
    return run_simulation(RunConfig(epsilon=0.3, output_dir=str(out)), write=False)


@pytest.fixture(scope="session")
def refined_run_eps01(tmp_path_factory):
    out = tmp_path_factory.mktemp("eps01_refined")
    cfg = RunConfig(epsilon=0.1, size=16384, dt=0.0025, output_dir=str(out), snapshots=False)
    return run_simulation(cfg, write=False)
