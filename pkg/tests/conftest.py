import functools
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from irchamber.scenario import builtin_scenario, run_scenario  # noqa: E402


@functools.lru_cache(maxsize=None)
def _run(name):
    return run_scenario(builtin_scenario(name))


@pytest.fixture(scope="session")
def builtin_run():
    """Run a built-in scenario once per session and share the artifacts."""
    return _run


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
