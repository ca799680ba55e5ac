import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from casipol.materials import build_permittivity, bundled_graphite_tables  # noqa: E402


@pytest.fixture(scope="session")
def graphite():
    return build_permittivity(tables=bundled_graphite_tables())


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
