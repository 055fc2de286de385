import json
from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def dense_oracle():
    """Brute-force reference levels, keyed by (omega, g)."""
    doc = json.loads((FIXTURES / "dense_grid_oracle.json").read_text())
    return {(c["omega"], c["g"]): c for c in doc["cases"]}


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for number in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[number])
