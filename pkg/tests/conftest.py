import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from obdqa.geometry import Polygon  # noqa: E402
from obdqa.ingest import Source, make_layer  # noqa: E402
from obdqa.projection import parse_zone  # noqa: E402

ZONE = parse_zone("31N")


def square(x, y, s=1.0):
    return Polygon.box(x, y, x + s, y + s)


def layer_of(polys, source=Source.OBD):
    return make_layer(polys, source, ZONE)


@pytest.fixture
def zone():
    return ZONE


ACCEPTANCE_RESULTS: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def acceptance():
    """Record one pass/fail line per acceptance criterion."""
    def record(number: int, ok: bool, detail: str) -> None:
        ACCEPTANCE_RESULTS[number] = (bool(ok), detail)
        print(f"AC{number:02d} {'PASS' if ok else 'FAIL'}: {detail}")
    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        ok, detail = ACCEPTANCE_RESULTS[number]
        terminalreporter.write_line(f"AC{number:02d} {'PASS' if ok else 'FAIL'}: {detail}")
