import sys
import time
from contextlib import contextmanager
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

DATA = Path(__file__).parent / "data"
_ACCEPTANCE: list[str] = []


class _Record:
    detail = ""


@pytest.fixture
def acceptance():
    """Context manager recording one PASS/FAIL line per acceptance criterion."""

    @contextmanager
    def criterion(number, title):
        rec = _Record()
        start = time.perf_counter()
        try:
            yield rec
        except BaseException:
            _ACCEPTANCE.append(f"FAIL  [{number}] {title} {rec.detail}".rstrip())
            raise
        took = time.perf_counter() - start
        _ACCEPTANCE.append(f"PASS  [{number}] {title} ({took:.2f}s) {rec.detail}".rstrip())

    return criterion


@pytest.fixture
def golden_path():
    return DATA / "golden27.apcg"


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=lambda s: s.split("]")[0].split("[")[1]):
            terminalreporter.write_line(line)
