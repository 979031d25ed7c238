from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"

_ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record_acceptance(number: int, passed: bool, detail: str) -> None:
    _ACCEPTANCE[number] = (bool(passed), detail)
    print(f"[acceptance {number:2d}] {'PASS' if passed else 'FAIL'}  {detail}")


@pytest.fixture
def acceptance():
    return record_acceptance


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        passed, detail = _ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
