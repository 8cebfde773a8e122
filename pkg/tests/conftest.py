from __future__ import annotations

import pytest

from qdphonon.kernel import build_table, zero_table
from qdphonon.material import MaterialParams, derive_spectral_model


@pytest.fixture(scope="session")
def gaas():
    return derive_spectral_model(MaterialParams())


@pytest.fixture(scope="session")
def table100(gaas):
    """GaAs, 30 K, 0..100 ps at dt = 1e-3 ps."""
    return build_table(gaas, 30.0, 100.0, 1e-3)


@pytest.fixture(scope="session")
def table_short(gaas):
    """GaAs, 30 K, 0..10 ps at dt = 1e-3 ps."""
    return build_table(gaas, 30.0, 10.0, 1e-3)


@pytest.fixture(scope="session")
def no_phonons(gaas):
    return zero_table(gaas, 30.0, 100.0, 1e-3)


_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_report():
    """Record one pass/fail line per criterion and fail the test if it failed."""

    def report(number: int, ok: bool, detail: str) -> None:
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
