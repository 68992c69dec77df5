from pathlib import Path

import pytest

from bivariant.catcore import load_category_file

ROOT = Path(__file__).resolve().parents[1]
FIXTURES = ROOT / "fixtures"


@pytest.fixture(scope="session")
def fs4():
    return load_category_file(FIXTURES / "fs4.json")


@pytest.fixture(scope="session")
def fs3():
    return load_category_file(FIXTURES / "fs3.json")


@pytest.fixture(scope="session")
def fs2():
    return load_category_file(FIXTURES / "fs2.json")


@pytest.fixture(scope="session")
def diamond():
    return load_category_file(FIXTURES / "diamond.json")


# one line per acceptance criterion, printed after the run
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, ok, detail in sorted(ACCEPTANCE):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title}"
        terminalreporter.write_line(line + (f" ({detail})" if detail else ""))
