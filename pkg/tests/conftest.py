from __future__ import annotations

import pytest

from quiverstab import corpus
from quiverstab.document import parse_document
from quiverstab.quiver import parse_presentation

K2_TEXT = "vertices 1 2\narrow a 1 2\narrow b 1 2\n"
A3_TEXT = "vertices 1 2 3\narrow f 1 2\narrow g 2 3\n"
LOOP_TEXT = "vertices 1\narrow x 1 1\nrelation x*x\n"


def load_bundled(name: str):
    return parse_document(corpus.data_path(name).read_text())


@pytest.fixture(scope="session")
def k2():
    return parse_presentation(K2_TEXT)


@pytest.fixture(scope="session")
def a3():
    return parse_presentation(A3_TEXT)


@pytest.fixture(scope="session")
def loop():
    return parse_presentation(LOOP_TEXT)


@pytest.fixture(scope="session")
def kron3():
    return corpus.bundled_presentation("kron3")


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def acceptance_report():
    def report(number: int, ok: bool, detail: str) -> None:
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)

    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
