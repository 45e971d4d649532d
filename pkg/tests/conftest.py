from pathlib import Path

import pytest

from fogbisim.grammar import parse_grammar
from fogbisim.rcm import parse_rcm

FIXTURES = Path(__file__).parent / "fixtures"

EXAMPLE_GRAMMAR = """\
nonterminal A 3
nonterminal B 0
nonterminal C 2
nonterminal D 2
action a
action b
rule A(x1,x2,x3) -b-> C(D(x3,B),x2)
rule A(x1,x2,x3) -b-> x2
rule D(x1,x2) -a-> A(D(x2,x2),x1,B)
"""

NUMERALS = """\
nonterminal I 1
nonterminal Bot 0
action a
rule I(x1) -a-> x1
"""


def pytest_addoption(parser):
    parser.addoption("--seed", type=int, default=20240611, help="seed for randomized suites")


@pytest.fixture
def seed(request):
    return request.config.getoption("--seed")


@pytest.fixture
def example_grammar():
    return parse_grammar(EXAMPLE_GRAMMAR)


@pytest.fixture
def numeral_grammar():
    return parse_grammar(NUMERALS)


def load_fixture(name):
    return parse_rcm((FIXTURES / name).read_text())


def fixture_names(prefix=""):
    return sorted(p.name for p in FIXTURES.glob(f"{prefix}*.rcm"))


_ACCEPTANCE = []


@pytest.fixture
def criterion():
    def record(number, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}"
        _ACCEPTANCE.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
