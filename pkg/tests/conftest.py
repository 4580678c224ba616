import itertools
import random

import pytest

from docsat.formula import Formula

F1_CLAUSES = [(1, 2, 3), (-1, -2, 3), (1, -2, -3)]
ALL_SIGNS = [tuple(s * v for s, v in zip(signs, (1, 2, 3))) for signs in itertools.product((1, -1), repeat=3)]


@pytest.fixture
def f1():
    return Formula(3, F1_CLAUSES)


@pytest.fixture
def unsat8():
    return Formula(3, ALL_SIGNS)


def random_formula(rng: random.Random, n: int, m: int) -> Formula:
    clauses = []
    for _ in range(m):
        vs = rng.sample(range(1, n + 1), 3)
        clauses.append(tuple(v if rng.random() < 0.5 else -v for v in vs))
    return Formula(n, clauses)


def brute_energy_tlc(f, x):
    """Direct clause scan, independent of SearchState."""
    e = t = 0
    for c in f.clauses:
        k = sum(1 for lit in c if (lit > 0) == bool(x[abs(lit) - 1]))
        t += k
        e += k == 0
    return e, t


# one line per acceptance criterion, repeated in the terminal summary
ACCEPTANCE_LINES = []


def report(criterion, passed, detail):
    line = f"[{'PASS' if passed else 'FAIL'}] criterion {criterion}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
