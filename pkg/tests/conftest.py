import numpy as np
import pytest

from qmvsvp.lattice import generate_random_lattice, gram_from_basis

_ACCEPTANCE_LINES = []


@pytest.fixture
def record_criterion():
    """Collect one PASS/FAIL line per acceptance criterion for the terminal summary."""
    def record(name, ok, detail):
        _ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_gram(dim, seed, bound=3):
    return gram_from_basis(generate_random_lattice(dim, bound, seed))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
