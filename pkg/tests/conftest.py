import numpy as np
import pytest

from liespec import corpus
from liespec.instance import instance_from_dict
from liespec.liealg import OperatorFamily

Y = np.array([[1, 1], [-1, -1]], dtype=complex)
X = np.array([[0, 0.5], [0.5, 0]], dtype=complex)


def unit(d, i, j):
    m = np.zeros((d, d), dtype=complex)
    m[i, j] = 1
    return m


def bundled_family(name) -> OperatorFamily:
    return instance_from_dict(corpus.bundled(name)).family


@pytest.fixture
def g2():
    return OperatorFamily((Y, X), ("y", "x"))


@pytest.fixture
def heisenberg():
    return OperatorFamily((unit(3, 0, 1), unit(3, 1, 2), unit(3, 0, 2)), ("p", "q", "z"))


@pytest.fixture
def diag_pair():
    return OperatorFamily((np.diag([1, 2]).astype(complex), np.diag([3, 4]).astype(complex)), ("a", "b"))


@pytest.fixture
def sl2():
    return bundled_family("sl2")


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
