"""Shared fixtures: corpus graphs, fields, and a session-level cache of
expensive partitions reused across test files."""

import pytest

from isoalg.corpus import corpus, plain_graph
from isoalg.field import Field


@pytest.fixture(scope="session")
def graphs():
    return corpus()


@pytest.fixture(scope="session")
def small_graphs(graphs):
    """Corpus graphs with at most 5 vertices."""
    return {name: g for name, g in graphs.items() if g.n <= 5}


@pytest.fixture(scope="session")
def fields():
    return {0: Field(0), 2: Field(2), 3: Field(3)}


@pytest.fixture(scope="session")
def path3():
    return plain_graph(3, [(0, 1), (1, 2)])


@pytest.fixture(scope="session")
def triangle():
    return plain_graph(3, [(0, 1), (1, 2), (0, 2)])


class PartitionCache:
    """Memoized method partitions keyed by (graph name, method id)."""

    def __init__(self, graphs):
        self.graphs = graphs
        self.store = {}

    def get(self, name, key, compute):
        full = (name, key)
        if full not in self.store:
            self.store[full] = compute(self.graphs[name])
        return self.store[full]


@pytest.fixture(scope="session")
def cache(graphs):
    return PartitionCache(graphs)


# ---------------------------------------------------------------------------
# acceptance-criteria reporting: one PASS/FAIL line per criterion, printed
# in the terminal summary so the lines survive pytest's output capture

ACCEPTANCE_REPORT = {}


def record_acceptance(num, title, ok, detail=""):
    mark = "PASS" if ok else "FAIL"
    line = f"criterion {num:02d} {mark} — {title}"
    if detail:
        line += f" [{detail}]"
    ACCEPTANCE_REPORT[num] = line


@pytest.fixture(scope="session")
def acceptance():
    return record_acceptance


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_REPORT:
        terminalreporter.section("acceptance criteria")
        for num in sorted(ACCEPTANCE_REPORT):
            terminalreporter.write_line(ACCEPTANCE_REPORT[num])
