from __future__ import annotations

import random

import pytest
from hypothesis import strategies as st

from hasse_explain.model import Episode


def e_star() -> Episode:
    return Episode.from_traces("E*", {1: ["A", "C"], 2: ["B", "C"]})


def e_dagger() -> Episode:
    return Episode.from_traces("E+", {1: ["B", "A", "C"], 2: ["B", "C"]})


def e_three() -> Episode:
    return Episode.from_traces("E3", {1: ["A", "C"], 2: ["C"], 3: ["B"]})


def e_successors() -> Episode:
    # C is followed by D (agent 1) and E (agent 2); B is unordered relative to C
    return Episode.from_traces("DE", {1: ["A", "C", "D"], 2: ["C", "E"], 3: ["B"]})


@pytest.fixture
def estar() -> Episode:
    return e_star()


@pytest.fixture
def edagger() -> Episode:
    return e_dagger()


@pytest.fixture
def ethree() -> Episode:
    return e_three()


@pytest.fixture
def esucc() -> Episode:
    return e_successors()


def random_episode(rng: random.Random, max_agents: int = 6, max_tasks: int = 10, eid: str = "r") -> Episode:
    """A consistent episode: one global sequence of completion events, each
    performed by a random non-empty agent subset (size > 1 means joint)."""
    n = rng.randint(1, max_agents)
    t = rng.randint(0, max_tasks)
    traces: dict[int, list[str]] = {a: [] for a in range(1, n + 1)}
    names = [f"t{k}" for k in range(t)]
    rng.shuffle(names)
    for name in names:
        size = 1 if rng.random() < 0.6 else rng.randint(1, n)
        for a in rng.sample(range(1, n + 1), size):
            traces[a].append(name)
    return Episode.from_traces(eid, traces)


@st.composite
def episodes(draw, max_agents: int = 6, max_tasks: int = 10):
    seed = draw(st.integers(0, 2**32 - 1))
    return random_episode(random.Random(seed), max_agents, max_tasks)


def random_dag_edges(rng: random.Random, n: int, p: float) -> set[tuple[int, int]]:
    order = list(range(n))
    rng.shuffle(order)
    return {(order[i], order[j]) for i in range(n) for j in range(i + 1, n) if rng.random() < p}


def closure(nodes, edges) -> set[tuple[int, int]]:
    """Floyd-Warshall style reachability (strict)."""
    nodes = list(nodes)
    reach = {(u, v): (u, v) in edges for u in nodes for v in nodes}
    for k in nodes:
        for i in nodes:
            if reach[(i, k)]:
                for j in nodes:
                    if reach[(k, j)]:
                        reach[(i, j)] = True
    return {pair for pair, ok in reach.items() if ok}


def reduction_oracle(nodes, edges) -> set[tuple[int, int]]:
    """Unique transitive reduction of a DAG: an edge of the closure survives
    iff no intermediate node sits between its endpoints."""
    c = closure(nodes, edges)
    return {(u, v) for (u, v) in c if not any((u, w) in c and (w, v) in c for w in nodes)}


# acceptance criteria results, reported once at the end of the session
ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


class criterion:
    """Record the outcome of one acceptance criterion.

    ``detail`` may be updated inside the block; an exception marks the
    criterion failed and propagates.
    """

    def __init__(self, number: int, title: str):
        self.number = number
        self.title = title
        self.detail = ""

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        ok = exc_type is None
        detail = self.detail if ok else f"{exc_type.__name__}: {exc}".splitlines()[0]
        ACCEPTANCE[self.number] = (self.title, ok, detail)
        return False


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        title, ok, detail = ACCEPTANCE[number]
        line = f"[{'PASS' if ok else 'FAIL'}] {number}. {title}"
        terminalreporter.write_line(line + (f" -- {detail}" if detail else ""))
