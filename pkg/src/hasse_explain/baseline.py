"""Per-agent prefix-tree baseline and corpus statistics."""

from __future__ import annotations

import time
from collections import Counter
from collections.abc import Sequence
from dataclasses import dataclass
from fractions import Fraction

from .errors import UnknownAgent, ValidationError
from .model import AgentId, Episode, TaskId
from .summarize import aggregate, build_all


@dataclass(frozen=True)
class BaselineNode:
    id: int
    task: TaskId | None
    parent: int | None


@dataclass(frozen=True)
class BaselineGraph:
    """Prefix tree over one agent's distinct task sequences.

    ``sequences`` maps each distinct sequence to its empirical frequency; the
    sequence ends at the node reached by following it from the root.
    """

    agent: AgentId
    nodes: tuple[BaselineNode, ...]
    edges: tuple[tuple[int, int], ...]
    sequences: tuple[tuple[tuple[TaskId, ...], Fraction], ...]

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def end_node(self, sequence: Sequence[TaskId]) -> int:
        node = 0
        for t in sequence:
            node = next(n.id for n in self.nodes if n.parent == node and n.task == t)
        return node


def baseline_build(episodes: Sequence[Episode], agent: AgentId) -> BaselineGraph:
    counts: Counter = Counter()
    for e in episodes:
        if agent in e.agents:
            counts[e.trace(agent)] += 1
    if not counts:
        raise UnknownAgent(f"agent {agent} never appears in the corpus")
    total = sum(counts.values())

    nodes = [BaselineNode(0, None, None)]
    edges = []
    index: dict[tuple[int, TaskId], int] = {}
    for seq in sorted(counts):
        node = 0
        for t in seq:
            if (node, t) not in index:
                nid = len(nodes)
                nodes.append(BaselineNode(nid, t, node))
                edges.append((node, nid))
                index[(node, t)] = nid
            node = index[(node, t)]
    probs = tuple((seq, Fraction(counts[seq], total)) for seq in sorted(counts))
    return BaselineGraph(agent, tuple(nodes), tuple(edges), probs)


def baseline_all(episodes: Sequence[Episode]) -> list[BaselineGraph]:
    agents = sorted({a for e in episodes for a in e.agents})
    return [baseline_build(episodes, a) for a in agents]


@dataclass(frozen=True)
class CorpusStats:
    episodes: int
    distinct: int
    edge_histogram: dict[int, int]
    mean_vertices: Fraction
    mean_edges: Fraction
    seconds: float
    baseline_nodes: int | None = None
    baseline_edges: int | None = None

    def to_dict(self, *, timing: bool = False) -> dict:
        out = {
            "episodes": self.episodes,
            "distinct": self.distinct,
            "edge_histogram": {str(k): v for k, v in sorted(self.edge_histogram.items())},
            "mean_vertices": float(self.mean_vertices),
            "mean_edges": float(self.mean_edges),
        }
        if self.baseline_nodes is not None:
            out["baseline_nodes"] = self.baseline_nodes
            out["baseline_edges"] = self.baseline_edges
        if timing:
            out["seconds"] = self.seconds
        return out


def stats(episodes: Sequence[Episode], *, baseline: bool = True, workers: int | None = None) -> CorpusStats:
    """Summary sizes for a corpus; ``seconds`` covers building and aggregating
    the diagrams only."""
    if not episodes:
        raise ValidationError("stats needs a non-empty corpus")
    start = time.perf_counter()
    diagrams = build_all(episodes, workers)
    agg = aggregate(diagrams=diagrams)
    seconds = time.perf_counter() - start
    n = len(diagrams)
    nodes = edges = None
    if baseline:
        graphs = baseline_all(episodes)
        nodes = sum(g.node_count for g in graphs)
        edges = sum(g.edge_count for g in graphs)
    return CorpusStats(
        episodes=n,
        distinct=len(agg.groups),
        edge_histogram=dict(sorted(agg.edge_histogram.items())),
        mean_vertices=Fraction(sum(d.vertex_count for d in diagrams), n),
        mean_edges=Fraction(sum(d.edge_count for d in diagrams), n),
        seconds=seconds,
        baseline_nodes=nodes,
        baseline_edges=edges,
    )
