"""Per-episode Hasse diagram summarization and corpus aggregation."""

from __future__ import annotations

import os
from collections import Counter
from collections.abc import Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import overload

from . import graph
from .errors import (
    CyclicInput,
    InconsistentEpisode,
    PathExplosion,
    UnknownAgent,
    UnknownTask,
    ValidationError,
)
from .model import AgentId, Episode, HasseDiagram, Path, TaskId, TaskSequence, Vertex, conforms

DEFAULT_PATH_LIMIT = 10_000
THREADS_ENV = "HASSE_EXPLAIN_THREADS"


def hds_build(episode: Episode) -> HasseDiagram:
    """Build the Hasse diagram of one episode.

    Agents are processed in the order they appear in the episode.  Vertex ids
    are assigned afterwards in task order (root = 0), so the result does not
    depend on that processing order.
    """
    agents_of: dict[TaskId, set[AgentId]] = {}
    edges: set[tuple[TaskId | None, TaskId]] = set()
    for seq in episode.sequences:
        prev: TaskId | None = None
        for task in seq.tasks:
            agents_of.setdefault(task, set()).add(seq.agent)
            # None stands for the root vertex
            edges.add((prev, task))
            prev = task

    ids = {None: 0} | {t: i for i, t in enumerate(sorted(agents_of), start=1)}
    vertices = [Vertex(0)] + [Vertex.of(ids[t], t, agents_of[t]) for t in sorted(agents_of)]
    id_edges = {(ids[u], ids[v]) for u, v in edges}

    bad = graph.find_cycle_node(ids.values(), id_edges)
    if bad is not None:
        task = vertices[bad].task
        raise InconsistentEpisode(
            f"episode {episode.id!r}: agents disagree on the order of task {task!r}; "
            "joint tasks must be completed simultaneously"
        )
    return HasseDiagram(tuple(vertices), frozenset(_reduce_edges(id_edges)), 0, episode.id)


def _reduce_edges(edges: Iterable[tuple[int, int]]) -> set[tuple[int, int]]:
    kept = set(edges)
    adj = graph.adjacency(kept)
    for u, v in sorted(kept):
        if graph.has_path(adj, u, v, skip=(u, v)):
            kept.discard((u, v))
            adj[u].discard(v)
    return kept


@overload
def transitive_reduction(dag: HasseDiagram) -> HasseDiagram: ...
@overload
def transitive_reduction(dag: Iterable[tuple[int, int]]) -> set[tuple[int, int]]: ...


def transitive_reduction(dag):
    """Drop every edge (u, v) for which another u -> v path exists.

    Accepts a HasseDiagram (returns a diagram) or an iterable of edges
    (returns a set of edges).  Raises CyclicInput on cyclic input.
    """
    if isinstance(dag, HasseDiagram):
        nodes = [v.id for v in dag.vertices]
        edges = set(dag.edges)
    else:
        edges = set(dag)
        nodes = []
    if graph.find_cycle_node(nodes, edges) is not None:
        raise CyclicInput("transitive reduction requires an acyclic graph")
    reduced = _reduce_edges(edges)
    if isinstance(dag, HasseDiagram):
        return HasseDiagram(dag.vertices, frozenset(reduced), dag.root, dag.id)
    return reduced


def enumerate_maximal_paths(diagram: HasseDiagram, limit: int = DEFAULT_PATH_LIMIT) -> list[Path]:
    """All root-to-sink paths in depth-first, ascending-child order."""
    children = diagram.children
    paths: list[Path] = []
    stack: list[tuple[int, Path]] = [(diagram.root, (diagram.root,))]
    while stack:
        node, path = stack.pop()
        kids = children.get(node, [])
        if not kids:
            paths.append(path)
            if len(paths) > limit:
                raise PathExplosion(limit)
            continue
        for child in reversed(kids):
            stack.append((child, path + (child,)))
    return paths


def project(diagram: HasseDiagram, path: Path, agent: AgentId) -> list[TaskId]:
    """Tasks along ``path`` performed by ``agent``, in path order."""
    out = []
    for vid in path:
        for task, agents in diagram.by_id[vid].entries:
            if agent in agents:
                out.append(task)
    return out


def verify_correct(diagram: HasseDiagram, episode: Episode, limit: int = DEFAULT_PATH_LIMIT) -> bool:
    paths = enumerate_maximal_paths(diagram, limit)
    for agent, trace in episode.traces().items():
        for path in paths:
            proj = project(diagram, path, agent)
            if proj and not conforms(proj, trace):
                return False
    return True


def verify_complete(diagram: HasseDiagram, episode: Episode, limit: int = DEFAULT_PATH_LIMIT) -> bool:
    paths = enumerate_maximal_paths(diagram, limit)
    for agent, trace in episode.traces().items():
        if not any(project(diagram, p, agent) == list(trace) for p in paths):
            return False
    return True


def filter_episode(
    episode: Episode,
    agents: Iterable[AgentId] | None = None,
    tasks: Iterable[TaskId] | None = None,
) -> Episode:
    """Keep only the selected agents and tasks, preserving sequence order."""
    known_agents = set(episode.agents)
    known_tasks = set(episode.tasks)
    keep_agents = known_agents if agents is None else set(agents)
    keep_tasks = known_tasks if tasks is None else set(tasks)
    if unknown := keep_agents - known_agents:
        raise UnknownAgent(f"episode {episode.id!r} has no agents {sorted(unknown)}")
    if unknown := keep_tasks - known_tasks:
        raise UnknownTask(f"episode {episode.id!r} has no tasks {sorted(unknown)}")
    seqs = tuple(
        TaskSequence(s.agent, tuple(t for t in s.tasks if t in keep_tasks))
        for s in episode.sequences
        if s.agent in keep_agents
    )
    return Episode(episode.id, seqs, dict(episode.metadata))


def filter_corpus(
    episodes: Sequence[Episode],
    agents: Iterable[AgentId] | None = None,
    tasks: Iterable[TaskId] | None = None,
) -> list[Episode]:
    """Corpus-wide filter: ids are checked against the whole corpus, and each
    episode keeps whatever subset of them it has."""
    agents = None if agents is None else set(agents)
    tasks = None if tasks is None else set(tasks)
    all_agents = {a for e in episodes for a in e.agents}
    all_tasks = {t for e in episodes for t in e.tasks}
    if agents is not None and (unknown := agents - all_agents):
        raise UnknownAgent(f"corpus has no agents {sorted(unknown)}")
    if tasks is not None and (unknown := tasks - all_tasks):
        raise UnknownTask(f"corpus has no tasks {sorted(unknown)}")
    return [
        filter_episode(
            e,
            None if agents is None else agents & set(e.agents),
            None if tasks is None else tasks & set(e.tasks),
        )
        for e in episodes
    ]


@dataclass(frozen=True)
class DiagramStats:
    vertex_count: int
    edge_count: int
    occurrence_count: int
    likelihood: Fraction
    episode_ids: tuple[str, ...] = ()


@dataclass(frozen=True)
class Aggregate:
    groups: list[tuple[HasseDiagram, DiagramStats]]
    edge_histogram: dict[int, int]
    total: int
    diagrams: list[HasseDiagram] = field(default_factory=list, repr=False)

    @property
    def most_frequent(self) -> HasseDiagram:
        return self.groups[0][0]

    def top(self, k: int) -> list[tuple[HasseDiagram, DiagramStats]]:
        return self.groups[:k]


def default_workers() -> int:
    raw = os.environ.get(THREADS_ENV, "").strip()
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        raise ValidationError(f"{THREADS_ENV} must be an integer, got {raw!r}") from None


def build_all(episodes: Sequence[Episode], workers: int | None = None) -> list[HasseDiagram]:
    workers = default_workers() if workers is None else workers
    if workers <= 1 or len(episodes) < 2:
        return [hds_build(e) for e in episodes]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(hds_build, episodes))


def aggregate(
    episodes: Sequence[Episode] | None = None,
    *,
    diagrams: Sequence[HasseDiagram] | None = None,
    workers: int | None = None,
) -> Aggregate:
    """Group per-episode diagrams by labeled structure.

    Groups are sorted by descending occurrence, ties by structure key.  The
    first diagram seen for a group is its representative.
    """
    if diagrams is None:
        if not episodes:
            raise ValidationError("aggregate needs at least one episode")
        diagrams = build_all(episodes, workers)
    elif not diagrams:
        raise ValidationError("aggregate needs at least one diagram")
    diagrams = list(diagrams)

    counts: Counter = Counter()
    first: dict[tuple, HasseDiagram] = {}
    members: dict[tuple, list[str]] = {}
    histogram: Counter = Counter()
    for d in diagrams:
        key = d.structure_key()
        counts[key] += 1
        first.setdefault(key, d)
        members.setdefault(key, []).append(d.id)
        histogram[d.edge_count] += 1

    total = len(diagrams)
    ordered = sorted(counts, key=lambda k: (-counts[k], k))
    groups = [
        (
            first[k],
            DiagramStats(
                first[k].vertex_count,
                first[k].edge_count,
                counts[k],
                Fraction(counts[k], total),
                tuple(members[k]),
            ),
        )
        for k in ordered
    ]
    return Aggregate(groups, dict(sorted(histogram.items())), total, diagrams)
