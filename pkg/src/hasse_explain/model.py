"""Domain types shared by every module.

Task ids are plain strings and agent ids plain positive ints; everything
else is an immutable dataclass.  Iteration order is always lexicographic by
task id and ascending by agent id so that outputs are byte-stable.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Any

from . import graph
from .errors import DuplicateTask, UnknownVertex, ValidationError

TaskId = str
AgentId = int
Path = tuple[int, ...]


def conforms(seq: Sequence[TaskId], trace: Sequence[TaskId]) -> bool:
    """True iff ``seq`` is a (not necessarily contiguous) subsequence of ``trace``."""
    it = iter(trace)
    return all(any(t == s for t in it) for s in seq)


class FeatureKind(str, Enum):
    TASK_DONE = "task_done"
    AGENT_DID_TASK = "agent_did_task"


@dataclass(frozen=True)
class Feature:
    kind: FeatureKind
    task: TaskId
    agent: AgentId | None = None

    def __post_init__(self):
        if self.kind is FeatureKind.TASK_DONE and self.agent is not None:
            raise ValidationError("TaskDone features take no agent")
        if self.kind is FeatureKind.AGENT_DID_TASK and (self.agent is None or self.agent < 1):
            raise ValidationError("AgentDidTask features need an agent id >= 1")

    @classmethod
    def task_done(cls, task: TaskId) -> Feature:
        return cls(FeatureKind.TASK_DONE, task)

    @classmethod
    def agent_did_task(cls, agent: AgentId, task: TaskId) -> Feature:
        return cls(FeatureKind.AGENT_DID_TASK, task, agent)

    @classmethod
    def parse(cls, token: str) -> Feature:
        """Parse ``TASK`` (task done) or ``i:TASK`` (agent i did task)."""
        token = token.strip()
        head, sep, tail = token.partition(":")
        if not sep:
            if not token:
                raise ValidationError("empty feature token")
            return cls.task_done(token)
        if not head.strip().isdigit() or not tail.strip():
            raise ValidationError(f"bad feature token {token!r}; expected TASK or AGENT:TASK")
        return cls.agent_did_task(int(head), tail.strip())

    @property
    def is_task_done(self) -> bool:
        return self.kind is FeatureKind.TASK_DONE

    @property
    def name(self) -> str:
        return self.task if self.is_task_done else f"{self.agent}:{self.task}"

    @property
    def display(self) -> str:
        if self.is_task_done:
            return f"task {self.task} completed"
        return f"agent {self.agent} completed task {self.task}"

    def sort_key(self) -> tuple:
        return (self.task, 0 if self.is_task_done else 1, self.agent or 0)

    def __lt__(self, other: Feature) -> bool:
        return self.sort_key() < other.sort_key()

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class TaskSequence:
    agent: AgentId
    tasks: tuple[TaskId, ...] = ()

    def __post_init__(self):
        if not isinstance(self.agent, int) or isinstance(self.agent, bool) or self.agent < 1:
            raise ValidationError(f"agent id must be an integer >= 1, got {self.agent!r}")
        object.__setattr__(self, "tasks", tuple(self.tasks))
        seen = set()
        for task in self.tasks:
            if not isinstance(task, str) or not task:
                raise ValidationError(f"task ids must be non-empty strings, got {task!r}")
            if task in seen:
                raise DuplicateTask(task, self.agent)
            seen.add(task)


@dataclass(frozen=True)
class Episode:
    """Per-agent task sequences from one decentralized execution.

    Agent ids must be unique.  Ingestion paths additionally require them to
    be the dense range 1..N; episodes restricted by ``filter_episode`` keep
    their original ids and may therefore be sparse.
    """

    id: str
    sequences: tuple[TaskSequence, ...]
    metadata: Mapping[str, Any] = field(default_factory=dict, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "sequences", tuple(self.sequences))
        agents = [s.agent for s in self.sequences]
        if len(set(agents)) != len(agents):
            raise ValidationError(f"episode {self.id!r}: duplicate agent sequences")

    @classmethod
    def from_traces(cls, id: str, traces: Mapping[AgentId, Iterable[TaskId]], **metadata) -> Episode:
        return cls(id, tuple(TaskSequence(a, tuple(ts)) for a, ts in traces.items()), dict(metadata))

    @property
    def agents(self) -> list[AgentId]:
        return sorted(s.agent for s in self.sequences)

    @property
    def tasks(self) -> list[TaskId]:
        return sorted({t for s in self.sequences for t in s.tasks})

    @property
    def is_dense(self) -> bool:
        return self.agents == list(range(1, len(self.sequences) + 1))

    def trace(self, agent: AgentId) -> tuple[TaskId, ...]:
        for s in self.sequences:
            if s.agent == agent:
                return s.tasks
        raise KeyError(agent)

    def traces(self) -> dict[AgentId, tuple[TaskId, ...]]:
        return {s.agent: s.tasks for s in sorted(self.sequences, key=lambda s: s.agent)}


@dataclass(frozen=True)
class Vertex:
    id: int
    entries: tuple[tuple[TaskId, frozenset[AgentId]], ...] = ()

    @classmethod
    def of(cls, id: int, task: TaskId, agents: Iterable[AgentId]) -> Vertex:
        return cls(id, ((task, frozenset(agents)),))

    @property
    def is_root(self) -> bool:
        return not self.entries

    @property
    def task(self) -> TaskId | None:
        return self.entries[0][0] if self.entries else None

    @property
    def agents(self) -> frozenset[AgentId]:
        return self.entries[0][1] if self.entries else frozenset()

    @property
    def label(self) -> str:
        if self.is_root:
            return "start"
        return "; ".join(f"{t} {{{','.join(map(str, sorted(a)))}}}" for t, a in self.entries)


@dataclass(frozen=True)
class HasseDiagram:
    vertices: tuple[Vertex, ...]
    edges: frozenset[tuple[int, int]]
    root: int = 0
    id: str = ""

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(sorted(self.vertices, key=lambda v: v.id)))
        object.__setattr__(self, "edges", frozenset(self.edges))

    @classmethod
    def root_only(cls, id: str = "") -> HasseDiagram:
        return cls((Vertex(0),), frozenset(), 0, id)

    @cached_property
    def by_id(self) -> dict[int, Vertex]:
        return {v.id: v for v in self.vertices}

    @cached_property
    def children(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {v.id: [] for v in self.vertices}
        for u, v in sorted(self.edges):
            out.setdefault(u, []).append(v)
        return out

    @cached_property
    def parents(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {v.id: [] for v in self.vertices}
        for u, v in sorted(self.edges):
            out.setdefault(v, []).append(u)
        return out

    @cached_property
    def task_index(self) -> dict[TaskId, int]:
        return {t: v.id for v in self.vertices for t, _ in v.entries}

    @property
    def tasks(self) -> list[TaskId]:
        return sorted(self.task_index)

    @property
    def vertex_count(self) -> int:
        return len(self.vertices)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def vertex(self, vid: int) -> Vertex:
        try:
            return self.by_id[vid]
        except KeyError:
            raise UnknownVertex(f"diagram {self.id!r} has no vertex {vid}") from None

    def vertex_of(self, task: TaskId) -> Vertex | None:
        vid = self.task_index.get(task)
        return None if vid is None else self.by_id[vid]

    def descendants(self, vid: int) -> set[int]:
        self.vertex(vid)
        return graph.reachable_from(self.children, vid)

    def ancestors(self, vid: int) -> set[int]:
        self.vertex(vid)
        return graph.reachable_from(self.parents, vid)

    def structure_key(self) -> tuple:
        """Labeled structure with vertex ids replaced by their task labels."""
        name = {v.id: "" if v.is_root else v.task for v in self.vertices}
        verts = tuple(sorted((name[v.id], tuple(sorted(v.agents))) for v in self.vertices))
        edges = tuple(sorted((name[u], name[v]) for u, v in self.edges))
        return verts, edges


def validate(diagram: HasseDiagram) -> None:
    """Raise ValidationError unless every HasseDiagram invariant holds."""
    ids = [v.id for v in diagram.vertices]
    if len(set(ids)) != len(ids):
        raise ValidationError("duplicate vertex ids")
    if diagram.root not in diagram.by_id:
        raise ValidationError("root vertex missing")
    for v in diagram.vertices:
        if v.id == diagram.root:
            if v.entries:
                raise ValidationError("root vertex must be empty")
            continue
        if len(v.entries) != 1:
            raise ValidationError(f"vertex {v.id} must hold exactly one task")
        if not v.agents:
            raise ValidationError(f"vertex {v.id} has an empty agent set")
    for u, w in diagram.edges:
        if u not in diagram.by_id or w not in diagram.by_id:
            raise ValidationError(f"edge ({u}, {w}) references an unknown vertex")
    if graph.find_cycle_node(ids, diagram.edges) is not None:
        raise ValidationError("diagram has a cycle")
    seen: set[TaskId] = set()
    for v in diagram.vertices:
        for t, _ in v.entries:
            if t in seen:
                raise ValidationError(f"task {t!r} appears in more than one vertex")
            seen.add(t)
    for u, w in diagram.edges:
        if graph.has_path(diagram.children, u, w, skip=(u, w)):
            raise ValidationError(f"edge ({u}, {w}) is transitively implied")
    reach = diagram.descendants(diagram.root) | {diagram.root}
    missing = set(ids) - reach
    if missing:
        raise ValidationError(f"vertices {sorted(missing)} unreachable from the root")
