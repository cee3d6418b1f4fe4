"""Gridworld engine and scripted decentralized controllers.

The environment keeps a tick clock so it can decide joint completions; the
agents do not see it.  A controller is built with the static layout (where
task cells are, which joint tasks it is assigned to), which is the part a
trained policy would have internalized.  Everything dynamic reaches it only
through its own ``Observation``.
"""

from __future__ import annotations

import random
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field

from ..errors import DuplicateTask, ValidationError
from ..model import AgentId, TaskId, TaskSequence

Cell = tuple[int, int]

MOVES: dict[str, Cell] = {
    "stay": (0, 0),
    "north": (0, 1),
    "south": (0, -1),
    "east": (1, 0),
    "west": (-1, 0),
}
COMPLETION_REWARD = 1.0
PICKUP_REWARD = 0.1


@dataclass(frozen=True)
class TaskSite:
    name: TaskId
    cell: Cell
    # joint task: every member must stand on the cell in the same tick
    team: frozenset[AgentId] = frozenset()
    # None means any agent may complete it
    eligible: frozenset[AgentId] | None = None
    # delivery task: the item is fetched here first
    pickup: Cell | None = None
    # precedence: stays locked until this task is done
    requires: TaskId | None = None

    def allows(self, agent: AgentId) -> bool:
        if self.team:
            return agent in self.team
        return self.eligible is None or agent in self.eligible


@dataclass(frozen=True)
class Layout:
    domain: str
    width: int
    height: int
    agents: int
    sites: tuple[TaskSite, ...]
    radius: int
    start_cells: tuple[Cell, ...]

    def site(self, name: TaskId) -> TaskSite:
        for s in self.sites:
            if s.name == name:
                return s
        raise KeyError(name)

    @property
    def area(self) -> int:
        return self.width * self.height


@dataclass(frozen=True)
class CellView:
    offset: Cell
    tasks: tuple[tuple[TaskId, str], ...] = ()
    items: tuple[TaskId, ...] = ()
    agents: tuple[AgentId, ...] = ()


@dataclass(frozen=True)
class Observation:
    """What one agent perceives: its own state plus non-empty cells within
    ``radius`` (Chebyshev) of its position."""

    agent: AgentId
    position: Cell
    carrying: TaskId | None
    cells: tuple[CellView, ...]

    def summary(self) -> str:
        return f"pos={self.position[0]},{self.position[1]} seen={len(self.cells)}"


@dataclass(frozen=True)
class StepRecord:
    agent: AgentId
    step: int
    observation: str
    action: str
    reward: float
    completed_task: TaskId | None = None


def trace_of(steps: Sequence[StepRecord], agent: AgentId | None = None) -> TaskSequence:
    """Task completions of one agent, in step order, read off its rewards."""
    agents = {r.agent for r in steps}
    if agent is None:
        if len(agents) != 1:
            raise ValidationError("trace_of needs records of exactly one agent (or an explicit agent)")
        agent = agents.pop()
    elif agents - {agent}:
        raise ValidationError("records belong to more than one agent")
    tasks: list[TaskId] = []
    for r in sorted(steps, key=lambda r: r.step):
        if r.reward >= COMPLETION_REWARD and r.completed_task is not None:
            if r.completed_task in tasks:
                raise DuplicateTask(r.completed_task, agent)
            tasks.append(r.completed_task)
    return TaskSequence(agent, tuple(tasks))


@dataclass
class World:
    layout: Layout
    positions: dict[AgentId, Cell]
    done: dict[TaskId, int] = field(default_factory=dict)
    carrying: dict[AgentId, TaskId | None] = field(default_factory=dict)
    shelved: set[TaskId] = field(default_factory=set)
    tick: int = 0

    def __post_init__(self):
        for a in self.positions:
            self.carrying.setdefault(a, None)
        if not self.shelved and not self.done:
            self.shelved = {s.name for s in self.layout.sites if s.pickup is not None}

    def status(self, site: TaskSite) -> str:
        if site.name in self.done:
            return "done"
        if site.requires is not None and site.requires not in self.done:
            return "locked"
        return "open"

    @property
    def finished(self) -> bool:
        return len(self.done) == len(self.layout.sites)

    def observe(self, agent: AgentId) -> Observation:
        x0, y0 = self.positions[agent]
        r = self.layout.radius
        views: dict[Cell, dict] = {}

        def slot(cell: Cell) -> dict | None:
            dx, dy = cell[0] - x0, cell[1] - y0
            if max(abs(dx), abs(dy)) > r:
                return None
            return views.setdefault((dx, dy), {"tasks": [], "items": [], "agents": []})

        for site in self.layout.sites:
            if (v := slot(site.cell)) is not None:
                v["tasks"].append((site.name, self.status(site)))
            if site.pickup is not None and site.name in self.shelved:
                if (v := slot(site.pickup)) is not None:
                    v["items"].append(site.name)
        for other, pos in self.positions.items():
            if other != agent and (v := slot(pos)) is not None:
                v["agents"].append(other)
        cells = tuple(
            CellView(off, tuple(sorted(v["tasks"])), tuple(sorted(v["items"])), tuple(sorted(v["agents"])))
            for off, v in sorted(views.items())
        )
        return Observation(agent, (x0, y0), self.carrying[agent], cells)

    def step(self, actions: dict[AgentId, str], rng: random.Random) -> dict[AgentId, tuple[float, TaskId | None]]:
        """Apply simultaneous moves, then pickups, then completions."""
        w, h = self.layout.width, self.layout.height
        for a, act in actions.items():
            dx, dy = MOVES[act]
            x, y = self.positions[a]
            self.positions[a] = (min(max(x + dx, 0), w - 1), min(max(y + dy, 0), h - 1))

        rewards: dict[AgentId, tuple[float, TaskId | None]] = {a: (0.0, None) for a in self.positions}
        order = sorted(self.positions)
        rng.shuffle(order)
        for a in order:
            if self.carrying[a] is not None:
                continue
            for site in self.layout.sites:
                if site.name in self.shelved and site.pickup == self.positions[a] and site.allows(a):
                    self.shelved.discard(site.name)
                    self.carrying[a] = site.name
                    rewards[a] = (PICKUP_REWARD, None)
                    break

        for site in self.layout.sites:
            if self.status(site) != "open":
                continue
            if site.team:
                if all(self.positions[a] == site.cell for a in site.team):
                    doers = sorted(site.team)
                else:
                    continue
            elif site.pickup is not None:
                doers = [a for a in order if self.carrying[a] == site.name and self.positions[a] == site.cell]
                if not doers:
                    continue
                self.carrying[doers[0]] = None
            else:
                present = sorted(a for a in self.positions if self.positions[a] == site.cell and site.allows(a))
                if not present:
                    continue
                doers = [rng.choice(present)]
            self.done[site.name] = self.tick
            for a in doers:
                rewards[a] = (COMPLETION_REWARD, site.name)
        self.tick += 1
        return rewards


def _dist(a: Cell, b: Cell) -> int:
    return abs(a[0] - b[0]) + abs(a[1] - b[1])


class Controller:
    """Greedy nearest-target policy with random tie-breaking and
    ``epsilon``-random moves.

    Joint tasks are visited in name order among the agent's own assignments;
    this convention is what keeps teams from deadlocking.
    """

    def __init__(self, agent: AgentId, layout: Layout, rng: random.Random, epsilon: float = 0.1):
        self.agent = agent
        self.layout = layout
        self.rng = rng
        self.epsilon = epsilon
        self.known_done: set[TaskId] = set()
        self.known_taken: set[TaskId] = set()
        self.joint = sorted(s.name for s in layout.sites if agent in s.team)
        self.cells = {s.name: s for s in layout.sites}

    def _update(self, obs: Observation) -> None:
        x0, y0 = obs.position
        seen_items: dict[Cell, set[TaskId]] = {}
        for view in obs.cells:
            cell = (x0 + view.offset[0], y0 + view.offset[1])
            seen_items[cell] = set(view.items)
            for name, status in view.tasks:
                if status == "done":
                    self.known_done.add(name)
        for site in self.layout.sites:
            if site.pickup is None or site.name in self.known_done:
                continue
            # a pickup cell in view without its item means someone carries it
            dx, dy = site.pickup[0] - x0, site.pickup[1] - y0
            if max(abs(dx), abs(dy)) <= self.layout.radius and site.name not in seen_items.get(site.pickup, ()):
                if obs.carrying != site.name:
                    self.known_taken.add(site.name)

    def _targets(self, obs: Observation) -> list[Cell]:
        if obs.carrying is not None:
            return [self.cells[obs.carrying].cell]
        out = []
        nxt = next((t for t in self.joint if t not in self.known_done), None)
        if nxt is not None:
            out.append(self.cells[nxt].cell)
        for site in self.layout.sites:
            if site.team or site.name in self.known_done or site.name in self.known_taken:
                continue
            if not site.allows(self.agent):
                continue
            if site.requires is not None and site.requires not in self.known_done:
                continue
            out.append(site.pickup if site.pickup is not None else site.cell)
        return out

    def act(self, obs: Observation) -> str:
        if obs.agent != self.agent:
            raise ValidationError("controller received another agent's observation")
        self._update(obs)
        targets = self._targets(obs)
        if not targets:
            return "stay"
        pos = obs.position
        best = min(_dist(pos, t) for t in targets)
        goal = self.rng.choice(sorted(t for t in targets if _dist(pos, t) == best))
        if goal == pos:
            return "stay"
        if self.rng.random() < self.epsilon:
            return self.rng.choice(sorted(MOVES))
        closer = sorted(
            name for name, (dx, dy) in MOVES.items()
            if _dist((pos[0] + dx, pos[1] + dy), goal) < best
        )
        return self.rng.choice(closer)


def simulate(
    layout: Layout,
    seed: str,
    *,
    epsilon: float = 0.1,
    max_steps: int | None = None,
) -> dict[AgentId, list[StepRecord]] | None:
    """Run one episode; None if it stalls before every task is done."""
    rng = random.Random(f"{seed}/env")
    starts = list(layout.start_cells)
    positions = {a: rng.choice(starts) for a in range(1, layout.agents + 1)}
    world = World(layout, positions)
    controllers = {
        a: Controller(a, layout, random.Random(f"{seed}/agent{a}"), epsilon) for a in positions
    }
    records: dict[AgentId, list[StepRecord]] = {a: [] for a in positions}
    cap = max_steps if max_steps is not None else 50 * layout.area
    for step in range(cap):
        obs = {a: world.observe(a) for a in controllers}
        actions = {a: c.act(obs[a]) for a, c in controllers.items()}
        rewards = world.step(actions, rng)
        for a in controllers:
            reward, task = rewards[a]
            records[a].append(StepRecord(a, step, obs[a].summary(), actions[a], reward, task))
        if world.finished:
            return records
    return None


def episode_traces(records: dict[AgentId, Iterable[StepRecord]]) -> list[TaskSequence]:
    return [trace_of(list(recs), agent) for agent, recs in sorted(records.items())]
