"""Layouts for the four gridworld domains.

* SR  -- search and rescue: single-agent victims, joint fires with fixed teams
* LBF -- level-based foraging: agent and food levels decide eligibility;
  heavy food needs a team whose levels add up
* RW  -- robot warehouse: each task is one pickup-then-deliver pair
* PP  -- pressure plates: a chain of plates that unlock one after another
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

from ..errors import InfeasibleConfig
from .world import Cell, Layout, TaskSite

DOMAINS = ("sr", "lbf", "rw", "pp")


@dataclass(frozen=True)
class ScenarioConfig:
    domain: str
    agents: int
    tasks: int
    episodes: int = 100
    seed: int = 0
    width: int | None = None
    height: int | None = None
    joint_fraction: float | None = None
    precedence_depth: int | None = None
    route_length: int | None = None
    radius: int | None = None
    epsilon: float = 0.1

    def __post_init__(self):
        object.__setattr__(self, "domain", self.domain.lower())
        if self.domain not in DOMAINS:
            raise InfeasibleConfig(f"unknown domain {self.domain!r}; choose from {', '.join(DOMAINS)}")
        if self.agents < 1 or self.tasks < 1 or self.episodes < 1:
            raise InfeasibleConfig("agents, tasks and episodes must all be >= 1")
        if self.joint_fraction is not None and not 0.0 <= self.joint_fraction <= 1.0:
            raise InfeasibleConfig("joint fraction must lie in [0, 1]")
        if self.precedence_depth is not None:
            if self.domain != "pp":
                raise InfeasibleConfig("precedence depth only applies to the pp domain")
            if not 0 <= self.precedence_depth <= self.tasks:
                raise InfeasibleConfig(
                    f"precedence chain of {self.precedence_depth} exceeds {self.tasks} tasks"
                )
        if self.route_length is not None and self.route_length < 1:
            raise InfeasibleConfig("route length must be >= 1")
        if self.radius is not None and self.radius < 0:
            raise InfeasibleConfig("observation radius must be >= 0")
        if not 0.0 <= self.epsilon < 1.0:
            raise InfeasibleConfig("epsilon must lie in [0, 1)")

    @property
    def observation_radius(self) -> int:
        if self.radius is not None:
            return self.radius
        return 4 if self.domain == "pp" else 1


def _names(prefix: str, count: int, start: int = 1) -> list[str]:
    width = len(str(start + count - 1))
    return [f"{prefix}_{i:0{width}d}" for i in range(start, start + count)]


def _grid(cfg: ScenarioConfig, default_w: int, default_h: int) -> tuple[int, int]:
    w = cfg.width or default_w
    h = cfg.height or default_h
    if w < 1 or h < 1:
        raise InfeasibleConfig("grid dimensions must be positive")
    return w, h


def _free_cells(w: int, h: int, rng: random.Random, count: int, exclude=()) -> list[Cell]:
    cells = [(x, y) for x in range(w) for y in range(h) if (x, y) not in set(exclude)]
    if len(cells) < count:
        raise InfeasibleConfig(f"a {w}x{h} grid cannot hold {count} distinct task cells")
    return rng.sample(cells, count)


def _all_cells(w: int, h: int) -> tuple[Cell, ...]:
    return tuple((x, y) for x in range(w) for y in range(h))


def _joint_count(cfg: ScenarioConfig, default: float) -> int:
    if cfg.agents < 2:
        return 0
    frac = default if cfg.joint_fraction is None else cfg.joint_fraction
    return int(round(frac * cfg.tasks))


def _team(rng: random.Random, agents: int) -> frozenset[int]:
    size = 3 if agents >= 3 and rng.random() < 1 / 3 else 2
    return frozenset(rng.sample(range(1, agents + 1), size))


def search_rescue(cfg: ScenarioConfig, rng: random.Random) -> Layout:
    side = max(5, math.ceil(math.sqrt(4 * (cfg.agents + cfg.tasks))))
    w, h = _grid(cfg, side, side)
    joint = _joint_count(cfg, 0.3)
    cells = _free_cells(w, h, rng, cfg.tasks)
    sites = [TaskSite(n, c, team=_team(rng, cfg.agents)) for n, c in zip(_names("fire", joint), cells)]
    sites += [TaskSite(n, c) for n, c in zip(_names("victim", cfg.tasks - joint), cells[joint:])]
    return Layout("sr", w, h, cfg.agents, tuple(sorted(sites, key=lambda s: s.name)),
                  cfg.observation_radius, _all_cells(w, h))


def foraging(cfg: ScenarioConfig, rng: random.Random) -> Layout:
    side = max(5, math.ceil(math.sqrt(4 * (cfg.agents + cfg.tasks))))
    w, h = _grid(cfg, side, side)
    levels = {a: rng.randint(1, 3) for a in range(1, cfg.agents + 1)}
    top = max(levels.values())
    joint = _joint_count(cfg, 0.3)
    cells = _free_cells(w, h, rng, cfg.tasks)
    names = _names("food", cfg.tasks)
    heavy = set(rng.sample(range(cfg.tasks), joint))
    sites = []
    for k, (name, cell) in enumerate(zip(names, cells)):
        if k in heavy:
            sites.append(TaskSite(name, cell, team=_team(rng, cfg.agents)))
        else:
            level = rng.randint(1, top)
            sites.append(TaskSite(name, cell, eligible=frozenset(a for a, l in levels.items() if l >= level)))
    return Layout("lbf", w, h, cfg.agents, tuple(sites), cfg.observation_radius, _all_cells(w, h))


def warehouse(cfg: ScenarioConfig, rng: random.Random) -> Layout:
    route = cfg.route_length or 3
    cols = min(cfg.tasks, 8)
    rows = math.ceil(cfg.tasks / cols)
    w, h = _grid(cfg, cols + 2, route + rows + 1)
    if w < 3 or h < route + rows + 1 or (w - 2) * rows < cfg.tasks:
        raise InfeasibleConfig(f"a {w}x{h} warehouse cannot shelve {cfg.tasks} items")
    shelves = [(1 + k % (w - 2), route + k // (w - 2)) for k in range(cfg.tasks)]
    rng.shuffle(shelves)
    goals = [(0, 0), (w - 1, 0)]
    sites = [
        TaskSite(name, goals[0] if shelf[0] < w / 2 else goals[1], pickup=shelf)
        for name, shelf in zip(_names("item", cfg.tasks), shelves)
    ]
    return Layout("rw", w, h, cfg.agents, tuple(sites), cfg.observation_radius, _all_cells(w, h))


def pressure_plates(cfg: ScenarioConfig, rng: random.Random) -> Layout:
    depth = cfg.tasks if cfg.precedence_depth is None else cfg.precedence_depth
    free = cfg.tasks - depth
    w, h = _grid(cfg, 5, 3 * depth + 3)
    if h < 3 * depth + 3:
        raise InfeasibleConfig(f"height {h} is too small for a chain of {depth} plates")
    names = _names("plate", cfg.tasks)
    sites = []
    for k in range(depth):
        sites.append(TaskSite(
            names[k],
            (rng.randrange(w), 3 * k + 3),
            requires=names[k - 1] if k else None,
        ))
    start_room = [(x, y) for x in range(w) for y in range(3)]
    if free > len(start_room):
        raise InfeasibleConfig("too many unchained plates for the start room")
    for name, cell in zip(names[depth:], rng.sample(start_room, free)):
        sites.append(TaskSite(name, cell))
    return Layout("pp", w, h, cfg.agents, tuple(sites), cfg.observation_radius, tuple(start_room))


BUILDERS = {"sr": search_rescue, "lbf": foraging, "rw": warehouse, "pp": pressure_plates}


def build_layout(cfg: ScenarioConfig) -> Layout:
    return BUILDERS[cfg.domain](cfg, random.Random(f"{cfg.seed}/layout/{cfg.domain}"))
