"""Episode corpora from scripted decentralized policies in four gridworlds."""

from __future__ import annotations

from ..errors import InfeasibleConfig
from ..model import Episode
from .domains import DOMAINS, ScenarioConfig, build_layout
from .world import (
    COMPLETION_REWARD,
    Controller,
    Layout,
    Observation,
    StepRecord,
    TaskSite,
    World,
    episode_traces,
    simulate,
    trace_of,
)

MAX_REGENERATIONS = 50

__all__ = [
    "COMPLETION_REWARD",
    "DOMAINS",
    "Controller",
    "Layout",
    "Observation",
    "ScenarioConfig",
    "StepRecord",
    "TaskSite",
    "World",
    "build_layout",
    "generate",
    "simulate",
    "trace_of",
]


def generate(config: ScenarioConfig) -> list[Episode]:
    """Simulate ``config.episodes`` episodes in which every task gets done.

    Episodes that stall past 50 x grid-area ticks are re-run with the next
    attempt seed; the number of re-runs lands in the episode metadata.
    """
    layout = build_layout(config)
    episodes = []
    for k in range(config.episodes):
        for attempt in range(MAX_REGENERATIONS + 1):
            records = simulate(layout, f"{config.seed}/{k}/{attempt}", epsilon=config.epsilon)
            if records is not None:
                break
        else:
            raise InfeasibleConfig(
                f"episode {k} stalled {MAX_REGENERATIONS + 1} times; the layout is likely unsolvable"
            )
        steps = len(next(iter(records.values())))
        episodes.append(Episode(
            f"{config.domain}-{config.seed}-{k:04d}",
            tuple(episode_traces(records)),
            {
                "domain": config.domain,
                "seed": config.seed,
                "agents": config.agents,
                "tasks": config.tasks,
                "regenerations": attempt,
                "steps": steps,
            },
        ))
    return episodes
