"""Query engines for "When", "Why Not" and "What" questions over a corpus of
Hasse diagrams.

Certain conditions are rendered with "must", uncertain ones with "may".  A
feature is uncertain when it comes from a vertex that is unordered relative
to the queried task's vertex in some diagram.
"""

from __future__ import annotations

import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from enum import Enum
from typing import Any

from .boolmin import DEFAULT_MAX_VARIABLES, DEFAULT_SEARCH_BUDGET, BooleanSpec, Formula, minimize
from .errors import ConditionUnsatisfiable, NoMatchingDiagram, TaskNeverObserved, ValidationError
from .model import AgentId, Feature, HasseDiagram, TaskId
from .render import render
from .uncertainty import UncertaintyDictionary, build_uncertainty, comparability_split, vertex_features

log = logging.getLogger(__name__)


class QueryKind(str, Enum):
    WHEN = "when"
    WHY_NOT = "whynot"
    WHAT = "what"


@dataclass(frozen=True)
class Query:
    kind: QueryKind
    task: TaskId
    agents: frozenset[AgentId] = frozenset()
    conditions: frozenset[Feature] = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "agents", frozenset(self.agents))
        object.__setattr__(self, "conditions", frozenset(self.conditions))
        if self.kind is not QueryKind.WHAT and not self.agents:
            raise ValidationError(f"{self.kind.value} queries need a non-empty agent group")

    @classmethod
    def when(cls, agents: Iterable[AgentId], task: TaskId) -> Query:
        return cls(QueryKind.WHEN, task, frozenset(agents))

    @classmethod
    def why_not(cls, agents: Iterable[AgentId], task: TaskId, conditions: Iterable[Feature]) -> Query:
        return cls(QueryKind.WHY_NOT, task, frozenset(agents), frozenset(conditions))

    @classmethod
    def what(cls, task: TaskId) -> Query:
        return cls(QueryKind.WHAT, task)


@dataclass(frozen=True)
class Explanation:
    query: Query
    certain: tuple
    uncertain: tuple
    text: str
    diagnostics: dict[str, Any] = field(default_factory=dict, hash=False, compare=False)
    spec: BooleanSpec | None = field(default=None, compare=False)
    formula: Formula | None = field(default=None, compare=False)


def _anchor(d: HasseDiagram, task: TaskId, group: frozenset[AgentId], match: str) -> int | None:
    v = d.vertex_of(task)
    if v is None:
        return None
    if match == "exact":
        return v.id if v.agents == group else None
    if match == "superset":
        return v.id if v.agents >= group else None
    raise ValueError(f"unknown group matching mode {match!r}")


def _closure_features(d: HasseDiagram) -> dict[int, frozenset[Feature]]:
    """Features holding at each vertex: its own plus all of its ancestors'."""
    memo: dict[int, frozenset[Feature]] = {}

    def visit(vid: int) -> frozenset[Feature]:
        if vid not in memo:
            acc = set(vertex_features(d.by_id[vid]))
            for p in d.parents[vid]:
                acc |= visit(p)
            memo[vid] = frozenset(acc)
        return memo[vid]

    for v in d.vertices:
        visit(v.id)
    return memo


def _containing(task: TaskId, diagrams: Sequence[HasseDiagram]) -> list[HasseDiagram]:
    found = [d for d in diagrams if task in d.task_index]
    if not found:
        raise TaskNeverObserved(task)
    return found


def relevant_features(
    task: TaskId,
    agents: Iterable[AgentId],
    diagrams: Sequence[HasseDiagram],
    cap: int = DEFAULT_MAX_VARIABLES,
) -> list[Feature]:
    """Queried agents' completion of ``task``, then "task done" for every other
    task co-occurring with it.

    When more than ``cap`` co-occurring tasks exist, those most often ordered
    before ``task`` are kept.
    """
    containing = _containing(task, diagrams)
    seeds = [Feature.agent_did_task(a, task) for a in sorted(agents)]
    others = sorted({t for d in containing for t in d.tasks if t != task})
    if len(others) > cap:
        before = {t: 0 for t in others}
        for d in containing:
            for vid in d.ancestors(d.task_index[task]):
                t = d.by_id[vid].task
                if t is not None:
                    before[t] += 1
        others = sorted(sorted(others, key=lambda t: (-before[t], t))[:cap])
        log.warning("truncated relevant features for task %s to %d co-occurring tasks", task, cap)
    return seeds + [Feature.task_done(t) for t in others]


def encode_node(
    diagram: HasseDiagram,
    vid: int,
    features: Sequence[Feature],
    uncertainty: UncertaintyDictionary,
) -> tuple[int, ...]:
    """Bit per feature: set if it holds at ``vid`` or any ancestor, or if it is
    uncertain in this diagram."""
    diagram.vertex(vid)
    have = set(vertex_features(diagram.by_id[vid]))
    for w in diagram.ancestors(vid):
        have |= vertex_features(diagram.by_id[w])
    have |= uncertainty.get(diagram.id, frozenset())
    return tuple(int(f in have) for f in features)


@dataclass
class _Matched:
    diagrams: list[HasseDiagram]
    anchors: list[int | None]
    uncertainty: UncertaintyDictionary

    def pairs(self):
        return [(d, a) for d, a in zip(self.diagrams, self.anchors) if a is not None]


def _match(task, group, diagrams, match) -> _Matched:
    anchors = [_anchor(d, task, group, match) for d in diagrams]
    if all(a is None for a in anchors):
        raise NoMatchingDiagram(
            f"no diagram has task {task!r} completed by agents {sorted(group)}"
        )
    by_obj = {id(d): a for d, a in zip(diagrams, anchors)}
    table = build_uncertainty(
        [d for d, a in zip(diagrams, anchors) if a is not None], lambda d: by_obj.get(id(d))
    )
    return _Matched(list(diagrams), anchors, table)


def _split_certainty(features, success_closures):
    """A literal is certain if it held through ordered predecessors of at
    least one success vertex; otherwise it only held via uncertainty."""
    sure = [f for f in features if any(f in c for c in success_closures)]
    unsure = [f for f in features if f not in sure]
    return sure, unsure


def explain_when(
    query: Query,
    diagrams: Sequence[HasseDiagram],
    *,
    features: Sequence[Feature] | None = None,
    nontargets: str = "matching",
    match: str = "exact",
    cap: int = DEFAULT_MAX_VARIABLES,
    budget: int = DEFAULT_SEARCH_BUDGET,
) -> Explanation:
    diagrams = list(diagrams)
    task, group = query.task, query.agents
    _containing(task, diagrams)
    feats = list(features) if features is not None else relevant_features(task, group, diagrams, cap)
    m = _match(task, group, diagrams, match)

    seeds = [Feature.agent_did_task(a, task) for a in sorted(group)]
    variables = [f for f in feats if f not in seeds]
    if nontargets == "matching":
        pool = m.pairs()
    elif nontargets == "all":
        pool = list(zip(m.diagrams, m.anchors))
    else:
        raise ValueError(f"unknown non-target mode {nontargets!r}")

    targets, others, success = [], [], []
    for d, anchor in pool:
        closure = _closure_features(d)
        extra = m.uncertainty.get(d.id, frozenset()) if anchor is not None else frozenset()
        for v in d.vertices:
            bits = tuple(int(f in closure[v.id] or f in extra) for f in variables)
            if v.id == anchor:
                targets.append(bits)
                success.append(closure[v.id])
            else:
                others.append(bits)

    spec = BooleanSpec.from_observations(variables, targets, others, on_conflict="drop_non_targets")
    formula = minimize(spec, max_variables=cap, budget=budget)
    sure, demoted = _split_certainty(formula.positive_variables(), success)
    certain = seeds + sorted(sure)
    pooled = set().union(*(m.uncertainty.get(d.id, frozenset()) for d, _ in m.pairs()))
    uncertain = sorted(((pooled & set(feats)) | set(demoted)) - set(certain))

    diagnostics = _diagnostics(diagrams, m, spec, formula)
    return Explanation(query, tuple(certain), tuple(uncertain), render(query, certain, uncertain),
                       diagnostics, spec, formula)


def explain_whynot(
    query: Query,
    diagrams: Sequence[HasseDiagram],
    *,
    features: Sequence[Feature] | None = None,
    match: str = "exact",
    cap: int = DEFAULT_MAX_VARIABLES,
    budget: int = DEFAULT_SEARCH_BUDGET,
) -> Explanation:
    """Missing conditions: features every success state needs but the
    queried conditions lack."""
    diagrams = list(diagrams)
    task, group, phi = query.task, query.agents, query.conditions
    _containing(task, diagrams)
    feats = list(features) if features is not None else relevant_features(task, group, diagrams, cap)
    known = {t for d in diagrams for t in d.task_index}
    for f in sorted(phi):
        if f.task not in known:
            raise ValidationError(f"condition {f.name!r} mentions a task never observed")
        if f not in feats:
            feats.append(f)
    m = _match(task, group, diagrams, match)

    seeds = [Feature.agent_did_task(a, task) for a in sorted(group)]
    variables = [f for f in feats if f not in seeds]
    given = tuple(int(f in phi) for f in variables)
    success_bits, success = [], []
    for d, anchor in m.pairs():
        closure = _closure_features(d)[anchor]
        extra = m.uncertainty.get(d.id, frozenset())
        success_bits.append(tuple(int(f in closure or f in extra) for f in variables))
        success.append(closure)

    spec = BooleanSpec.from_observations(variables, success_bits, [given], on_conflict="drop_non_targets")
    formula = minimize(spec, max_variables=cap, budget=budget)
    missing = [f for f in formula.positive_variables() if f not in phi]
    sure, unsure = _split_certainty(missing, success)
    pooled = set().union(*(m.uncertainty.get(d.id, frozenset()) for d, _ in m.pairs()))
    certain = sorted(sure) + [s for s in seeds if s not in phi]
    uncertain = sorted(((pooled & set(feats)) - phi | set(unsure)) - set(certain))
    if not certain and not uncertain:
        raise ConditionUnsatisfiable(
            "the given conditions already include everything observed before success"
        )
    diagnostics = _diagnostics(diagrams, m, spec, formula)
    return Explanation(query, tuple(certain), tuple(uncertain), render(query, certain, uncertain),
                       diagnostics, spec, formula)


def explain_what(query: Query, diagrams: Sequence[HasseDiagram]) -> Explanation:
    """Tasks in immediate successors of the queried task are certain; tasks
    unordered relative to it are uncertain unless also an immediate successor
    somewhere."""
    diagrams = list(diagrams)
    containing = _containing(query.task, diagrams)
    after: set[TaskId] = set()
    unordered: set[TaskId] = set()
    for d in containing:
        anchor = d.task_index[query.task]
        for child in d.children[anchor]:
            after.update(t for t, _ in d.by_id[child].entries)
        for vid in comparability_split(d, anchor).incomparable:
            unordered.update(t for t, _ in d.by_id[vid].entries)
    certain = sorted(after)
    uncertain = sorted(unordered - after)
    diagnostics = {
        "diagrams": len(diagrams),
        "matched": len(containing),
        "overlap": sorted(after & unordered),
    }
    return Explanation(query, tuple(certain), tuple(uncertain), render(query, certain, uncertain),
                       diagnostics)


def explain(query: Query, diagrams: Sequence[HasseDiagram], **options) -> Explanation:
    if query.kind is QueryKind.WHEN:
        return explain_when(query, diagrams, **options)
    if query.kind is QueryKind.WHY_NOT:
        return explain_whynot(query, diagrams, **options)
    return explain_what(query, diagrams)


def _diagnostics(diagrams, m: _Matched, spec: BooleanSpec, formula: Formula) -> dict[str, Any]:
    out: dict[str, Any] = {
        "diagrams": len(diagrams),
        "matched": len(m.pairs()),
        "dropped": spec.dropped,
        "variables": [f.name for f in spec.variables],
        "formula": str(formula),
        "approximate": formula.approximate,
    }
    if spec.dropped:
        out["note"] = f"{spec.dropped} indistinguishable observations dropped"
    return out
