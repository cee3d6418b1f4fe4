"""Order uncertainty around an anchor vertex."""

from __future__ import annotations

from collections.abc import Callable, Iterable
from dataclasses import dataclass

from .model import Feature, HasseDiagram, Vertex

UncertaintyDictionary = dict[str, frozenset[Feature]]


@dataclass(frozen=True)
class ComparabilitySplit:
    anchor: int
    comparable: frozenset[int]
    incomparable: frozenset[int]


def comparability_split(diagram: HasseDiagram, anchor: int) -> ComparabilitySplit:
    """Partition vertices into those ordered relative to ``anchor`` and the rest."""
    comparable = diagram.ancestors(anchor) | diagram.descendants(anchor) | {anchor}
    everything = {v.id for v in diagram.vertices}
    return ComparabilitySplit(anchor, frozenset(comparable), frozenset(everything - comparable))


def vertex_features(v: Vertex) -> frozenset[Feature]:
    out = set()
    for task, agents in v.entries:
        out.add(Feature.task_done(task))
        out.update(Feature.agent_did_task(a, task) for a in agents)
    return frozenset(out)


def build_uncertainty(
    diagrams: Iterable[HasseDiagram],
    anchor_of: Callable[[HasseDiagram], int | None],
) -> UncertaintyDictionary:
    """Features of vertices unordered relative to each diagram's anchor.

    Diagrams for which ``anchor_of`` returns None are left out.
    """
    table: UncertaintyDictionary = {}
    for d in diagrams:
        anchor = anchor_of(d)
        if anchor is None:
            continue
        split = comparability_split(d, anchor)
        feats: set[Feature] = set()
        for vid in split.incomparable:
            feats |= vertex_features(d.by_id[vid])
        table[d.id] = table.get(d.id, frozenset()) | frozenset(feats)
    return table
