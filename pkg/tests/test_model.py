from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from hasse_explain.errors import DuplicateTask, UnknownVertex, ValidationError
from hasse_explain.model import (
    Episode,
    Feature,
    FeatureKind,
    HasseDiagram,
    TaskSequence,
    Vertex,
    conforms,
    validate,
)

task_lists = st.lists(st.sampled_from("ABCDEFG"), max_size=7)


@pytest.mark.parametrize(
    "seq, trace, expected",
    [
        (["A", "C"], ["A", "B", "C"], True),
        ([], ["A", "B"], True),
        (["C", "A"], ["A", "B", "C"], False),
        (["A", "A"], ["A"], False),
        (["A"], [], False),
    ],
)
def test_conforms_examples(seq, trace, expected):
    assert conforms(seq, trace) is expected


@given(task_lists)
def test_conforms_reflexive(seq):
    assert conforms(seq, seq)


@given(task_lists, st.data())
def test_conforms_transitive(trace, data):
    mid = [t for t in trace if data.draw(st.booleans())]
    low = [t for t in mid if data.draw(st.booleans())]
    assert conforms(mid, trace)
    assert conforms(low, mid)
    assert conforms(low, trace)


def test_feature_identity_and_parse():
    assert Feature.task_done("A") == Feature.parse("A")
    assert Feature.agent_did_task(2, "C") == Feature.parse("2:C")
    assert Feature.parse(" 2:C ").kind is FeatureKind.AGENT_DID_TASK
    assert Feature.task_done("C") != Feature.agent_did_task(1, "C")
    assert Feature.parse("2:C").name == "2:C"
    with pytest.raises(ValidationError):
        Feature.parse("0:C")
    with pytest.raises(ValidationError):
        Feature.parse("")


def test_feature_order_groups_by_task():
    feats = [Feature.parse(x) for x in ["2:C", "B", "C", "1:C", "A"]]
    assert [f.name for f in sorted(feats)] == ["A", "B", "C", "1:C", "2:C"]


def test_task_sequence_rejects_repeats():
    with pytest.raises(DuplicateTask) as err:
        TaskSequence(1, ("A", "B", "A"))
    assert err.value.task == "A"
    assert "A#2" in str(err.value)


def test_task_sequence_rejects_bad_agent():
    with pytest.raises(ValidationError):
        TaskSequence(0, ("A",))


def test_episode_agents_unique():
    with pytest.raises(ValidationError):
        Episode("x", (TaskSequence(1, ("A",)), TaskSequence(1, ("B",))))


def test_episode_accessors(estar):
    assert estar.agents == [1, 2]
    assert estar.tasks == ["A", "B", "C"]
    assert estar.trace(2) == ("B", "C")
    assert estar.is_dense
    assert not Episode.from_traces("g", {1: ["A"], 3: ["B"]}).is_dense


def test_vertex_labels():
    assert Vertex(0).label == "start"
    v = Vertex.of(3, "C", [2, 1])
    assert v.label == "C {1,2}"
    assert v.agents == frozenset({1, 2})
    assert v.task == "C"


def _diagram(edges, tasks=("A", "B", "C")):
    vs = (Vertex(0),) + tuple(Vertex.of(i + 1, t, [1]) for i, t in enumerate(tasks))
    return HasseDiagram(vs, frozenset(edges))


def test_validate_accepts_reduced_dag():
    validate(_diagram({(0, 1), (1, 2), (0, 3)}))
    validate(HasseDiagram.root_only())


@pytest.mark.parametrize(
    "edges",
    [
        {(0, 1), (1, 2), (2, 1), (0, 3)},  # cycle
        {(0, 1), (1, 2), (0, 2), (0, 3)},  # redundant edge
        {(0, 1), (1, 2)},  # vertex 3 unreachable
    ],
)
def test_validate_rejects_broken_diagrams(edges):
    with pytest.raises(ValidationError):
        validate(_diagram(edges))


def test_validate_rejects_duplicate_task():
    with pytest.raises(ValidationError):
        validate(_diagram({(0, 1), (0, 2)}, tasks=("A", "A")))


def test_vertex_lookup():
    d = _diagram({(0, 1), (1, 2), (0, 3)})
    assert d.vertex_of("B").id == 2
    assert d.vertex_of("Z") is None
    assert d.ancestors(2) == {0, 1}
    assert d.descendants(1) == {2}
    with pytest.raises(UnknownVertex):
        d.vertex(99)
