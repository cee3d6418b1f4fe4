from __future__ import annotations

import random

import pytest
from conftest import e_star, e_successors, e_three, random_episode

from hasse_explain.errors import (
    ConditionUnsatisfiable,
    NoMatchingDiagram,
    TaskNeverObserved,
    ValidationError,
)
from hasse_explain.explain import (
    Query,
    QueryKind,
    encode_node,
    explain,
    explain_what,
    explain_when,
    explain_whynot,
    relevant_features,
)
from hasse_explain.model import Episode, Feature
from hasse_explain.summarize import hds_build
from hasse_explain.uncertainty import build_uncertainty

F = Feature.parse

WHEN_ESTAR = (
    "For agents 1 and 2 to complete task C, agent 1 must complete task C, agent 2 must complete "
    "task C, task A must be completed, and task B must be completed."
)
WHEN_ETHREE = (
    "For agents 1 and 2 to complete task C, agent 1 must complete task C, agent 2 must complete "
    "task C, and task A must be completed. Additionally, task B may need to be completed."
)


def diagrams(*episodes):
    return [hds_build(e) for e in episodes]


def test_query_validation():
    with pytest.raises(ValidationError):
        Query.when([], "C")
    assert Query.what("C").kind is QueryKind.WHAT
    assert Query.why_not([1], "C", [F("A")]).conditions == {F("A")}


def test_relevant_features():
    ds = diagrams(e_star())
    assert relevant_features("C", {1, 2}, ds) == [F("1:C"), F("2:C"), F("A"), F("B")]
    chain = diagrams(Episode.from_traces("c", {1: ["C"]}))
    assert relevant_features("C", {1}, chain) == [F("1:C")]
    with pytest.raises(TaskNeverObserved):
        relevant_features("Z", {1}, ds)


def test_relevant_features_truncation_keeps_predecessors(caplog):
    # X0..X3 precede T; Y0..Y3 come after it
    e = Episode.from_traces("t", {1: ["X0", "X1", "X2", "X3", "T", "Y0", "Y1", "Y2", "Y3"]})
    feats = relevant_features("T", {1}, diagrams(e), cap=4)
    assert feats == [F("1:T"), F("X0"), F("X1"), F("X2"), F("X3")]
    assert "truncated" in caplog.text


def test_encode_node():
    feats = [F("1:C"), F("2:C"), F("A"), F("B")]
    d = hds_build(e_star())
    assert encode_node(d, d.task_index["C"], feats, {}) == (1, 1, 1, 1)
    assert encode_node(d, d.root, feats, {}) == (0, 0, 0, 0)
    d3 = hds_build(e_three())
    table = {"E3": frozenset({F("B")})}
    assert encode_node(d3, d3.task_index["A"], feats, table) == (0, 0, 1, 1)


def test_when_golden_e_star():
    r = explain_when(Query.when([1, 2], "C"), diagrams(e_star()))
    assert r.text == WHEN_ESTAR
    assert r.certain == (F("1:C"), F("2:C"), F("A"), F("B"))
    assert r.uncertain == ()
    assert str(r.formula) == "A ∧ B"


def test_when_golden_e_three():
    r = explain_when(Query.when([1, 2], "C"), diagrams(e_three()))
    assert r.text == WHEN_ETHREE
    assert r.uncertain == (F("B"),)
    assert r.diagnostics["dropped"] == 1
    assert r.diagnostics["note"] == "1 indistinguishable observations dropped"
    assert str(r.formula) == "A"


def test_when_requires_exact_group_by_default():
    ds = diagrams(e_star())
    with pytest.raises(NoMatchingDiagram) as err:
        explain_when(Query.when([1], "C"), ds)
    assert err.value.exit_code == 3
    r = explain_when(Query.when([1], "C"), ds, match="superset")
    assert r.certain[0] == F("1:C")


def test_when_unknown_task():
    with pytest.raises(TaskNeverObserved):
        explain_when(Query.when([1], "Z"), diagrams(e_star()))


def test_when_nontargets_all_pools_every_diagram():
    other = Episode.from_traces("o", {1: ["A", "C"], 2: ["B"]})
    ds = diagrams(e_star(), other)
    matching = explain_when(Query.when([1, 2], "C"), ds)
    pooled = explain_when(Query.when([1, 2], "C"), ds, nontargets="all")
    assert matching.spec.non_targets <= pooled.spec.non_targets
    assert len(pooled.spec.non_targets) >= len(matching.spec.non_targets)
    with pytest.raises(ValueError):
        explain_when(Query.when([1, 2], "C"), ds, nontargets="some")


def test_when_explicit_features_override():
    r = explain_when(Query.when([1, 2], "C"), diagrams(e_star()), features=[F("1:C"), F("2:C"), F("A")])
    assert r.certain == (F("1:C"), F("2:C"), F("A"))
    assert r.diagnostics["variables"] == ["A"]


def test_whynot_golden_e_star():
    r = explain_whynot(Query.why_not([1, 2], "C", [F("A")]), diagrams(e_star()))
    assert r.text == (
        "Task B must be completed, and agents 1 and 2 must complete task C, "
        "for agents 1 and 2 to complete task C."
    )
    assert set(r.certain) == {F("B"), F("1:C"), F("2:C")}


def test_whynot_golden_e_three():
    ds = diagrams(e_three())
    r = explain_whynot(Query.why_not([1, 2], "C", [F("A")]), ds)
    assert r.text == (
        "Task B may need to be completed, and agents 1 and 2 must complete task C, "
        "for agents 1 and 2 to complete task C."
    )
    r = explain_whynot(Query.why_not([1, 2], "C", [F("A"), F("1:C"), F("2:C")]), ds)
    assert r.text == "Task B may need to be completed for agents 1 and 2 to complete task C."
    assert r.certain == () and r.uncertain == (F("B"),)


def test_whynot_nothing_missing():
    ds = diagrams(e_star())
    with pytest.raises(ConditionUnsatisfiable):
        explain_whynot(Query.why_not([1, 2], "C", [F("A"), F("B"), F("1:C"), F("2:C")]), ds)


def test_whynot_condition_on_unseen_task():
    with pytest.raises(ValidationError):
        explain_whynot(Query.why_not([1, 2], "C", [F("Q")]), diagrams(e_star()))


def test_what_goldens():
    ds = diagrams(e_star())
    r = explain_what(Query.what("A"), ds)
    assert r.text == "After task A is completed, task C is completed. Additionally, task B may be completed."
    assert (r.certain, r.uncertain) == (("C",), ("B",))
    assert explain_what(Query.what("C"), ds).text == "No tasks follow task C."
    r = explain_what(Query.what("C"), diagrams(e_successors()))
    assert r.text == "After task C is completed, tasks D and E are completed. Additionally, task B may be completed."
    with pytest.raises(TaskNeverObserved):
        explain_what(Query.what("Z"), ds)


def test_what_overlap_reports_certain_only():
    # D follows C directly in one episode and is unordered relative to C in the other
    direct = Episode.from_traces("d1", {1: ["C", "D"]})
    loose = Episode.from_traces("d2", {1: ["C"], 2: ["D"]})
    r = explain_what(Query.what("C"), diagrams(direct, loose))
    assert r.certain == ("D",) and r.uncertain == ()
    assert r.diagnostics["overlap"] == ["D"]


def test_explain_dispatch():
    ds = diagrams(e_star())
    assert explain(Query.when([1, 2], "C"), ds).text == WHEN_ESTAR
    assert explain(Query.what("C"), ds).text == "No tasks follow task C."


def _corpus(seed: int, chain: bool = False) -> list:
    rng = random.Random(seed)
    tasks = [f"t{k}" for k in range(rng.randint(2, 6))]
    out = []
    for k in range(rng.randint(1, 6)):
        if chain:
            order = rng.sample(tasks, rng.randint(1, len(tasks)))
            n = rng.randint(1, 3)
            out.append(Episode.from_traces(f"c{k}", {a: order for a in range(1, n + 1)}))
        else:
            e = random_episode(rng, max_agents=4, max_tasks=6, eid=f"r{k}")
            out.append(e)
    return diagrams(*out)


def _queries(ds, rng):
    pairs = sorted({(v.task, tuple(sorted(v.agents))) for d in ds for v in d.vertices if not v.is_root})
    return rng.sample(pairs, min(3, len(pairs)))


@pytest.mark.parametrize("seed", range(60))
def test_explanation_invariants(seed):
    rng = random.Random(seed)
    ds = _corpus(seed)
    for task, group in _queries(ds, rng):
        r = explain_when(Query.when(group, task), ds)
        assert not set(r.certain) & set(r.uncertain)
        assert all(r.formula.evaluate(m) for m in r.spec.targets)
        assert not any(r.formula.evaluate(m) for m in r.spec.non_targets)
        # every "may" comes from the uncertainty table or was demoted from a literal
        matched = [d for d in ds if d.vertex_of(task) and d.vertex_of(task).agents == frozenset(group)]
        table = build_uncertainty(matched, lambda d: d.task_index[task])
        pooled = set().union(*table.values())
        literals = set(r.formula.positive_variables())
        assert all(f in pooled or f in literals for f in r.uncertain)
        w = explain_what(Query.what(task), ds)
        assert not set(w.certain) & set(w.uncertain)


@pytest.mark.parametrize("seed", range(40))
def test_chain_corpora_have_no_uncertainty(seed):
    rng = random.Random(seed)
    ds = _corpus(seed, chain=True)
    for task, group in _queries(ds, rng):
        assert explain_when(Query.when(group, task), ds).uncertain == ()
        assert explain_what(Query.what(task), ds).uncertain == ()
