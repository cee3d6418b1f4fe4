from __future__ import annotations

import io
import json

import pydot
import pytest
from conftest import e_dagger, e_star, episodes
from hypothesis import HealthCheck, given, settings

from hasse_explain.errors import DuplicateTask, ParseError
from hasse_explain.io import (
    diagram_from_dict,
    diagram_to_dict,
    export_dot,
    load_diagrams,
    load_episodes,
    read_episodes,
    save_diagrams,
    save_episodes,
    write_episodes,
)
from hasse_explain.model import HasseDiagram
from hasse_explain.summarize import hds_build

E_STAR_LINE = '{"id":"e1","sequences":[{"agent":1,"tasks":["A","C"]},{"agent":2,"tasks":["B","C"]}]}'


def test_load_example_line(tmp_path):
    p = tmp_path / "c.jsonl"
    p.write_text(E_STAR_LINE + "\n", encoding="utf-8")
    [e] = load_episodes(p)
    assert e.id == "e1"
    assert e.traces() == e_star().traces()
    assert hds_build(e).structure_key() == hds_build(e_star()).structure_key()


def test_empty_file(tmp_path):
    p = tmp_path / "empty.jsonl"
    p.write_text("", encoding="utf-8")
    assert load_episodes(p) == []


@pytest.mark.parametrize(
    "line, field",
    [
        ('{"id":"x","sequences":[{"agent":0,"tasks":["A"]}]}', "sequences[0].agent"),
        ('{"id":"x","sequences":[{"agent":"1","tasks":["A"]}]}', "sequences[0].agent"),
        ('{"id":"","sequences":[]}', "id"),
        ('{"id":"x","sequences":{}}', "sequences"),
        ('{"id":"x","sequences":[{"agent":1,"tasks":[1]}]}', "sequences[0].tasks"),
        ('{"id":"x","sequences":[{"agent":1,"tasks":[]},{"agent":3,"tasks":[]}]}', "sequences"),
        ('{"id":"x","sequences":[{"agent":1,"tasks":[]},{"agent":1,"tasks":[]}]}', "sequences"),
        ('{"id":"x","sequences":[],"metadata":[]}', "metadata"),
    ],
)
def test_schema_errors_carry_locus(line, field):
    with pytest.raises(ParseError) as err:
        read_episodes(["\n", line])
    assert err.value.line == 2
    assert err.value.field == field
    assert "line 2" in str(err.value)


def test_invalid_json_and_duplicates():
    with pytest.raises(ParseError) as err:
        read_episodes(["{nope"])
    assert err.value.line == 1
    with pytest.raises(ParseError):
        read_episodes([E_STAR_LINE, E_STAR_LINE])
    with pytest.raises(DuplicateTask):
        read_episodes(['{"id":"x","sequences":[{"agent":1,"tasks":["A","A"]}]}'])


@settings(max_examples=50, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(episodes())
def test_episode_round_trip(tmp_path, e):
    p = tmp_path / "rt.jsonl"
    save_episodes([e, e_star()], p)
    assert load_episodes(p) == [e, e_star()]


def test_metadata_round_trip():
    e = e_star()
    e = type(e)(e.id, e.sequences, {"domain": "sr", "seed": 4})
    buf = io.StringIO()
    write_episodes([e], buf)
    [back] = read_episodes(buf.getvalue().splitlines())
    assert back.metadata == {"domain": "sr", "seed": 4}


def test_diagram_round_trip(tmp_path):
    ds = [hds_build(e_star()), hds_build(e_dagger()), HasseDiagram.root_only("empty")]
    for d in ds:
        assert diagram_from_dict(json.loads(json.dumps(diagram_to_dict(d)))) == d
    p = tmp_path / "d.json"
    save_diagrams(ds, p)
    assert load_diagrams(p) == ds
    p.write_text(json.dumps(diagram_to_dict(ds[0])), encoding="utf-8")
    assert load_diagrams(p) == ds[:1]


def test_diagram_parse_errors():
    with pytest.raises(ParseError):
        diagram_from_dict({"vertices": [{"id": 0}], "edges": []})


def _parse_dot(text: str):
    [g] = pydot.graph_from_dot_data(text)
    nodes = [n for n in g.get_nodes() if n.get_name() not in ("node", "edge", "graph")]
    return g, nodes, g.get_edges()


def test_dot_e_star():
    text = export_dot(hds_build(e_star()))
    _, nodes, edges = _parse_dot(text)
    assert len(nodes) == 4 and len(edges) == 4
    labels = {n.get_label().strip('"') for n in nodes}
    assert labels == {"start", "A {1}", "B {2}", "C {1,2}"}


def test_dot_small_cases():
    _, nodes, edges = _parse_dot(export_dot(HasseDiagram.root_only()))
    assert len(nodes) == 1 and not edges
    _, nodes, edges = _parse_dot(export_dot(hds_build(e_dagger())))
    assert len(nodes) == 4 and len(edges) == 3


def test_dot_is_deterministic_and_escaped():
    d = hds_build(e_star())
    assert export_dot(d) == export_dot(hds_build(e_star()))
    weird = HasseDiagram.root_only('say "hi"')
    g, _, _ = _parse_dot(export_dot(weird))
    assert g.get_name() == '"say \\"hi\\""'
