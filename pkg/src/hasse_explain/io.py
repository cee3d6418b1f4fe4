"""Episode JSON Lines, diagram JSON and DOT export.

Episode line::

    {"id": "e1", "sequences": [{"agent": 1, "tasks": ["A", "C"]}, ...], "metadata": {...}}

Diagram object::

    {"id": "e1", "root": 0,
     "vertices": [{"id": 0, "task": null, "agents": []}, {"id": 1, "task": "A", "agents": [1]}],
     "edges": [[0, 1]]}
"""

from __future__ import annotations

import json
from collections.abc import Iterable
from pathlib import Path
from typing import Any, TextIO

from .errors import ParseError, ValidationError
from .model import Episode, HasseDiagram, TaskSequence, Vertex


def episode_to_dict(e: Episode) -> dict[str, Any]:
    out: dict[str, Any] = {
        "id": e.id,
        "sequences": [{"agent": s.agent, "tasks": list(s.tasks)} for s in e.sequences],
    }
    if e.metadata:
        out["metadata"] = dict(e.metadata)
    return out


def episode_from_dict(obj: Any, line: int | None = None) -> Episode:
    if not isinstance(obj, dict):
        raise ParseError("expected a JSON object", line)
    eid = obj.get("id")
    if not isinstance(eid, str) or not eid:
        raise ParseError("episode id must be a non-empty string", line, "id")
    seqs_raw = obj.get("sequences")
    if not isinstance(seqs_raw, list):
        raise ParseError("sequences must be a list", line, "sequences")
    seqs = []
    for k, s in enumerate(seqs_raw):
        where = f"sequences[{k}]"
        if not isinstance(s, dict):
            raise ParseError("expected an object", line, where)
        agent = s.get("agent")
        if not isinstance(agent, int) or isinstance(agent, bool) or agent < 1:
            raise ParseError(f"agent must be an integer >= 1, got {agent!r}", line, f"{where}.agent")
        tasks = s.get("tasks", [])
        if not isinstance(tasks, list) or not all(isinstance(t, str) and t for t in tasks):
            raise ParseError("tasks must be a list of non-empty strings", line, f"{where}.tasks")
        seqs.append(TaskSequence(agent, tuple(tasks)))
    metadata = obj.get("metadata", {})
    if not isinstance(metadata, dict):
        raise ParseError("metadata must be an object", line, "metadata")
    try:
        episode = Episode(eid, tuple(seqs), metadata)
    except ValidationError as exc:
        if type(exc) is ValidationError:
            raise ParseError(str(exc), line, "sequences") from None
        raise
    if not episode.is_dense:
        raise ParseError(f"agent ids must be 1..{len(seqs)}, got {episode.agents}", line, "sequences")
    return episode


def read_episodes(stream: TextIO | Iterable[str]) -> list[Episode]:
    episodes = []
    seen: set[str] = set()
    for n, raw in enumerate(stream, start=1):
        if not raw.strip():
            continue
        try:
            obj = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", n) from None
        e = episode_from_dict(obj, n)
        if e.id in seen:
            raise ParseError(f"duplicate episode id {e.id!r}", n, "id")
        seen.add(e.id)
        episodes.append(e)
    return episodes


def write_episodes(episodes: Iterable[Episode], stream: TextIO) -> None:
    for e in episodes:
        stream.write(json.dumps(episode_to_dict(e), separators=(",", ":"), sort_keys=False) + "\n")


def load_episodes(path: str | Path) -> list[Episode]:
    with open(path, encoding="utf-8") as fh:
        return read_episodes(fh)


def save_episodes(episodes: Iterable[Episode], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        write_episodes(episodes, fh)


def diagram_to_dict(d: HasseDiagram) -> dict[str, Any]:
    return {
        "id": d.id,
        "root": d.root,
        "vertices": [
            {"id": v.id, "task": v.task, "agents": sorted(v.agents)} for v in d.vertices
        ],
        "edges": [list(e) for e in sorted(d.edges)],
    }


def diagram_from_dict(obj: Any) -> HasseDiagram:
    try:
        vertices = []
        for v in obj["vertices"]:
            if v["task"] is None:
                vertices.append(Vertex(int(v["id"])))
            else:
                vertices.append(Vertex.of(int(v["id"]), str(v["task"]), (int(a) for a in v["agents"])))
        edges = frozenset((int(u), int(w)) for u, w in obj["edges"])
        return HasseDiagram(tuple(vertices), edges, int(obj.get("root", 0)), str(obj.get("id", "")))
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed diagram: {exc}") from None


def save_diagrams(diagrams: Iterable[HasseDiagram], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump([diagram_to_dict(d) for d in diagrams], fh, indent=2)
        fh.write("\n")


def load_diagrams(path: str | Path) -> list[HasseDiagram]:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno) from None
    if isinstance(data, dict):
        data = [data]
    return [diagram_from_dict(d) for d in data]


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(d: HasseDiagram) -> str:
    lines = [f"digraph {_quote(d.id or 'hasse')} {{", "  rankdir=TB;", "  node [shape=box];"]
    for v in d.vertices:
        lines.append(f"  n{v.id} [label={_quote(v.label)}];")
    for u, w in sorted(d.edges):
        lines.append(f"  n{u} -> n{w};")
    lines.append("}")
    return "\n".join(lines) + "\n"
