"""Fixed English templates for explanations."""

from __future__ import annotations

from collections.abc import Iterable, Sequence

from .model import AgentId, Feature, TaskId


def name_list(items: Sequence[str]) -> str:
    items = list(items)
    if len(items) <= 2:
        return " and ".join(items)
    return ", ".join(items[:-1]) + ", and " + items[-1]


def clause_list(clauses: Sequence[str]) -> str:
    # independent clauses take a comma before the final "and"
    clauses = list(clauses)
    if len(clauses) <= 1:
        return "".join(clauses)
    return ", ".join(clauses[:-1]) + ", and " + clauses[-1]


def agents_phrase(agents: Iterable[AgentId]) -> str:
    ids = [str(a) for a in sorted(agents)]
    return ("agent " if len(ids) == 1 else "agents ") + name_list(ids)


def tasks_phrase(tasks: Iterable[TaskId]) -> str:
    names = sorted(tasks)
    return ("task " if len(names) == 1 else "tasks ") + name_list(names)


def _capitalize(text: str) -> str:
    return text[:1].upper() + text[1:]


def must_clause(f: Feature) -> str:
    if f.is_task_done:
        return f"task {f.task} must be completed"
    return f"agent {f.agent} must complete task {f.task}"


def may_clause(f: Feature) -> str:
    if f.is_task_done:
        return f"task {f.task} may need to be completed"
    return f"agent {f.agent} may need to complete task {f.task}"


def render_when(agents: Iterable[AgentId], task: TaskId,
                certain: Sequence[Feature], uncertain: Sequence[Feature]) -> str:
    text = f"For {agents_phrase(agents)} to complete task {task}"
    if certain:
        text += ", " + clause_list([must_clause(f) for f in certain])
    text += "."
    if uncertain:
        text += " Additionally, " + clause_list([may_clause(f) for f in uncertain]) + "."
    return text


def render_whynot(agents: Iterable[AgentId], task: TaskId,
                  certain: Sequence[Feature], uncertain: Sequence[Feature]) -> str:
    """Task conditions first in task order, then agent conditions grouped by
    task and modality ("agents 1 and 2 must complete task C")."""
    agents = sorted(agents)
    modal = [(f, True) for f in certain] + [(f, False) for f in uncertain]
    clauses = [
        (must_clause(f) if sure else may_clause(f))
        for f, sure in sorted((m for m in modal if m[0].is_task_done), key=lambda m: m[0].sort_key())
    ]
    groups: dict[tuple[TaskId, bool], list[AgentId]] = {}
    for f, sure in modal:
        if not f.is_task_done:
            groups.setdefault((f.task, sure), []).append(f.agent)
    for (t, sure), members in sorted(groups.items(), key=lambda kv: (kv[0][0], not kv[0][1])):
        verb = "must complete" if sure else "may need to complete"
        clauses.append(f"{agents_phrase(members)} {verb} task {t}")
    if not clauses:
        return f"Nothing else is needed for {agents_phrase(agents)} to complete task {task}."
    tail = f" for {agents_phrase(agents)} to complete task {task}."
    if len(clauses) > 1:
        tail = "," + tail
    return _capitalize(clause_list(clauses)) + tail


def render_what(task: TaskId, certain: Sequence[TaskId], uncertain: Sequence[TaskId]) -> str:
    if not certain and not uncertain:
        return f"No tasks follow task {task}."
    text = f"After task {task} is completed, "
    if certain:
        verb = "is" if len(certain) == 1 else "are"
        text += f"{tasks_phrase(certain)} {verb} completed."
        if uncertain:
            text += f" Additionally, {tasks_phrase(uncertain)} may be completed."
        return text
    return text + f"{tasks_phrase(uncertain)} may be completed."


def render(query, certain: Sequence, uncertain: Sequence) -> str:
    """Dispatch on the query kind."""
    kind = query.kind.value
    if kind == "when":
        return render_when(query.agents, query.task, certain, uncertain)
    if kind == "whynot":
        return render_whynot(query.agents, query.task, certain, uncertain)
    return render_what(query.task, certain, uncertain)
