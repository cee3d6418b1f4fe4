"""Exception hierarchy.

Every error carries the CLI exit code it maps to:

* 2 -- malformed input or a violated invariant (parse/validation)
* 3 -- a well-formed query the corpus cannot answer
* 4 -- a configured resource cap was exceeded
"""

from __future__ import annotations


class HasseExplainError(Exception):
    exit_code = 1


class ValidationError(HasseExplainError, ValueError):
    exit_code = 2


class DuplicateTask(ValidationError):
    def __init__(self, task: str, agent: int | None = None):
        where = f" for agent {agent}" if agent is not None else ""
        super().__init__(f"task {task!r} completed more than once{where}; "
                         f"rename repeat completions (e.g. {task}#2) upstream")
        self.task = task
        self.agent = agent


class InconsistentEpisode(ValidationError):
    """Agents disagree on the relative order of a joint task."""


class CyclicInput(ValidationError):
    pass


class UnknownAgent(ValidationError):
    pass


class UnknownTask(ValidationError):
    pass


class UnknownVertex(ValidationError):
    pass


class ParseError(ValidationError):
    def __init__(self, message: str, line: int | None = None, field: str | None = None):
        locus = []
        if line is not None:
            locus.append(f"line {line}")
        if field is not None:
            locus.append(f"field {field!r}")
        prefix = f"{', '.join(locus)}: " if locus else ""
        super().__init__(prefix + message)
        self.line = line
        self.field = field


class InfeasibleConfig(ValidationError):
    pass


class EmptyTargets(ValidationError):
    pass


class ConflictingSpec(ValidationError):
    pass


class UnanswerableQuery(HasseExplainError):
    exit_code = 3


class TaskNeverObserved(UnanswerableQuery):
    def __init__(self, task: str):
        super().__init__(f"task {task!r} does not appear in any diagram")
        self.task = task


class NoMatchingDiagram(UnanswerableQuery):
    pass


class ConditionUnsatisfiable(UnanswerableQuery):
    pass


class ResourceLimit(HasseExplainError):
    exit_code = 4


class PathExplosion(ResourceLimit):
    def __init__(self, limit: int):
        super().__init__(f"diagram has more than {limit} maximal paths")
        self.limit = limit


class TooManyVariables(ResourceLimit):
    def __init__(self, count: int, cap: int):
        super().__init__(f"{count} variables exceeds the minimization cap of {cap}")
        self.count = count
        self.cap = cap
