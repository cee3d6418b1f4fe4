"""Hasse-diagram summaries of decentralized multi-agent executions, with
must/may explanations for "when", "why not" and "what" queries."""

from __future__ import annotations

__version__ = "0.1.0"

from .baseline import BaselineGraph, CorpusStats, baseline_build, stats
from .boolmin import BooleanSpec, Formula, minimize
from .errors import (
    ConditionUnsatisfiable,
    HasseExplainError,
    NoMatchingDiagram,
    ResourceLimit,
    TaskNeverObserved,
    UnanswerableQuery,
    ValidationError,
)
from .explain import Explanation, Query, QueryKind, explain
from .io import export_dot, load_episodes, save_episodes
from .model import Episode, Feature, HasseDiagram, TaskSequence, Vertex, conforms, validate
from .summarize import aggregate, hds_build, transitive_reduction, verify_complete, verify_correct
from .uncertainty import build_uncertainty, comparability_split

__all__ = [
    "BaselineGraph",
    "BooleanSpec",
    "ConditionUnsatisfiable",
    "CorpusStats",
    "Episode",
    "Explanation",
    "Feature",
    "Formula",
    "HasseDiagram",
    "HasseExplainError",
    "NoMatchingDiagram",
    "Query",
    "QueryKind",
    "ResourceLimit",
    "TaskNeverObserved",
    "TaskSequence",
    "UnanswerableQuery",
    "ValidationError",
    "Vertex",
    "aggregate",
    "baseline_build",
    "build_uncertainty",
    "comparability_split",
    "conforms",
    "explain",
    "export_dot",
    "hds_build",
    "load_episodes",
    "minimize",
    "save_episodes",
    "stats",
    "transitive_reduction",
    "validate",
    "verify_complete",
    "verify_correct",
]
