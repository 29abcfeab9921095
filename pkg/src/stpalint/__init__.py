"""stpalint: a compiler and analyzer for textual STPA safety models."""

from .analysis import (
    AnalysisError,
    Conflict,
    ContextRow,
    ContextTable,
    ModelStats,
    build_context_table,
    coverage_gaps,
    detect_conflicts,
    enumerate_contexts,
    expand,
    stats,
    trace_closure,
)
from .causal import ChecklistItem, PathDirection, PathWalk, checklist, validate_cfs, walk_paths
from .corpus import load_corpus
from .model import (
    ALLOWED_QUALIFIERS,
    CausalFactor,
    CfCategory,
    Context,
    ControllerConstraint,
    Diagnostic,
    Edge,
    EdgeKind,
    Entity,
    EntityKind,
    GuideCategory,
    GuideQualifier,
    GuideWord,
    Hazard,
    Loss,
    ProcessModelVariable,
    Severity,
    SourceSpan,
    StpaModel,
    SystemConstraint,
    UnsafeControlAction,
    context_matches,
    qualifier_allowed,
    resolve,
)
from .parser import parse
from .printer import UnresolvedModelError, serialize

__version__ = "0.1.0"

__all__ = [
    "ALLOWED_QUALIFIERS",
    "AnalysisError",
    "CausalFactor",
    "CfCategory",
    "ChecklistItem",
    "Conflict",
    "Context",
    "ContextRow",
    "ContextTable",
    "ControllerConstraint",
    "Diagnostic",
    "Edge",
    "EdgeKind",
    "Entity",
    "EntityKind",
    "GuideCategory",
    "GuideQualifier",
    "GuideWord",
    "Hazard",
    "Loss",
    "ModelStats",
    "PathDirection",
    "PathWalk",
    "ProcessModelVariable",
    "Severity",
    "SourceSpan",
    "StpaModel",
    "SystemConstraint",
    "UnresolvedModelError",
    "UnsafeControlAction",
    "build_context_table",
    "checklist",
    "context_matches",
    "coverage_gaps",
    "detect_conflicts",
    "enumerate_contexts",
    "expand",
    "load_corpus",
    "parse",
    "qualifier_allowed",
    "resolve",
    "serialize",
    "stats",
    "trace_closure",
    "validate_cfs",
    "walk_paths",
]
