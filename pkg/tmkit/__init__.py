"""
Thinging machine models: parse, validate, objectify, simulate, detect events, derive and check behaviors
"""

# local imports
from .diagnostics import (
    Severity, Code, SourceSpan, Diagnostic, TmError, ModelError, PathError, ProfileError, UnknownEvent,
)
from .core import build_model, resolve_path, object_violations, objectify
from .dsl import ParseResult, parse, serialize
from .validate import Strictness, RuleProfile, ValidationReport, default_rule_profile, load_rule_profile, validate
from .sim import (
    Token, SimState, FiringRecord, Trace, enabled_firings, quiescent, step, simulate, format_trace,
    trace_diagnostics,
)
from .events import OccurrenceTable, occurrences, derive_behavior, check_behavior
from .export import export_dot, export_trace_json
