"""
Diagnostics reported by the parser, the model builder and the validator, and the exception hierarchy
"""

from dataclasses import dataclass
from enum import StrEnum


class Severity(StrEnum):
    ERROR = 'error'
    WARNING = 'warning'


class Code(StrEnum):
    """Closed set of diagnostic codes"""
    LEXICAL = 'lexical'
    SYNTAX = 'syntax'
    UNRESOLVED = 'unresolved'
    DUPLICATE_NAME = 'duplicate-name'
    DUPLICATE_DECLARATION = 'duplicate-declaration'
    INVALID_NAME = 'invalid-name'
    SELF_ARC = 'self-arc'
    TRIGGER_LOCALITY = 'trigger-locality'
    INJECTION_TARGET = 'injection-target'
    ADJACENCY = 'adjacency'
    LOCALITY = 'locality'
    TRIGGER_TARGET = 'trigger-target'
    ENCAPSULATION = 'encapsulation'
    BOUNDARY_BREACH = 'boundary-breach'
    STEP_LIMIT = 'step-limit'


@dataclass(frozen=True)
class SourceSpan:
    """Location of a construct in a source text, 1-based lines and columns, end column exclusive"""
    file: str
    start_line: int
    start_column: int
    end_line: int
    end_column: int

    def __str__(self):
        return f'{self.file}:{self.start_line}:{self.start_column}-{self.end_line}:{self.end_column}'


@dataclass(frozen=True)
class Diagnostic:
    severity: Severity;             """Error or warning"""
    code: Code;                     """Rule identifier"""
    subject: str;                   """Dotted path of the thimac, stage or arc concerned"""
    message: str;                   """Human-readable description"""
    span: SourceSpan | None = None; """Where in the source text, if the model came from text"""

    def __str__(self):
        where = f'{self.span}: ' if self.span else ''
        return f'{where}{self.severity}[{self.code}] {self.subject} → {self.message}'

    @property
    def is_error(self) -> bool:
        return self.severity is Severity.ERROR


def error(code: Code, subject: str, message: str, span: SourceSpan = None) -> Diagnostic:
    return Diagnostic(Severity.ERROR, code, subject, message, span)


def warning(code: Code, subject: str, message: str, span: SourceSpan = None) -> Diagnostic:
    return Diagnostic(Severity.WARNING, code, subject, message, span)


def has_errors(diagnostics) -> bool:
    return any(x.is_error for x in diagnostics)


class TmError(Exception):
    """Error in handling a TM model"""


class ModelError(TmError, ValueError):
    """Declarations do not form a valid static model"""
    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = tuple(diagnostics)
        super().__init__('; '.join(str(x) for x in self.diagnostics))


class PathError(TmError, LookupError):
    """A dotted path or a name does not resolve in the model"""


class ProfileError(TmError, ValueError):
    """Malformed rule profile text"""
    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = tuple(diagnostics)
        super().__init__('; '.join(str(x) for x in self.diagnostics))


class UnknownEvent(TmError, LookupError):
    """A behavior graph names an event missing from the occurrence table"""
