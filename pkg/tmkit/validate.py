"""
Well-formedness of static models: stage adjacency of flows, trigger targets and object encapsulation
"""

import logging
from dataclasses import dataclass
from enum import StrEnum

from lark import Lark, Transformer, v_args
from lark.exceptions import UnexpectedCharacters, UnexpectedToken, UnexpectedEOF

# local imports
from .core import object_violations
from .diagnostics import Code, Diagnostic, SourceSpan, ProfileError, error, has_errors
from .dsl import syntax_diagnostic
from .models import Action, ArcKind, Locality, StaticModel, locality

log = logging.getLogger(__name__)


class Strictness(StrEnum):
    STRICT = 'strict'
    LENIENT = 'lenient'


FlowRule = tuple[Action, Action, Locality]

STRICT_FLOWS: frozenset[FlowRule] = frozenset({
    (Action.CREATE, Action.PROCESS, Locality.SAME),
    (Action.CREATE, Action.RELEASE, Locality.SAME),
    (Action.RECEIVE, Action.PROCESS, Locality.SAME),
    (Action.RECEIVE, Action.RELEASE, Locality.SAME),
    (Action.PROCESS, Action.RELEASE, Locality.SAME),
    (Action.RELEASE, Action.TRANSFER, Locality.SAME),
    (Action.TRANSFER, Action.TRANSFER, Locality.CROSS),
    (Action.TRANSFER, Action.RECEIVE, Locality.SAME),
})

# simplified diagrams let processed things flow straight into another machine
LENIENT_EXTRA_FLOWS: frozenset[FlowRule] = frozenset({
    (Action.PROCESS, Action.PROCESS, Locality.CROSS),
    (Action.PROCESS, Action.RECEIVE, Locality.CROSS),
})

TRIGGER_TARGETS = frozenset({Action.CREATE, Action.PROCESS})


@dataclass(frozen=True)
class RuleProfile:
    flow_adjacency: frozenset[FlowRule];    """Permitted (src action, dst action, locality) of flow arcs"""
    trigger_targets: frozenset[Action];     """Permitted destination actions of trigger arcs"""
    strictness: Strictness

    def allows(self, src: Action, dst: Action, where: Locality) -> bool:
        return (src, dst, where) in self.flow_adjacency


def default_rule_profile(strictness: Strictness | str = Strictness.STRICT) -> RuleProfile:
    """Built-in profile; lenient extends strict with cross-machine flows leaving a process stage"""
    strictness = Strictness(strictness)
    flows = STRICT_FLOWS if strictness is Strictness.STRICT else STRICT_FLOWS | LENIENT_EXTRA_FLOWS
    return RuleProfile(flows, TRIGGER_TARGETS, strictness)


PROFILE_GRAMMAR = r"""
start: _statement*
_statement: base | allow | deny | trigger | untrigger

base: "base" NAME
allow: "allow" NAME FLOW_ARROW NAME NAME
deny: "deny" NAME FLOW_ARROW NAME NAME
trigger: "trigger" NAME
untrigger: "untrigger" NAME

FLOW_ARROW: "->"
NAME: /[A-Za-z][A-Za-z0-9_]*/
COMMENT: /#[^\n]*/

%import common.WS
%ignore WS
%ignore COMMENT
"""

_profile_parser = Lark(PROFILE_GRAMMAR, parser='lalr', propagate_positions=True)


@v_args(meta=True)
class _ProfileStatements(Transformer):
    """Statements as (keyword, words, span) triples"""
    def __init__(self, file: str):
        super().__init__()
        self.file = file

    def __default__(self, data, children, meta):
        span = SourceSpan(self.file, meta.line, meta.column, meta.end_line, meta.end_column)
        return str(data), [str(x) for x in children if x.type == 'NAME'], span

    def start(self, meta, children):
        return list(children)


def load_rule_profile(text: str, file: str = '<profile>') -> RuleProfile:
    """
    Build a rule profile from its text form: an optional leading `base strict|lenient`, then any number of
    `allow A -> B same|cross`, `deny A -> B same|cross`, `trigger A` and `untrigger A` lines applied in order
    @raise ProfileError: carries every problem found
    """
    try:
        statements = _ProfileStatements(file).transform(_profile_parser.parse(text))
    except (UnexpectedCharacters, UnexpectedToken, UnexpectedEOF) as e:
        raise ProfileError([syntax_diagnostic(text, file, e)]) from e

    diagnostics: list[Diagnostic] = []

    def _value(enum, word: str, span: SourceSpan):
        try:
            return enum(word)
        except ValueError:
            choices = '|'.join(x.value for x in enum)
            diagnostics.append(error(Code.SYNTAX, word, f'expected one of {choices}', span))
            return None

    strictness = Strictness.STRICT
    if statements and statements[0][0] == 'base':
        strictness = _value(Strictness, statements[0][1][0], statements[0][2]) or Strictness.STRICT
        statements = statements[1:]

    base = default_rule_profile(strictness)
    flows, targets = set(base.flow_adjacency), set(base.trigger_targets)
    for keyword, words, span in statements:
        if keyword == 'base':
            diagnostics.append(error(Code.SYNTAX, keyword, 'base must be the first statement', span))
        elif keyword in ('allow', 'deny'):
            src, dst = _value(Action, words[0], span), _value(Action, words[1], span)
            where = _value(Locality, words[2], span)
            if src is None or dst is None or where is None:
                continue
            if keyword == 'allow':
                flows.add((src, dst, where))
            else:
                flows.discard((src, dst, where))
        else:
            action = _value(Action, words[0], span)
            if action is None:
                continue
            if keyword == 'trigger':
                targets.add(action)
            else:
                targets.discard(action)

    if diagnostics:
        raise ProfileError(diagnostics)
    return RuleProfile(frozenset(flows), frozenset(targets), strictness)


@dataclass(frozen=True)
class ValidationReport:
    diagnostics: tuple[Diagnostic, ...] = ()

    def __str__(self):
        return '\n'.join(str(x) for x in self.diagnostics)

    @property
    def passed(self) -> bool:
        return not has_errors(self.diagnostics)


def validate(model: StaticModel, profile: RuleProfile) -> ValidationReport:
    """
    Check every arc of the model against the profile and the encapsulation of every declared object.
    Findings are ordered by arc, then by rule: flow adjacency, trigger target, trigger locality, encapsulation.
    @param model: structurally valid model
    @param profile: adjacency and trigger rules
    @return: report, passed iff no error diagnostics
    """
    encapsulation: dict[str, list[Diagnostic]] = {}
    for obj in model.objects():
        for diagnostic in object_violations(model, obj):
            encapsulation.setdefault(diagnostic.subject, []).append(diagnostic)

    diagnostics: list[Diagnostic] = []
    for arc in model.arcs:
        subject = str(arc)
        src, dst = arc.src.action, arc.dst.action
        if arc.kind is ArcKind.FLOW:
            where = locality(arc.src, arc.dst)
            if not profile.allows(src, dst, where):
                other = Locality.CROSS if where is Locality.SAME else Locality.SAME
                if profile.allows(src, dst, other):
                    diagnostics.append(error(
                        Code.LOCALITY, subject, f'{src} -> {dst} is permitted only as a {other}-machine flow'
                    ))
                else:
                    diagnostics.append(error(
                        Code.ADJACENCY, subject, f'{src} -> {dst} is not a permitted {where}-machine flow'
                    ))
        else:
            if dst not in profile.trigger_targets:
                diagnostics.append(error(Code.TRIGGER_TARGET, subject, f'a trigger cannot activate a {dst} stage'))
            if arc.src.thimac == arc.dst.thimac:
                diagnostics.append(error(
                    Code.TRIGGER_LOCALITY, subject, 'a trigger must connect stages of different thimacs'
                ))
        diagnostics.extend(encapsulation.get(subject, []))

    log.debug(f'validated {len(model.arcs)} arcs under {profile.strictness}: {len(diagnostics)} findings')
    return ValidationReport(tuple(diagnostics))
