"""
Textual surface of TM models: lark parser producing declarations with source spans, and the canonical serializer
"""

import logging
from dataclasses import dataclass

import simplejson
from lark import Lark, Transformer, Token, v_args
from lark.exceptions import UnexpectedCharacters, UnexpectedEOF, UnexpectedInput, UnexpectedToken

# local imports
from .core import (
    StageDecl, ThimacDecl, ArcDecl, EventDecl, BehaviorDecl, InjectionDecl, ScenarioDecl, build_model,
)
from .diagnostics import Code, Diagnostic, SourceSpan, ModelError, error
from .models import ArcKind, ArcRef, ThimacKind, StaticModel, Thimac

log = logging.getLogger(__name__)

GRAMMAR = r"""
start: _item*

_item: thimac_decl
     | flow_decl
     | trigger_decl
     | event_decl
     | behavior_decl
     | scenario_decl

thimac_decl: (THIMAC | OBJECT) NAME "{" _member* "}"
_member: thimac_decl | stage_decl
stage_decl: "stage" NAME

flow_decl: "flow" path FLOW_ARROW path
trigger_decl: "trigger" path TRIGGER_ARROW path
path: NAME ("." NAME)*

event_decl: "event" NAME "{" "region" ":" _region_item ("," _region_item)* "}"
_region_item: path | arc_ref
arc_ref: path (FLOW_ARROW | TRIGGER_ARROW) path
       | "[" path (FLOW_ARROW | TRIGGER_ARROW) path "]"

behavior_decl: "behavior" NAME "{" (chain ("," chain)*)? "}"
chain: NAME (FLOW_ARROW NAME)*

scenario_decl: "scenario" NAME "{" injection* "}"
injection: "inject" LABEL "at" path "step" INT

THIMAC: "thimac"
OBJECT: "object"
FLOW_ARROW: "->"
TRIGGER_ARROW: "~>"
NAME: /[A-Za-z][A-Za-z0-9_]*/
COMMENT: /#[^\n]*/
LABEL: /"(?:[^"\\\n]|\\(?:["\\\/bfnrt]|u[0-9a-fA-F]{4}))*"/

%import common.INT
%import common.WS
%ignore WS
%ignore COMMENT
"""

_parser = Lark(GRAMMAR, parser='lalr', propagate_positions=True)


def _unquote(literal: str) -> str:
    """Label of a double-quoted literal with JSON string escapes"""
    return simplejson.loads(literal, strict=False)


def _quote(label: str) -> str:
    """Double-quoted literal; quotes, backslashes and control characters escaped"""
    return simplejson.dumps(label, ensure_ascii=False)


def _arc_kind(arrow: Token) -> ArcKind:
    return ArcKind.FLOW if arrow.type == 'FLOW_ARROW' else ArcKind.TRIGGER


@v_args(meta=True)
class _DeclarationBuilder(Transformer):
    """Turns the parse tree into core declarations carrying source spans"""
    def __init__(self, file: str):
        super().__init__()
        self.file = file

    def _span(self, meta) -> SourceSpan | None:
        if meta.empty:
            return None
        return SourceSpan(self.file, meta.line, meta.column, meta.end_line, meta.end_column)

    def start(self, meta, children):
        return list(children)

    def path(self, meta, children):
        return '.'.join(str(x) for x in children)

    def stage_decl(self, meta, children):
        return StageDecl(str(children[0]), self._span(meta))

    def thimac_decl(self, meta, children):
        keyword, name, *members = children
        kind = ThimacKind.OBJECT if keyword.type == 'OBJECT' else ThimacKind.THING
        return ThimacDecl(
            name=str(name),
            kind=kind,
            stages=tuple(x for x in members if isinstance(x, StageDecl)),
            children=tuple(x for x in members if isinstance(x, ThimacDecl)),
            span=self._span(meta),
        )

    def flow_decl(self, meta, children):
        src, _, dst = children
        return ArcDecl(ArcKind.FLOW, src, dst, self._span(meta))

    def trigger_decl(self, meta, children):
        src, _, dst = children
        return ArcDecl(ArcKind.TRIGGER, src, dst, self._span(meta))

    def arc_ref(self, meta, children):
        src, arrow, dst = children
        return ArcDecl(_arc_kind(arrow), src, dst, self._span(meta))

    def event_decl(self, meta, children):
        name, *region = children
        return EventDecl(str(name), tuple(region), self._span(meta))

    def chain(self, meta, children):
        return tuple(str(x) for x in children if x.type == 'NAME')

    def behavior_decl(self, meta, children):
        name, *chains = children
        return BehaviorDecl(str(name), tuple(chains), self._span(meta))

    def injection(self, meta, children):
        label, path, step = children
        return InjectionDecl(_unquote(str(label)), path, int(step), self._span(meta))

    def scenario_decl(self, meta, children):
        name, *injections = children
        return ScenarioDecl(str(name), tuple(injections), self._span(meta))


@dataclass(frozen=True)
class ParseResult:
    model: StaticModel | None;          """Present iff no error diagnostic"""
    diagnostics: tuple[Diagnostic, ...] = ()

    @property
    def ok(self) -> bool:
        return self.model is not None


def _end_of(text: str) -> tuple[int, int]:
    lines = text.split('\n')
    return len(lines), len(lines[-1]) + 1


def _clamp(text: str, line: int | None, column: int | None) -> tuple[int, int]:
    """Position inside the text bounds; missing or out-of-range positions fall back to the end of the text"""
    end_line, end_column = _end_of(text)
    if not line or not column or line < 1 or column < 1 or (line, column) > (end_line, end_column):
        return end_line, end_column
    return line, column


def syntax_diagnostic(text: str, file: str, e: UnexpectedInput) -> Diagnostic:
    """Lexical or syntax diagnostic for a lark error, its span clamped into the text"""
    if isinstance(e, UnexpectedCharacters):
        line, column = _clamp(text, e.line, e.column)
        char = text[e.pos_in_stream] if 0 <= e.pos_in_stream < len(text) else ''
        span = SourceSpan(file, line, column, line, column + 1)
        return error(Code.LEXICAL, repr(char), f'unexpected character {char!r}', span)

    if isinstance(e, UnexpectedToken) and e.token.type != '$END':
        token = e.token
        line, column = _clamp(text, token.line, token.column)
        end_line, end_column = _clamp(text, token.end_line, token.end_column)
        if (end_line, end_column) < (line, column):
            end_line, end_column = line, column
        expected = ', '.join(sorted(e.expected))
        return error(Code.SYNTAX, str(token), f'unexpected {token!s}, expected one of: {expected}',
                     SourceSpan(file, line, column, end_line, end_column))

    # UnexpectedEOF, or UnexpectedToken at the end of input
    line, column = _end_of(text)
    expected = ', '.join(sorted(getattr(e, 'expected', ()) or ()))
    return error(Code.SYNTAX, '<eof>', f'unexpected end of input, expected one of: {expected}',
                 SourceSpan(file, line, column, line, column))


def parse_declarations(text: str, file: str = '<text>') -> list:
    """
    Parse DSL text into an ordered list of declarations
    @raise lark.exceptions.UnexpectedInput: lexical or syntax error
    """
    tree = _parser.parse(text)
    return _DeclarationBuilder(file).transform(tree)


def parse(text: str, file: str = '<text>') -> ParseResult:
    """
    Parse DSL text into a static model. Never raises on malformed input: lexical, syntax and semantic problems
    are returned as diagnostics carrying source spans.
    @param text: model source
    @param file: name used in source spans
    """
    try:
        declarations = parse_declarations(text, file)
    except (UnexpectedCharacters, UnexpectedToken, UnexpectedEOF) as e:
        diagnostic = syntax_diagnostic(text, file, e)
        log.debug(f'{file}: {diagnostic}')
        return ParseResult(None, (diagnostic,))

    try:
        model = build_model(declarations)
    except ModelError as e:
        return ParseResult(None, e.diagnostics)

    log.debug(f'{file}: parsed {len(declarations)} declarations')
    return ParseResult(model, ())


def _thimac_lines(model: StaticModel, thimac: Thimac, depth: int, lines: list[str]):
    indent = '  ' * depth
    header = f'{indent}{thimac.kind.keyword} {thimac.name} {{'
    if not thimac.stages and not thimac.children:
        lines.append(header + '}')
        return
    lines.append(header)
    for action in thimac.stages:
        lines.append(f'{indent}  stage {action}')
    for child in thimac.children:
        _thimac_lines(model, model.thimac(child), depth + 1, lines)
    lines.append(f'{indent}}}')


def _region_item(item) -> str:
    if isinstance(item, ArcRef):
        return f'[{item}]'
    return str(item)


def serialize(model: StaticModel) -> str:
    """
    Canonical text of the model: thimacs nested with two-space indents, then arcs, events, behaviors and
    scenarios, each in declaration order, one declaration per line
    """
    lines: list[str] = []
    for root in model.roots:
        _thimac_lines(model, root, 0, lines)

    for arc in model.arcs:
        lines.append(f'{arc.kind} {arc}')

    for event in model.events:
        region = ', '.join(_region_item(x) for x in event.region)
        lines.append(f'event {event.name} {{ region: {region} }}')

    for behavior in model.behaviors:
        chains = ', '.join(' -> '.join(x) for x in behavior.chains())
        lines.append(f'behavior {behavior.name} {{ {chains} }}' if chains else f'behavior {behavior.name} {{}}')

    for scenario in model.scenarios:
        if not scenario.injections:
            lines.append(f'scenario {scenario.name} {{}}')
            continue
        lines.append(f'scenario {scenario.name} {{')
        for x in scenario.injections:
            lines.append(f'  inject {_quote(x.label)} at {x.stage} step {x.step}')
        lines.append('}')

    return '\n'.join(lines) + '\n' if lines else ''

