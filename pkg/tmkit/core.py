"""
Building static models from declarations, path resolution, object encapsulation and objectification
"""

import dataclasses
import logging
import re
from dataclasses import dataclass

# local imports
from .diagnostics import Code, Diagnostic, SourceSpan, ModelError, PathError, error
from .models import (
    Path, Action, ArcKind, ThimacKind, StageRef, ArcRef, Arc, Thimac, RegionItem, Event, BehaviorGraph, Injection,
    Scenario, StaticModel, fmt_path,
)

log = logging.getLogger(__name__)

IDENT_RE = re.compile(r'[A-Za-z][A-Za-z0-9_]*')
ACTION_NAMES = frozenset(x.value for x in Action)
INJECTION_ACTIONS = frozenset({Action.TRANSFER, Action.CREATE})


@dataclass(frozen=True)
class StageDecl:
    action: str
    span: SourceSpan | None = None


@dataclass(frozen=True)
class ThimacDecl:
    name: str
    kind: ThimacKind = ThimacKind.THING
    stages: tuple[StageDecl, ...] = ()
    children: tuple['ThimacDecl', ...] = ()
    span: SourceSpan | None = None


@dataclass(frozen=True)
class ArcDecl:
    kind: ArcKind
    src: str;   """Dotted stage path"""
    dst: str;   """Dotted stage path"""
    span: SourceSpan | None = None


@dataclass(frozen=True)
class EventDecl:
    name: str
    region: tuple[str | ArcDecl, ...];  """Stage paths and arc references"""
    span: SourceSpan | None = None


@dataclass(frozen=True)
class BehaviorDecl:
    name: str
    chains: tuple[tuple[str, ...], ...]
    span: SourceSpan | None = None


@dataclass(frozen=True)
class InjectionDecl:
    label: str
    path: str
    step: int
    span: SourceSpan | None = None


@dataclass(frozen=True)
class ScenarioDecl:
    name: str
    injections: tuple[InjectionDecl, ...] = ()
    span: SourceSpan | None = None


Declaration = ThimacDecl | ArcDecl | EventDecl | BehaviorDecl | ScenarioDecl


def split_path(path: str) -> Path:
    return tuple(path.split('.')) if path else ()


def resolve_path(model: StaticModel, path: str) -> Thimac | StageRef:
    """
    Resolve a dotted path to a thimac, or to a stage when the last segment is an action name.
    Resolution is case-sensitive; the create stage of every thimac resolves even if undeclared.
    @raise PathError: unknown segment or undeclared stage
    """
    segments = split_path(path)
    if not segments or any(not IDENT_RE.fullmatch(x) for x in segments):
        raise PathError(f'malformed path "{path}"')

    action = None
    if segments[-1] in ACTION_NAMES:
        action = Action(segments[-1])
        segments = segments[:-1]
        if not segments:
            raise PathError(f'stage "{path}" has no thimac')

    for i in range(1, len(segments) + 1):
        if not model.has_thimac(segments[:i]):
            raise PathError(f'unknown segment "{segments[i - 1]}" in "{path}"')

    thimac = model.thimac(segments)
    if action is None:
        return thimac
    if not thimac.has_stage(action):
        raise PathError(f'thimac {thimac} has no {action} stage')
    return StageRef(thimac.path, action)


def resolve_stage(model: StaticModel, path: str) -> StageRef:
    """Resolve a dotted path that must name a stage"""
    entity = resolve_path(model, path)
    if not isinstance(entity, StageRef):
        raise PathError(f'"{path}" is a thimac, not a stage')
    return entity


class _Builder:
    """Collects diagnostics while turning declarations into a model"""
    def __init__(self):
        self.diagnostics: list[Diagnostic] = []
        self.thimacs: list[Thimac] = []

    def fail(self, code: Code, subject: str, message: str, span: SourceSpan | None):
        self.diagnostics.append(error(code, subject, message, span))

    def add_thimacs(self, decls: list[ThimacDecl], parent: Path):
        seen: set[str] = set()
        for decl in decls:
            path = parent + (decl.name,)
            if not IDENT_RE.fullmatch(decl.name) or decl.name in ACTION_NAMES:
                self.fail(Code.INVALID_NAME, fmt_path(path), f'"{decl.name}" is not a valid thimac name', decl.span)
                continue
            if decl.name in seen:
                self.fail(Code.DUPLICATE_NAME, fmt_path(path), f'duplicate sibling name "{decl.name}"', decl.span)
                continue
            seen.add(decl.name)

            stages: list[Action] = []
            for stage in decl.stages:
                if stage.action not in ACTION_NAMES:
                    self.fail(Code.SYNTAX, f'{fmt_path(path)}.{stage.action}', f'unknown action "{stage.action}"',
                              stage.span)
                elif Action(stage.action) in stages:
                    self.fail(Code.DUPLICATE_DECLARATION, f'{fmt_path(path)}.{stage.action}',
                              f'stage {stage.action} declared twice', stage.span)
                else:
                    stages.append(Action(stage.action))

            index = len(self.thimacs)
            self.thimacs.append(Thimac(path, decl.kind, tuple(stages), ()))
            self.add_thimacs(list(decl.children), path)
            children = tuple(x.path for x in self.thimacs[index + 1:] if x.parent == path)
            self.thimacs[index] = dataclasses.replace(self.thimacs[index], children=children)

    def stage(self, model: StaticModel, path: str, span: SourceSpan | None) -> StageRef | None:
        try:
            return resolve_stage(model, path)
        except PathError as e:
            self.fail(Code.UNRESOLVED, path, str(e), span)
            return None

    def arc(self, model: StaticModel, decl: ArcDecl) -> ArcRef | None:
        src = self.stage(model, decl.src, decl.span)
        dst = self.stage(model, decl.dst, decl.span)
        if src is None or dst is None:
            return None
        return ArcRef(decl.kind, src, dst)


def build_model(declarations: list[Declaration]) -> StaticModel:
    """
    Build a static model from an ordered list of declarations, preserving declaration order.
    Arcs may reference thimacs declared later.
    @raise ModelError: carries every diagnostic found, in declaration order
    """
    builder = _Builder()
    builder.add_thimacs([x for x in declarations if isinstance(x, ThimacDecl)], ())
    skeleton = StaticModel(thimacs=tuple(builder.thimacs))

    arcs: list[Arc] = []
    for decl in (x for x in declarations if isinstance(x, ArcDecl)):
        ref = builder.arc(skeleton, decl)
        if ref is None:
            continue
        if ref.src == ref.dst:
            builder.fail(Code.SELF_ARC, str(ref), 'an arc must connect two distinct stages', decl.span)
        elif ref.kind is ArcKind.TRIGGER and ref.src.thimac == ref.dst.thimac:
            builder.fail(Code.TRIGGER_LOCALITY, str(ref), 'a trigger must connect stages of different thimacs',
                         decl.span)
        elif any(x.ref == ref for x in arcs):
            builder.fail(Code.DUPLICATE_DECLARATION, str(ref), 'arc declared twice', decl.span)
        else:
            arcs.append(Arc(len(arcs), ref.kind, ref.src, ref.dst))
    skeleton = dataclasses.replace(skeleton, arcs=tuple(arcs))

    names: dict[str, set[str]] = {'event': set(), 'behavior': set(), 'scenario': set()}

    def _unique(what: str, name: str, span: SourceSpan | None) -> bool:
        if not IDENT_RE.fullmatch(name):
            builder.fail(Code.INVALID_NAME, name, f'"{name}" is not a valid {what} name', span)
            return False
        if name in names[what]:
            builder.fail(Code.DUPLICATE_NAME, name, f'duplicate {what} name "{name}"', span)
            return False
        names[what].add(name)
        return True

    events: list[Event] = []
    for decl in (x for x in declarations if isinstance(x, EventDecl)):
        if not _unique('event', decl.name, decl.span):
            continue
        region: list[RegionItem] = []
        for item in decl.region:
            if isinstance(item, ArcDecl):
                ref = builder.arc(skeleton, item)
                if ref is not None and not skeleton.has_arc(ref):
                    builder.fail(Code.UNRESOLVED, str(ref), f'event {decl.name} names an undeclared arc', item.span)
                    ref = None
            else:
                ref = builder.stage(skeleton, item, decl.span)
            if ref is None:
                continue
            if ref in region:
                builder.fail(Code.DUPLICATE_DECLARATION, str(ref), f'listed twice in the region of {decl.name}',
                             decl.span)
                continue
            region.append(ref)
        if not decl.region:
            builder.fail(Code.SYNTAX, decl.name, 'event region is empty', decl.span)
        events.append(Event(decl.name, tuple(region)))

    behaviors: list[BehaviorGraph] = []
    for decl in (x for x in declarations if isinstance(x, BehaviorDecl)):
        if not _unique('behavior', decl.name, decl.span):
            continue
        for name in sorted({x for chain in decl.chains for x in chain} - names['event']):
            builder.fail(Code.UNRESOLVED, name, f'behavior {decl.name} names an undeclared event', decl.span)
        behaviors.append(BehaviorGraph.from_chains(decl.name, decl.chains))

    scenarios: list[Scenario] = []
    for decl in (x for x in declarations if isinstance(x, ScenarioDecl)):
        if not _unique('scenario', decl.name, decl.span):
            continue
        injections: list[Injection] = []
        for item in decl.injections:
            stage = builder.stage(skeleton, item.path, item.span)
            if stage is None:
                continue
            if stage.action not in INJECTION_ACTIONS:
                builder.fail(Code.INJECTION_TARGET, str(stage), 'things are injected at transfer or create stages',
                             item.span)
                continue
            if item.step < 0:
                builder.fail(Code.SYNTAX, str(stage), f'negative injection step {item.step}', item.span)
                continue
            injections.append(Injection(item.label, stage, item.step))
        scenarios.append(Scenario(decl.name, tuple(injections)))

    if builder.diagnostics:
        raise ModelError(builder.diagnostics)

    model = dataclasses.replace(
        skeleton, events=tuple(events), behaviors=tuple(behaviors), scenarios=tuple(scenarios)
    )
    log.debug(f'built model: {len(model.thimacs)} thimacs, {len(model.arcs)} arcs, {len(model.events)} events')
    return model


def _thimac_path(model: StaticModel, thimac: Thimac | Path | str) -> Path:
    if isinstance(thimac, Thimac):
        path = thimac.path
    elif isinstance(thimac, str):
        path = split_path(thimac)
    else:
        path = tuple(thimac)
    if not model.has_thimac(path):
        raise PathError(f'unknown thimac {fmt_path(path)}')
    return path


def _members(model: StaticModel, whole: Path) -> frozenset[Path]:
    return frozenset(x.path for x in model.subtree(whole))


def _crossing(arc: Arc, whole: Path, members: frozenset[Path]) -> str | None:
    """'out' or 'in' for an arc crossing the boundary of the whole through one of its parts"""
    if arc.src.thimac != whole and arc.src.thimac in members and arc.dst.thimac not in members:
        return 'out'
    if arc.dst.thimac != whole and arc.dst.thimac in members and arc.src.thimac not in members:
        return 'in'
    return None


def violating_arcs(model: StaticModel, thimac: Thimac | Path | str) -> list[Arc]:
    """Arcs by which a part of the thimac interacts with the outside bypassing the whole"""
    whole = _thimac_path(model, thimac)
    members = _members(model, whole)
    return [x for x in model.arcs if _crossing(x, whole, members)]


def object_violations(model: StaticModel, thimac: Thimac | Path | str) -> list[Diagnostic]:
    """
    One diagnostic per arc with exactly one endpoint in a proper descendant of the thimac and the other outside its
    subtree. Arcs at the thimac's own stages never violate. Empty iff the thimac can be an object.
    @raise PathError: unknown thimac
    """
    whole = _thimac_path(model, thimac)
    members = _members(model, whole)
    diagnostics = []
    for arc in violating_arcs(model, whole):
        part = arc.src if _crossing(arc, whole, members) == 'out' else arc.dst
        diagnostics.append(error(
            Code.ENCAPSULATION, str(arc),
            f'{fmt_path(part.thimac)} interacts with the outside of {fmt_path(whole)} bypassing the whole'
        ))
    return diagnostics


def _with_stages(thimac: Thimac, *actions: Action) -> Thimac:
    stages = list(thimac.stages)
    for action in actions:
        if not thimac.has_stage(action) and action not in stages:
            stages.append(action)
    return dataclasses.replace(thimac, stages=tuple(stages))


def objectify(model: StaticModel, thimac: Thimac | Path | str) -> StaticModel:
    """
    Turn the thimac into an object: every arc by which a part reaches the outside is routed through the whole.
    Outbound s -> t becomes s -> W.release -> W.transfer -> t; inbound s -> t becomes
    s -> W.transfer -> W.receive -> W.process ~> t. Triggers are re-anchored the same way as flows.
    Surviving arcs keep their relative order, new arcs are appended unless already present.
    Event regions naming a rewritten arc are re-anchored onto the replacement arc reaching the same external stage.
    @raise PathError: unknown thimac
    """
    whole_path = _thimac_path(model, thimac)
    whole = model.thimac(whole_path)
    release, transfer = StageRef(whole_path, Action.RELEASE), StageRef(whole_path, Action.TRANSFER)
    receive, process = StageRef(whole_path, Action.RECEIVE), StageRef(whole_path, Action.PROCESS)
    members = _members(model, whole_path)

    kept = [x.ref for x in model.arcs if _crossing(x, whole_path, members) is None]
    added: list[ArcRef] = []
    replaced: dict[ArcRef, ArcRef] = {}
    needed: list[Action] = []

    def _add(ref: ArcRef):
        if ref not in kept and ref not in added:
            added.append(ref)

    for arc in model.arcs:
        direction = _crossing(arc, whole_path, members)
        if direction is None:
            continue
        if direction == 'out':
            needed.extend([Action.RELEASE, Action.TRANSFER])
            _add(ArcRef(ArcKind.FLOW, arc.src, release))
            _add(ArcRef(ArcKind.FLOW, release, transfer))
            _add(ArcRef(ArcKind.FLOW, transfer, arc.dst))
            replaced[arc.ref] = ArcRef(ArcKind.FLOW, transfer, arc.dst)
        else:
            needed.extend([Action.TRANSFER, Action.RECEIVE, Action.PROCESS])
            _add(ArcRef(ArcKind.FLOW, arc.src, transfer))
            _add(ArcRef(ArcKind.FLOW, transfer, receive))
            _add(ArcRef(ArcKind.FLOW, receive, process))
            _add(ArcRef(ArcKind.TRIGGER, process, arc.dst))
            replaced[arc.ref] = ArcRef(ArcKind.TRIGGER, process, arc.dst)

    new_whole = dataclasses.replace(_with_stages(whole, *needed), kind=ThimacKind.OBJECT)
    thimacs = tuple(new_whole if x.path == whole_path else x for x in model.thimacs)
    arcs = tuple(Arc(i, x.kind, x.src, x.dst) for i, x in enumerate(kept + added))

    events = tuple(
        Event(x.name, tuple(dict.fromkeys(replaced.get(item, item) for item in x.region)))
        for x in model.events
    )
    if replaced:
        log.info(f'objectify {fmt_path(whole_path)}: rerouted {len(replaced)} arcs through the whole')
    return dataclasses.replace(model, thimacs=thimacs, arcs=arcs, events=events)
