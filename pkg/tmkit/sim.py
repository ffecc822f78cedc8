"""
Deterministic synchronous-round token-flow simulation of a static model.

One round, in this order:
  1. every live token moves one hop along each outgoing flow (token id, then arc order); a token with k > 1
     outgoing flows is replicated, the first copy keeping its id; arriving at a process stage processes it;
  2. things injected by the scenario at this round enter their stage;
  3. stages activated by triggers in the previous round fire, create stages first;
  4. every stage firing of this round sends its outgoing triggers, activating their destinations next round.
"""

import logging
from dataclasses import dataclass, field
from enum import StrEnum

# local imports
from .core import violating_arcs
from .diagnostics import Code, Diagnostic, PathError, warning
from .models import Action, Arc, ArcKind, Injection, Path, Scenario, StageRef, StaticModel, fmt_path
from .settings import settings

log = logging.getLogger(__name__)

Payload = str | tuple[str, ...]


class RecordKind(StrEnum):
    MOVE = 'move'
    CREATE = 'create'
    TRIGGER = 'trigger'
    PROCESS = 'process'
    ACTIVATE = 'activate'
    BREACH = 'breach'
    STEP_LIMIT = 'step-limit'


@dataclass(frozen=True)
class Token:
    """A thing instance flowing through stages"""
    id: int
    payload: Payload
    location: StageRef
    processed: bool = False
    origin: int | None = None;      """Id of the token this one was replicated from"""
    halted: bool = False;           """Stopped at an object boundary"""


@dataclass(frozen=True)
class SimState:
    step: int = 0
    tokens: tuple[Token, ...] = ();                 """Live tokens ordered by id"""
    pending: frozenset[StageRef] = frozenset();     """Stages activated by triggers, firing next round"""
    next_id: int = 1
    scheduled: tuple[Injection, ...] = ();          """Injections still to come"""


@dataclass(frozen=True)
class FiringRecord:
    step: int
    kind: RecordKind
    token: int | None
    subject: Arc | StageRef | None
    payload: Payload | None = None

    def __str__(self):
        token = '-' if self.token is None else self.token
        subject = '-' if self.subject is None else self.subject
        return f'{self.step}\t{self.kind}\t{token}\t{subject}'


class FiringKind(StrEnum):
    MOVE = 'move'
    INJECT = 'inject'
    ACTIVATE = 'activate'


@dataclass(frozen=True)
class Firing:
    """Descriptor of a firing enabled in a state"""
    kind: FiringKind
    token: int | None
    subject: Arc | StageRef | Injection


@dataclass(frozen=True)
class Trace:
    records: tuple[FiringRecord, ...] = ()
    model: StaticModel | None = field(default=None, compare=False)
    final_state: SimState | None = field(default=None, compare=False)
    scenario: str | None = field(default=None, compare=False)

    def __str__(self):
        return format_trace(self.records)

    @property
    def step_limited(self) -> bool:
        return bool(self.records) and self.records[-1].kind is RecordKind.STEP_LIMIT


def format_trace(records) -> str:
    """Tab-separated lines: step, kind, token id, subject path"""
    return ''.join(f'{x}\n' for x in records)


def trace_diagnostics(trace: Trace) -> list[Diagnostic]:
    """Warnings for object boundary breaches and for a run cut off by the step limit"""
    diagnostics = []
    for x in trace.records:
        if x.kind is RecordKind.BREACH:
            what = f'token {x.token} halted' if x.subject.kind is ArcKind.FLOW else 'trigger blocked'
            diagnostics.append(warning(
                Code.BOUNDARY_BREACH, str(x.subject), f'round {x.step}: {what} at object boundary'
            ))
        elif x.kind is RecordKind.STEP_LIMIT:
            diagnostics.append(warning(Code.STEP_LIMIT, trace.scenario or '-', f'stopped after {x.step} rounds'))
    return diagnostics


def _activation_key(model: StaticModel, stage: StageRef) -> tuple:
    return stage.action is not Action.CREATE, model.stage_key(stage)


def enabled_firings(model: StaticModel, state: SimState) -> list[Firing]:
    """
    Firings possible in the next round, in the order they happen: token moves by token id and arc order,
    injections due at this round, then pending activations (create stages first, then by declaration order)
    """
    boundaries = boundary_arcs(model)
    firings: list[Firing] = []
    for token in state.tokens:
        if token.halted:
            continue
        firings.extend(
            Firing(FiringKind.MOVE, token.id, x) for x in model.flows_from(token.location) if x.id not in boundaries
        )
    firings.extend(Firing(FiringKind.INJECT, None, x) for x in state.scheduled if x.step == state.step)
    for stage in sorted(state.pending, key=lambda x: _activation_key(model, x)):
        firings.append(Firing(FiringKind.ACTIVATE, None, stage))
    return firings


def boundary_arcs(model: StaticModel) -> set[int]:
    """Ids of arcs crossing the boundary of a declared object through one of its parts"""
    return {x.id for obj in model.objects() for x in violating_arcs(model, obj)}


def quiescent(model: StaticModel, state: SimState) -> bool:
    """No injection or activation is due and no live token has an outgoing flow, a boundary flow included"""
    if state.scheduled or state.pending:
        return False
    return not any(model.flows_from(x.location) for x in state.tokens if not x.halted)


def _flatten(payloads: list[Payload]) -> tuple[str, ...]:
    labels: list[str] = []
    for payload in payloads:
        if isinstance(payload, tuple):
            labels.extend(payload)
        else:
            labels.append(payload)
    return tuple(labels)


def step(model: StaticModel, state: SimState) -> tuple[SimState, list[FiringRecord]]:
    """
    Execute one synchronous round.
    A quiescent state is returned unchanged with no records.
    @param model: static model the state belongs to
    @param state: state before the round
    @return: state after the round and the records of the round
    """
    if quiescent(model, state):
        return state, []

    at = state.step
    boundaries = boundary_arcs(model)
    records: list[FiringRecord] = []
    tokens: list[Token] = []
    next_id = state.next_id
    fired: list[tuple[StageRef, int | None]] = []
    arrivals: dict[Path, list[Payload]] = {}

    # token moves
    for token in state.tokens:
        flows = model.flows_from(token.location)
        if token.halted or not flows:
            tokens.append(token)
            continue
        for i, arc in enumerate(flows):
            if i == 0:
                token_id, origin = token.id, token.origin
            else:
                token_id, origin = next_id, token.id
                next_id += 1

            if arc.id in boundaries:
                log.warning(f'round {at}: token {token_id} halted at object boundary {arc}')
                records.append(FiringRecord(at, RecordKind.BREACH, token_id, arc, token.payload))
                tokens.append(Token(token_id, token.payload, token.location, token.processed, origin, True))
                continue

            processed = token.processed or arc.dst.action is Action.PROCESS
            tokens.append(Token(token_id, token.payload, arc.dst, processed, origin))
            records.append(FiringRecord(at, RecordKind.MOVE, token_id, arc, token.payload))
            fired.append((arc.dst, token_id))
            if arc.dst.action is Action.PROCESS:
                records.append(FiringRecord(at, RecordKind.PROCESS, token_id, arc.dst, token.payload))
            if arc.dst.action in (Action.RECEIVE, Action.PROCESS):
                arrivals.setdefault(arc.dst.thimac, []).append(token.payload)

    # injections from outside
    for injection in state.scheduled:
        if injection.step != at:
            continue
        tokens.append(Token(next_id, injection.label, injection.stage))
        records.append(FiringRecord(at, RecordKind.CREATE, next_id, injection.stage, injection.label))
        fired.append((injection.stage, next_id))
        next_id += 1

    # activations triggered in the previous round
    for stage in sorted(state.pending, key=lambda x: _activation_key(model, x)):
        if stage.action is Action.CREATE:
            labels = _flatten(arrivals.get(stage.thimac, []))
            payload = labels or settings.fresh_label_format.format(thimac=fmt_path(stage.thimac), token=next_id)
            tokens.append(Token(next_id, payload, stage))
            records.append(FiringRecord(at, RecordKind.CREATE, next_id, stage, payload))
            fired.append((stage, next_id))
            next_id += 1
        elif stage.action is Action.PROCESS:
            tokens = [
                Token(x.id, x.payload, x.location, True, x.origin, x.halted) if x.location == stage else x
                for x in tokens
            ]
            records.append(FiringRecord(at, RecordKind.PROCESS, None, stage))
            fired.append((stage, None))
        else:
            records.append(FiringRecord(at, RecordKind.ACTIVATE, None, stage))
            fired.append((stage, None))

    # triggers
    pending: set[StageRef] = set()
    for stage, token_id in fired:
        for arc in model.triggers_from(stage):
            if arc.id in boundaries:
                log.warning(f'round {at}: trigger {arc} blocked at object boundary')
                records.append(FiringRecord(at, RecordKind.BREACH, token_id, arc))
                continue
            records.append(FiringRecord(at, RecordKind.TRIGGER, token_id, arc))
            pending.add(arc.dst)

    log.debug(f'round {at}: {len(records)} records, {len(tokens)} tokens, {len(pending)} activations pending')
    return SimState(
        step=at + 1,
        tokens=tuple(sorted(tokens, key=lambda x: x.id)),
        pending=frozenset(pending),
        next_id=next_id,
        scheduled=tuple(x for x in state.scheduled if x.step > at),
    ), records


def simulate(model: StaticModel, scenario: Scenario | str, max_steps: int = None) -> Trace:
    """
    Run the scenario from an empty state until quiescence or the round bound.
    Reaching the bound appends a step-limit record.
    @param model: static model
    @param scenario: scenario or its name in the model
    @param max_steps: bound on rounds, the configured default if omitted
    @raise PathError: unknown scenario or an injection destination missing from the model
    """
    if isinstance(scenario, str):
        scenario = model.scenario(scenario)
    if max_steps is None:
        max_steps = settings.max_steps
    if max_steps < 1:
        raise ValueError(f'max_steps must be positive: {max_steps}')
    for injection in scenario.injections:
        if not model.has_stage(injection.stage) or injection.stage.action not in (Action.CREATE, Action.TRANSFER):
            raise PathError(f'scenario {scenario.name}: unresolved injection destination {injection.stage}')

    state = SimState(scheduled=scenario.injections)
    records: list[FiringRecord] = []
    while not quiescent(model, state):
        if state.step >= max_steps:
            log.warning(f'scenario {scenario.name}: stopped after {max_steps} rounds')
            records.append(FiringRecord(state.step, RecordKind.STEP_LIMIT, None, None))
            break
        state, round_records = step(model, state)
        records.extend(round_records)

    log.info(f'scenario {scenario.name}: {len(records)} records in {state.step} rounds')
    return Trace(tuple(records), model, state, scenario.name)
