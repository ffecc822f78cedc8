"""
Event occurrences over simulation traces, behavior graph derivation and conformance of declared behaviors
"""

import logging
from dataclasses import dataclass

# local imports
from .diagnostics import PathError, UnknownEvent
from .models import ArcRef, BehaviorGraph, Event, RegionItem, StageRef, StaticModel
from .sim import RecordKind, Trace

log = logging.getLogger(__name__)

_STAGE_FIRINGS = (RecordKind.CREATE, RecordKind.PROCESS, RecordKind.ACTIVATE)


@dataclass(frozen=True)
class OccurrenceTable:
    """Occurrence steps per event, events in declaration order"""
    entries: tuple[tuple[str, tuple[int, ...]], ...] = ()

    def __str__(self):
        return format_occurrences(self)

    def __len__(self):
        return len(self.entries)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.entries)

    def steps(self, name: str) -> tuple[int, ...]:
        for x, steps in self.entries:
            if x == name:
                return steps
        raise UnknownEvent(f'no event {name} in the occurrence table')

    def first(self, name: str) -> int | None:
        steps = self.steps(name)
        return steps[0] if steps else None

    def count(self, name: str) -> int:
        return len(self.steps(name))


def fired_elements(trace: Trace) -> dict[int, set[RegionItem]]:
    """Stages and arcs fired at each step: stages created, processed, activated or entered; arcs moved or triggered"""
    fired: dict[int, set[RegionItem]] = {}
    for record in trace.records:
        items = fired.setdefault(record.step, set())
        if record.kind in _STAGE_FIRINGS and isinstance(record.subject, StageRef):
            items.add(record.subject)
        elif record.kind is RecordKind.MOVE:
            items.add(record.subject.ref)
            items.add(record.subject.dst)
        elif record.kind is RecordKind.TRIGGER:
            items.add(record.subject.ref)
    return fired


def _check_region(model: StaticModel, event: Event):
    for item in event.region:
        present = model.has_arc(item) if isinstance(item, ArcRef) else model.has_stage(item)
        if not present:
            raise PathError(f'event {event.name}: unresolved region element {item}')


def occurrences(trace: Trace, events: list[Event] = None) -> OccurrenceTable:
    """
    Event E occurs at step t iff t is the first step by which every element of its region has fired at least
    once since the previous occurrence of E
    @param trace: simulation trace
    @param events: events to detect, the events of the trace's model if omitted
    @raise PathError: a region element missing from the trace's model
    """
    if events is None:
        events = list(trace.model.events) if trace.model else []
    if trace.model is not None:
        for event in events:
            _check_region(trace.model, event)

    fired = fired_elements(trace)
    entries = []
    for event in events:
        steps: list[int] = []
        waiting = set(event.region)
        for at in sorted(fired):
            waiting -= fired[at]
            if not waiting:
                steps.append(at)
                waiting = set(event.region)
        entries.append((event.name, tuple(steps)))
    return OccurrenceTable(tuple(entries))


def derive_behavior(table: OccurrenceTable, name: str = 'derived') -> BehaviorGraph:
    """
    Chronology of a run: events that occurred, chained by first occurrence with ties broken by table order,
    and a self-loop on every event occurring more than once
    @raise ValueError: empty table
    """
    if not len(table):
        raise ValueError('cannot derive a behavior from an empty occurrence table')

    index = {x: i for i, x in enumerate(table.names)}
    nodes = sorted((x for x in table.names if table.count(x)), key=lambda x: (table.first(x), index[x]))
    edges: list[tuple[str, str]] = []
    for i, node in enumerate(nodes):
        if i:
            edges.append((nodes[i - 1], node))
        if table.count(node) > 1:
            edges.append((node, node))
    return BehaviorGraph(name, tuple(nodes), tuple(edges))


def check_behavior(declared: BehaviorGraph, table: OccurrenceTable) -> list[tuple[str, str]]:
    """
    Edges of the declared behavior the run violates, in declaration order; empty if the run conforms.
    E -> F is violated when E occurs and F does not, or E first occurs after F; E -> E when E occurs
    fewer than twice.
    @raise UnknownEvent: the behavior names an event missing from the table
    """
    for node in declared.nodes:
        table.steps(node)

    violated = []
    for src, dst in declared.edges:
        if src == dst:
            if table.count(src) < 2:
                violated.append((src, dst))
            continue
        first_src, first_dst = table.first(src), table.first(dst)
        if first_src is None:
            continue
        if first_dst is None or first_src > first_dst:
            violated.append((src, dst))

    if violated:
        log.info(f'behavior {declared.name}: {len(violated)} violated edges')
    return violated


def format_occurrences(table: OccurrenceTable) -> str:
    """One line per event: name, tab, comma-separated steps or `-`"""
    return ''.join(f'{name}\t{",".join(str(x) for x in steps) or "-"}\n' for name, steps in table.entries)


def format_behavior(graph: BehaviorGraph) -> str:
    """One chain per line, `A -> B -> C`; isolated nodes as a bare name"""
    return ''.join(' -> '.join(chain) + '\n' for chain in graph.chains())


def format_violations(violated: list[tuple[str, str]]) -> str:
    return ''.join(f'{src} -> {dst}\n' for src, dst in violated)
